#include "pltr/sampler.hpp"

#include <stdexcept>
#include <string>

namespace pltr {

BatchSampler::BatchSampler(SamplerConfig cfg, const FeatureDataset& ds)
    : cfg_(cfg), num_samples_(ds.size()), rng_(cfg.seed) {
    if (cfg_.batch_size == 0) throw std::invalid_argument("batch size must be >= 1");
    if (num_samples_ == 0) throw std::invalid_argument("cannot sample from an empty dataset");
    if (cfg_.kind == SamplerKind::ClassBalanced) {
        by_class_.resize(ds.num_classes);
        for (std::size_t i = 0; i < ds.size(); ++i)
            by_class_[ds.labels[i]].push_back(static_cast<std::uint32_t>(i));
        for (std::size_t y = 0; y < by_class_.size(); ++y)
            if (by_class_[y].empty())
                throw std::invalid_argument("class " + std::to_string(y) +
                                            " has no samples; class-balanced sampling undefined");
    }
}

std::vector<std::uint32_t> BatchSampler::next_batch() {
    std::vector<std::uint32_t> out(cfg_.batch_size);
    if (cfg_.kind == SamplerKind::ClassBalanced) {
        std::uniform_int_distribution<std::size_t> pick_class(0, by_class_.size() - 1);
        for (auto& slot : out) {
            const auto& members = by_class_[pick_class(rng_)];
            std::uniform_int_distribution<std::size_t> pick_member(0, members.size() - 1);
            slot = members[pick_member(rng_)];
        }
    } else {
        std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(num_samples_ - 1));
        for (auto& slot : out) slot = pick(rng_);
    }
    return out;
}

std::size_t BatchSampler::batches_per_epoch() const {
    return (num_samples_ + cfg_.batch_size - 1) / cfg_.batch_size;
}

}  // namespace pltr
