#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "pltr/dataset.hpp"

namespace pltr {

enum class SamplerKind { ClassBalanced, InstanceBalanced };

struct SamplerConfig {
    SamplerKind kind = SamplerKind::ClassBalanced;
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;
};

// Draws mini-batch indices with replacement. ClassBalanced picks a class
// uniformly first, then an instance within it, so the class marginal is
// uniform regardless of the imbalance.
class BatchSampler {
public:
    BatchSampler(SamplerConfig cfg, const FeatureDataset& ds);

    std::vector<std::uint32_t> next_batch();

    // ceil(N / batch_size); gives "one epoch" a defined length under
    // sampling with replacement.
    std::size_t batches_per_epoch() const;

private:
    SamplerConfig cfg_;
    std::size_t num_samples_;
    std::vector<std::vector<std::uint32_t>> by_class_;
    std::mt19937_64 rng_;
};

}  // namespace pltr
