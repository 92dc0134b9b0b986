#include "pltr/baseline.hpp"

#include <cmath>
#include <stdexcept>

namespace pltr {

std::vector<double> linear_logits(const LinearModel& model, std::span<const double> x) {
    if (x.size() != model.dim()) throw std::invalid_argument("input dimension does not match model");
    std::vector<double> out(model.num_classes());
    for (std::size_t y = 0; y < model.num_classes(); ++y)
        out[y] = dot(model.weights.row(y), x) + model.bias[y];
    return out;
}

std::vector<double> linear_posterior(const LinearModel& model, std::span<const double> x) {
    return stable_softmax(linear_logits(model, x));
}

std::size_t predict_linear(const LinearModel& model, std::span<const double> x) {
    const auto lg = linear_logits(model, x);
    std::size_t best = 0;
    for (std::size_t y = 1; y < lg.size(); ++y)
        if (lg[y] > lg[best]) best = y;
    return best;
}

namespace {

void check_batch(const LinearModel& model, const Batch& batch) {
    if (batch.size() == 0) throw std::invalid_argument("empty batch");
    if (batch.features.cols() != model.dim())
        throw std::invalid_argument("batch dimension does not match model");
    for (std::uint32_t y : batch.labels)
        if (y >= model.num_classes()) throw std::invalid_argument("batch label out of range");
}

}  // namespace

double linear_batch_loss(const LinearModel& model, const Batch& batch) {
    check_batch(model, batch);
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto lg = linear_logits(model, batch.features.row(i));
        total += log_sum_exp(lg) - lg[batch.labels[i]];
    }
    return total / static_cast<double>(batch.size());
}

LinearGradient linear_batch_gradients(const LinearModel& model, const Batch& batch) {
    check_batch(model, batch);
    const std::size_t k = model.num_classes();
    const std::size_t d = model.dim();
    LinearGradient out;
    out.d_weights = Matrix(k, d, 0.0);
    out.d_bias.assign(k, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto x = batch.features.row(i);
        const std::uint32_t label = batch.labels[i];
        const auto lg = linear_logits(model, x);
        const auto p = stable_softmax(lg);
        total += log_sum_exp(lg) - lg[label];
        for (std::size_t z = 0; z < k; ++z) {
            const double w = p[z] - (z == label ? 1.0 : 0.0);
            auto dst = out.d_weights.row(z);
            for (std::size_t j = 0; j < d; ++j) dst[j] += w * x[j];
            out.d_bias[z] += w;
        }
    }
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    out.loss = total * inv_b;
    for (double& g : out.d_weights.flat()) g *= inv_b;
    for (double& g : out.d_bias) g *= inv_b;
    return out;
}

LinearModel train_softmax(const FeatureDataset& ds, const TrainConfig& cfg,
                          SamplerKind sampler_kind, double weight_decay) {
    cfg.validate();
    ds.validate();
    if (weight_decay < 0.0) throw std::invalid_argument("weight decay must be nonnegative");

    LinearModel model;
    model.weights = Matrix(ds.num_classes, ds.dim(), 0.0);
    model.bias.assign(ds.num_classes, 0.0);

    BatchSampler sampler({sampler_kind, cfg.batch_size, cfg.seed}, ds);
    const std::size_t total_iterations =
        cfg.max_iterations ? *cfg.max_iterations : cfg.epochs * sampler.batches_per_epoch();

    Matrix vel_w(model.weights.rows(), model.weights.cols(), 0.0);
    std::vector<double> vel_b(ds.num_classes, 0.0);
    const double lr = cfg.lr_prototypes;

    for (std::size_t it = 1; it <= total_iterations; ++it) {
        const Batch batch = gather_batch(ds, sampler.next_batch());
        LinearGradient grad = linear_batch_gradients(model, batch);
        if (!std::isfinite(grad.loss))
            throw std::runtime_error("softmax training diverged: non-finite loss");
        if (weight_decay > 0.0) {
            auto gw = grad.d_weights.flat();
            auto w = model.weights.flat();
            for (std::size_t i = 0; i < w.size(); ++i) gw[i] += weight_decay * w[i];
        }
        auto vw = vel_w.flat();
        auto gw = grad.d_weights.flat();
        auto w = model.weights.flat();
        for (std::size_t i = 0; i < w.size(); ++i) {
            vw[i] = cfg.momentum * vw[i] + gw[i];
            w[i] -= lr * vw[i];
        }
        for (std::size_t y = 0; y < model.bias.size(); ++y) {
            vel_b[y] = cfg.momentum * vel_b[y] + grad.d_bias[y];
            model.bias[y] -= lr * vel_b[y];
        }
    }
    return model;
}

}  // namespace pltr
