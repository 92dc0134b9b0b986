#pragma once

#include "pltr/loss.hpp"
#include "pltr/sampler.hpp"
#include "pltr/trainer.hpp"

namespace pltr {

// Linear softmax classifier over the same fixed features; used to reproduce
// the class-size/classifier-norm correlation and as the accuracy baseline.
struct LinearModel {
    Matrix weights;  // K x d
    std::vector<double> bias;

    std::size_t num_classes() const { return weights.rows(); }
    std::size_t dim() const { return weights.cols(); }
};

std::vector<double> linear_logits(const LinearModel& model, std::span<const double> x);
std::vector<double> linear_posterior(const LinearModel& model, std::span<const double> x);

// argmax of Wx + b, ties broken by lowest class index.
std::size_t predict_linear(const LinearModel& model, std::span<const double> x);

double linear_batch_loss(const LinearModel& model, const Batch& batch);

struct LinearGradient {
    Matrix d_weights;
    std::vector<double> d_bias;
    double loss = 0.0;
};

LinearGradient linear_batch_gradients(const LinearModel& model, const Batch& batch);

// Momentum SGD from zero init minimizing mean cross-entropy. Uses
// cfg.lr_prototypes as the learning rate for both weights and bias;
// instance-balanced sampling by default.
LinearModel train_softmax(const FeatureDataset& ds, const TrainConfig& cfg,
                          SamplerKind sampler_kind = SamplerKind::InstanceBalanced,
                          double weight_decay = 0.0);

}  // namespace pltr
