#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pltr/model.hpp"

namespace pltr {

struct Batch {
    Matrix features;                    // B x d
    std::vector<std::uint32_t> labels;  // B

    std::size_t size() const { return labels.size(); }
};

Batch gather_batch(const FeatureDataset& ds, std::span<const std::uint32_t> indices);

// Exact analytic gradients of the mean batch loss.
struct GradientBundle {
    Matrix d_prototypes;  // K x d
    Matrix d_temps;       // shape of temps.values; empty when scheme is None
    double loss = 0.0;
    std::size_t batch_size = 0;
};

// Mean over the batch of -log p(y_i | x_i) with adjusted training logits.
// With a null adjustment (or tau = 0) this is the plain NLL.
double batch_loss(const PrototypeModel& model, const Batch& batch,
                  const LogitAdjustment* adjust = nullptr);

GradientBundle batch_gradients(const PrototypeModel& model, const Batch& batch,
                               const LogitAdjustment* adjust = nullptr,
                               double d_eps = kDistanceEps);

// Central finite differences of batch_loss against batch_gradients.
// Relative error per entry is |a - n| / max(|a|, |n|, 1e-4).
struct FdGroupReport {
    std::string group;  // "prototypes" or "temperatures"
    double max_rel_error = 0.0;
};

struct FdReport {
    std::vector<FdGroupReport> groups;
    double tol = 0.0;
    bool passed = false;
};

FdReport fd_check(const PrototypeModel& model, const Batch& batch,
                  const LogitAdjustment* adjust = nullptr, double h = 1e-6, double tol = 1e-4);

}  // namespace pltr
