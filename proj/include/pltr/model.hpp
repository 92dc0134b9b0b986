#pragma once

#include <span>
#include <vector>

#include "pltr/dataset.hpp"
#include "pltr/geometry.hpp"

namespace pltr {

// Additive tau * log N_y adjustment on training logits; never applied at
// inference.
struct LogitAdjustment {
    double tau = 0.0;
    std::vector<double> log_counts;

    static LogitAdjustment from_stats(double tau, const ClassStats& stats);
};

// Classifier scoring class y by the negative distance from the input to a
// learnable prototype row c_y.
struct PrototypeModel {
    Matrix prototypes;  // K x d
    TemperatureScheme temps;
    DistanceKind kind = DistanceKind::Euclidean;

    std::size_t num_classes() const { return prototypes.rows(); }
    std::size_t dim() const { return prototypes.cols(); }
    void check() const;
};

// Prototypes fixed at the empirical centroids, temperatures at 1.
PrototypeModel init_ncm(const Matrix& centroids, DistanceKind kind,
                        TemperatureScheme::Kind temp_kind = TemperatureScheme::Kind::None);

// logit_y = -1/2 * distance(x, c_y) [+ tau * log N_y when adjust is given].
std::vector<double> logits(const PrototypeModel& model, std::span<const double> x,
                           const LogitAdjustment* adjust = nullptr);

// Softmax of logits with max subtraction; sums to 1.
std::vector<double> posterior(const PrototypeModel& model, std::span<const double> x,
                              const LogitAdjustment* adjust = nullptr);

// argmin_y distance(x, c_y), ties broken by lowest class index. Unadjusted.
std::size_t predict(const PrototypeModel& model, std::span<const double> x);

// For squared Euclidean distance without temperatures the model is a linear
// softmax classifier with weight row c_y and bias -1/2 |c_y|^2.
struct LinearEquivalent {
    Matrix weights;  // K x d
    std::vector<double> bias;
};
LinearEquivalent as_linear_equivalent(const PrototypeModel& model);

}  // namespace pltr
