#include "pltr/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pltr {

LogitAdjustment LogitAdjustment::from_stats(double tau, const ClassStats& stats) {
    LogitAdjustment adj;
    adj.tau = tau;
    adj.log_counts.reserve(stats.counts.size());
    for (std::size_t y = 0; y < stats.counts.size(); ++y) {
        if (stats.counts[y] == 0)
            throw std::invalid_argument("logit adjustment requires every class count >= 1 (class " +
                                        std::to_string(y) + " is empty)");
        adj.log_counts.push_back(std::log(static_cast<double>(stats.counts[y])));
    }
    return adj;
}

void PrototypeModel::check() const {
    if (prototypes.rows() == 0 || prototypes.cols() == 0)
        throw std::invalid_argument("model has no prototypes");
    if (!all_finite(prototypes.flat()))
        throw std::invalid_argument("non-finite prototype");
    if (temps.active() && kind != DistanceKind::Euclidean)
        throw std::invalid_argument("temperatures combine only with euclidean distance");
    temps.check(num_classes(), dim());
}

PrototypeModel init_ncm(const Matrix& centroids, DistanceKind kind,
                        TemperatureScheme::Kind temp_kind) {
    PrototypeModel model;
    model.prototypes = centroids;
    model.kind = kind;
    switch (temp_kind) {
        case TemperatureScheme::Kind::None: model.temps = TemperatureScheme::none(); break;
        case TemperatureScheme::Kind::Channel:
            model.temps = TemperatureScheme::channel(centroids.cols());
            break;
        case TemperatureScheme::Kind::Class:
            model.temps = TemperatureScheme::per_class(centroids.rows());
            break;
        case TemperatureScheme::Kind::Dense:
            model.temps = TemperatureScheme::dense(centroids.rows(), centroids.cols());
            break;
    }
    model.check();
    return model;
}

std::vector<double> logits(const PrototypeModel& model, std::span<const double> x,
                           const LogitAdjustment* adjust) {
    const std::size_t k = model.num_classes();
    if (adjust && adjust->log_counts.size() != k)
        throw std::invalid_argument("adjustment class count does not match model");
    std::vector<double> out(k);
    for (std::size_t y = 0; y < k; ++y) {
        out[y] = -0.5 * distance(x, model.prototypes.row(y), y, model.kind, model.temps);
        if (adjust) out[y] += adjust->tau * adjust->log_counts[y];
    }
    return out;
}

std::vector<double> posterior(const PrototypeModel& model, std::span<const double> x,
                              const LogitAdjustment* adjust) {
    return stable_softmax(logits(model, x, adjust));
}

std::size_t predict(const PrototypeModel& model, std::span<const double> x) {
    std::size_t best = 0;
    double best_dist = distance(x, model.prototypes.row(0), 0, model.kind, model.temps);
    for (std::size_t y = 1; y < model.num_classes(); ++y) {
        const double d = distance(x, model.prototypes.row(y), y, model.kind, model.temps);
        if (d < best_dist) {
            best = y;
            best_dist = d;
        }
    }
    return best;
}

LinearEquivalent as_linear_equivalent(const PrototypeModel& model) {
    if (model.kind != DistanceKind::SquaredEuclidean || model.temps.active())
        throw std::invalid_argument(
            "linear equivalence requires squared euclidean distance without temperatures");
    LinearEquivalent lin;
    lin.weights = model.prototypes;
    lin.bias.resize(model.num_classes());
    for (std::size_t y = 0; y < model.num_classes(); ++y) {
        auto c = model.prototypes.row(y);
        lin.bias[y] = -0.5 * dot(c, c);
    }
    return lin;
}

}  // namespace pltr
