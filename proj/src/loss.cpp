#include "pltr/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pltr {

Batch gather_batch(const FeatureDataset& ds, std::span<const std::uint32_t> indices) {
    Batch batch;
    batch.features = Matrix(indices.size(), ds.dim());
    batch.labels.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        auto src = ds.features.row(indices[i]);
        std::copy(src.begin(), src.end(), batch.features.row(i).begin());
        batch.labels.push_back(ds.labels[indices[i]]);
    }
    return batch;
}

namespace {

void check_batch(const PrototypeModel& model, const Batch& batch) {
    if (batch.size() == 0) throw std::invalid_argument("empty batch");
    if (batch.features.cols() != model.dim())
        throw std::invalid_argument("batch dimension does not match model");
    for (std::uint32_t y : batch.labels)
        if (y >= model.num_classes()) throw std::invalid_argument("batch label out of range");
}

}  // namespace

double batch_loss(const PrototypeModel& model, const Batch& batch, const LogitAdjustment* adjust) {
    check_batch(model, batch);
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto lg = logits(model, batch.features.row(i), adjust);
        total += log_sum_exp(lg) - lg[batch.labels[i]];
    }
    return total / static_cast<double>(batch.size());
}

GradientBundle batch_gradients(const PrototypeModel& model, const Batch& batch,
                               const LogitAdjustment* adjust, double d_eps) {
    check_batch(model, batch);
    const std::size_t k = model.num_classes();
    const std::size_t d = model.dim();

    GradientBundle out;
    out.batch_size = batch.size();
    out.d_prototypes = Matrix(k, d, 0.0);
    if (model.temps.active())
        out.d_temps = Matrix(model.temps.values.rows(), model.temps.values.cols(), 0.0);

    std::vector<double> grad_c(d);
    Matrix grad_t;
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto x = batch.features.row(i);
        const std::uint32_t label = batch.labels[i];
        const auto lg = logits(model, x, adjust);
        const auto p = stable_softmax(lg);
        total += log_sum_exp(lg) - lg[label];

        for (std::size_t z = 0; z < k; ++z) {
            // dL/dlogit_z = p_z - [z == y]; logit_z = -1/2 dist_z + const.
            const double w = -0.5 * (p[z] - (z == label ? 1.0 : 0.0));
            const auto c = model.prototypes.row(z);
            distance_grad_prototype(x, c, z, model.kind, model.temps, grad_c, d_eps);
            auto dst = out.d_prototypes.row(z);
            for (std::size_t j = 0; j < d; ++j) dst[j] += w * grad_c[j];
            if (model.temps.active()) {
                distance_grad_temps(x, c, z, model.temps, grad_t, d_eps);
                auto acc = out.d_temps.flat();
                auto src = grad_t.flat();
                for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += w * src[j];
            }
        }
    }
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    out.loss = total * inv_b;
    for (double& g : out.d_prototypes.flat()) g *= inv_b;
    for (double& g : out.d_temps.flat()) g *= inv_b;
    return out;
}

FdReport fd_check(const PrototypeModel& model, const Batch& batch, const LogitAdjustment* adjust,
                  double h, double tol) {
    if (!(h > 0.0 && h <= 1e-3)) throw std::invalid_argument("finite-difference step must be in (0, 1e-3]");
    const GradientBundle analytic = batch_gradients(model, batch, adjust);

    auto rel_error = [](double a, double n) {
        return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-4});
    };
    auto central = [&](PrototypeModel& m, double& param) {
        const double saved = param;
        param = saved + h;
        const double up = batch_loss(m, batch, adjust);
        param = saved - h;
        const double down = batch_loss(m, batch, adjust);
        param = saved;
        return (up - down) / (2.0 * h);
    };

    FdReport report;
    report.tol = tol;

    PrototypeModel probe = model;
    double worst = 0.0;
    for (std::size_t i = 0; i < probe.prototypes.size(); ++i) {
        const double numeric = central(probe, probe.prototypes.flat()[i]);
        worst = std::max(worst, rel_error(analytic.d_prototypes.flat()[i], numeric));
    }
    report.groups.push_back({"prototypes", worst});

    if (model.temps.active()) {
        worst = 0.0;
        for (std::size_t i = 0; i < probe.temps.values.size(); ++i) {
            const double numeric = central(probe, probe.temps.values.flat()[i]);
            worst = std::max(worst, rel_error(analytic.d_temps.flat()[i], numeric));
        }
        report.groups.push_back({"temperatures", worst});
    }

    report.passed = std::all_of(report.groups.begin(), report.groups.end(),
                                [&](const FdGroupReport& g) { return g.max_rel_error < tol; });
    return report;
}

}  // namespace pltr
