#include "pltr/trainer.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pltr {

void TrainConfig::validate() const {
    if (!(lr_prototypes > 0.0) || !(lr_temps > 0.0))
        throw std::invalid_argument("learning rates must be positive");
    if (momentum < 0.0 || momentum >= 1.0)
        throw std::invalid_argument("momentum must be in [0, 1)");
    if (tau < 0.0) throw std::invalid_argument("tau must be nonnegative");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
    if (!(d_eps > 0.0) || !(t_floor > 0.0))
        throw std::invalid_argument("clamping constants must be positive");
    if (trace_every < 1) throw std::invalid_argument("trace_every must be >= 1");
}

double train_step(PrototypeModel& model, Velocities& velocities, const Batch& batch,
                  const LogitAdjustment* adjust, const TrainConfig& cfg) {
    const GradientBundle bundle = batch_gradients(model, batch, adjust, cfg.d_eps);
    if (!std::isfinite(bundle.loss))
        throw std::runtime_error("training diverged: non-finite loss " + std::to_string(bundle.loss));

    auto vp = velocities.prototypes.flat();
    auto gp = bundle.d_prototypes.flat();
    auto cp = model.prototypes.flat();
    for (std::size_t i = 0; i < cp.size(); ++i) {
        vp[i] = cfg.momentum * vp[i] + gp[i];
        cp[i] -= cfg.lr_prototypes * vp[i];
    }
    if (model.temps.active()) {
        auto vt = velocities.temps.flat();
        auto gt = bundle.d_temps.flat();
        auto tp = model.temps.values.flat();
        for (std::size_t i = 0; i < tp.size(); ++i) {
            vt[i] = cfg.momentum * vt[i] + gt[i];
            tp[i] -= cfg.lr_temps * vt[i];
        }
        model.temps.clamp_floor(cfg.t_floor);
    }
    return bundle.loss;
}

namespace {

TraceRecord make_record(std::size_t iteration, double loss, const PrototypeModel& model,
                        const std::vector<HeadTailGroup>& groups) {
    TraceRecord rec;
    rec.iteration = iteration;
    rec.loss = loss;
    rec.prototype_norms.reserve(model.num_classes());
    for (std::size_t y = 0; y < model.num_classes(); ++y)
        rec.prototype_norms.push_back(l2_norm(model.prototypes.row(y)));
    rec.separation = separation_report(model.prototypes, groups);
    return rec;
}

Batch whole_dataset_batch(const FeatureDataset& ds) {
    std::vector<std::uint32_t> indices(ds.size());
    std::iota(indices.begin(), indices.end(), 0u);
    return gather_batch(ds, indices);
}

}  // namespace

TrainResult train(const FeatureDataset& ds, const Matrix& centroids, const TrainConfig& cfg,
                  TemperatureScheme::Kind temp_kind, DistanceKind kind) {
    cfg.validate();
    ds.validate();
    if (centroids.rows() != ds.num_classes || centroids.cols() != ds.dim())
        throw std::invalid_argument("centroid matrix does not match the dataset");
    if (ds.num_classes < 2) throw std::invalid_argument("training needs at least two classes");

    TrainResult result;
    result.model = init_ncm(centroids, kind, temp_kind);
    PrototypeModel& model = result.model;

    const ClassStats stats = compute_class_stats(ds);
    const LogitAdjustment adjust = LogitAdjustment::from_stats(cfg.tau, stats);
    const auto groups = head_tail_groups(stats, cfg.split_thresholds);

    BatchSampler sampler({cfg.sampler, cfg.batch_size, cfg.seed}, ds);
    const std::size_t total_iterations =
        cfg.max_iterations ? *cfg.max_iterations : cfg.epochs * sampler.batches_per_epoch();

    Velocities velocities;
    velocities.prototypes = Matrix(model.prototypes.rows(), model.prototypes.cols(), 0.0);
    if (model.temps.active())
        velocities.temps = Matrix(model.temps.values.rows(), model.temps.values.cols(), 0.0);

    const double initial_loss = batch_loss(model, whole_dataset_batch(ds), &adjust);
    result.trace.records.push_back(make_record(0, initial_loss, model, groups));

    for (std::size_t it = 1; it <= total_iterations; ++it) {
        const Batch batch = gather_batch(ds, sampler.next_batch());
        const double loss = train_step(model, velocities, batch, &adjust, cfg);
        if (it % cfg.trace_every == 0 || it == total_iterations)
            result.trace.records.push_back(make_record(it, loss, model, groups));
    }
    return result;
}

void write_trace_csv(const TrainTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out.precision(17);
    out << "iteration,loss,group,mean_dist,mean_cos\n";
    auto emit = [&](const TraceRecord& rec, const char* group, const SeparationStats& s) {
        out << rec.iteration << ',' << rec.loss << ',' << group << ',';
        if (s.mean_distance) out << *s.mean_distance;
        out << ',';
        if (s.mean_cosine) out << *s.mean_cosine;
        out << '\n';
    };
    for (const TraceRecord& rec : trace.records) {
        emit(rec, "all", rec.separation.all);
        emit(rec, "head_head", rec.separation.head_head);
        emit(rec, "head_tail", rec.separation.head_tail);
        emit(rec, "tail_tail", rec.separation.tail_tail);
    }
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace pltr
