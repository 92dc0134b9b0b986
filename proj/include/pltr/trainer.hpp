#pragma once

#include <filesystem>
#include <optional>

#include "pltr/analysis.hpp"
#include "pltr/loss.hpp"
#include "pltr/sampler.hpp"

namespace pltr {

struct TrainConfig {
    double lr_prototypes = 4.0;
    double lr_temps = 0.005;
    double momentum = 0.9;
    double tau = 0.25;
    std::size_t epochs = 1;
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;
    double d_eps = kDistanceEps;
    double t_floor = kTemperatureFloor;
    std::size_t trace_every = 10;
    SamplerKind sampler = SamplerKind::ClassBalanced;
    SplitThresholds split_thresholds;
    // Caps the number of iterations when set; 0 returns the initial model.
    std::optional<std::size_t> max_iterations;

    void validate() const;
};

struct TraceRecord {
    std::size_t iteration = 0;
    double loss = 0.0;
    std::vector<double> prototype_norms;
    SeparationReport separation;
};

struct TrainTrace {
    std::vector<TraceRecord> records;
};

// trace CSV: iteration,loss,group,mean_dist,mean_cos with one row per pair
// group per record; undefined statistics stay empty.
void write_trace_csv(const TrainTrace& trace, const std::filesystem::path& path);

struct TrainResult {
    PrototypeModel model;
    TrainTrace trace;
};

// Momentum SGD on prototypes and temperatures: init c_y at the centroids and
// T at 1, then per batch v <- momentum*v + grad, param <- param - lr*v, with
// temperatures clamped to t_floor after every step. The record at iteration 0
// reports the mean loss over the whole training set under the initial model;
// later records report the mean loss of their batch.
TrainResult train(const FeatureDataset& ds, const Matrix& centroids, const TrainConfig& cfg,
                  TemperatureScheme::Kind temp_kind, DistanceKind kind);

struct Velocities {
    Matrix prototypes;
    Matrix temps;
};

// One iteration of the loop above; returns the batch loss before the update.
double train_step(PrototypeModel& model, Velocities& velocities, const Batch& batch,
                  const LogitAdjustment* adjust, const TrainConfig& cfg);

}  // namespace pltr
