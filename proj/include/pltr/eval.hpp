#pragma once

#include <functional>
#include <optional>
#include <string>

#include "pltr/dataset.hpp"

namespace pltr {

// Micro-averaged top-1 accuracy per class-frequency split. Splits come from
// the TRAINING-set counts; a test sample belongs to its true class's split.
// Empty splits report no accuracy rather than zero.
struct SplitAccuracy {
    std::optional<double> many;
    std::optional<double> med;
    std::optional<double> few;
    double all = 0.0;
    std::size_t many_count = 0;
    std::size_t med_count = 0;
    std::size_t few_count = 0;
    std::size_t total = 0;
};

using PredictFn = std::function<std::size_t(std::span<const double>)>;

SplitAccuracy evaluate(const PredictFn& predict, const FeatureDataset& test,
                       const ClassStats& train_stats, SplitThresholds th = {});

// {"many": .., "med": .., "few": .., "all": .., "counts": {..}} with null
// for undefined splits.
std::string split_accuracy_json(const SplitAccuracy& acc);

}  // namespace pltr
