#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pltr/types.hpp"

namespace pltr {

// Fixed feature vectors with integer class labels in [0, num_classes).
struct FeatureDataset {
    Matrix features;                    // N x d
    std::vector<std::uint32_t> labels;  // N
    std::size_t num_classes = 0;

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return features.cols(); }

    // Throws std::runtime_error on any invariant violation.
    void validate() const;
};

struct ClassStats {
    std::vector<std::size_t> counts;  // samples per class
    double imbalance_ratio = 1.0;     // max/min over classes with count > 0

    std::size_t num_classes() const { return counts.size(); }
};

// Class-frequency split boundaries: Many >= many_min, Few < few_max.
struct SplitThresholds {
    std::size_t many_min = 100;
    std::size_t few_max = 20;
};

enum class ClassSplit { Many, Med, Few };

// Long-tailed Gaussian mixture: class sizes decay exponentially from n_max
// down to round(n_max / imbalance_ratio); the test set is balanced.
struct SynthSpec {
    std::size_t num_classes = 10;
    std::size_t dim = 16;
    std::size_t n_max = 500;
    double imbalance_ratio = 100.0;
    double class_mean_scale = 1.0;
    double within_class_std = 1.0;
    std::size_t test_per_class = 100;
    std::uint64_t seed = 0;
};

enum class FileFormat { Csv, RawBinary };

// CSV: d feature columns then an integer label per row, no header unless
// skip_header. Binary: magic "PLTR", u32 version=1, u32 N, u32 d, u32 K,
// N*d little-endian f32, N little-endian u32 labels.
//
// Classes with zero samples are rejected unless remap_labels compacts the
// label space to the classes actually present.
FeatureDataset load_features(const std::filesystem::path& path, FileFormat format,
                             bool remap_labels = false, bool skip_header = false);
void save_features(const FeatureDataset& ds, const std::filesystem::path& path, FileFormat format);

ClassStats compute_class_stats(const FeatureDataset& ds);

// Row y = mean of features with label y; accumulates in 64-bit.
// Throws if any class is empty.
Matrix compute_centroids(const FeatureDataset& ds);

std::vector<ClassSplit> split_classes(const ClassStats& stats, SplitThresholds th = {});

// N_y = round(n_max * beta^(-y/(K-1))). Throws if any size rounds below 1.
std::vector<std::size_t> longtailed_class_sizes(std::size_t num_classes, std::size_t n_max,
                                                double imbalance_ratio);

struct SynthResult {
    FeatureDataset train;
    FeatureDataset test;
};

SynthResult synth_longtailed(const SynthSpec& spec);

}  // namespace pltr
