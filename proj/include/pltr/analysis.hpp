#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "pltr/dataset.hpp"

namespace pltr {

// Per-class L2 norms of a K x d parameter matrix plus dispersion and
// rank correlation against the class sizes.
struct NormReport {
    std::vector<double> norms;
    double coefficient_of_variation = 0.0;  // population std / mean
    double spearman = 0.0;                  // 0 with the tie flag when ranks degenerate
    bool spearman_tied = false;
};

NormReport norm_report(const Matrix& vectors, const ClassStats& stats);

// Spearman rank correlation with average ranks on ties. Returns nullopt when
// either side has all-equal ranks.
std::optional<double> spearman_rank_correlation(std::span<const double> a, std::span<const double> b);

enum class HeadTailGroup { Head, Tail, Neither };

// Many classes are Head, Few are Tail; Med classes join only the All group.
std::vector<HeadTailGroup> head_tail_groups(const ClassStats& stats, SplitThresholds th = {});

struct SeparationStats {
    std::optional<double> mean_distance;  // unset when the group has no pairs
    std::optional<double> mean_cosine;    // unset when no pair has two nonzero vectors
    std::size_t pair_count = 0;
};

// Means over unordered distinct prototype pairs for All-All, Head-Head,
// Head-Tail and Tail-Tail.
struct SeparationReport {
    SeparationStats all;
    SeparationStats head_head;
    SeparationStats head_tail;
    SeparationStats tail_tail;
};

SeparationReport separation_report(const Matrix& prototypes,
                                   const std::vector<HeadTailGroup>& groups);

// norms.csv: class,count,norm
void write_norms_csv(const NormReport& report, const ClassStats& stats,
                     const std::filesystem::path& path);

}  // namespace pltr
