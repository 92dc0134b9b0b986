#include "pltr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace pltr {

namespace {

// Ranks 1..n with ties sharing the average rank.
std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

std::optional<double> spearman_rank_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("rank correlation needs two equal-length series");
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double mean = (n + 1.0) / 2.0;
    double va = 0.0, vb = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = ra[i] - mean;
        const double db = rb[i] - mean;
        va += da * da;
        vb += db * db;
        cov += da * db;
    }
    if (va == 0.0 || vb == 0.0) return std::nullopt;
    return cov / std::sqrt(va * vb);
}

NormReport norm_report(const Matrix& vectors, const ClassStats& stats) {
    if (vectors.rows() < 2) throw std::invalid_argument("norm report needs at least two classes");
    if (vectors.rows() != stats.counts.size())
        throw std::invalid_argument("class stats do not match the parameter matrix");

    NormReport report;
    report.norms.reserve(vectors.rows());
    for (std::size_t y = 0; y < vectors.rows(); ++y) report.norms.push_back(l2_norm(vectors.row(y)));

    const double n = static_cast<double>(report.norms.size());
    const double mean = std::accumulate(report.norms.begin(), report.norms.end(), 0.0) / n;
    double var = 0.0;
    for (double x : report.norms) var += (x - mean) * (x - mean);
    const double std_dev = std::sqrt(var / n);
    report.coefficient_of_variation = mean != 0.0 ? std_dev / mean : 0.0;

    std::vector<double> sizes(stats.counts.size());
    std::transform(stats.counts.begin(), stats.counts.end(), sizes.begin(),
                   [](std::size_t c) { return static_cast<double>(c); });
    const auto rho = spearman_rank_correlation(report.norms, sizes);
    report.spearman = rho.value_or(0.0);
    report.spearman_tied = !rho.has_value();
    return report;
}

std::vector<HeadTailGroup> head_tail_groups(const ClassStats& stats, SplitThresholds th) {
    const auto splits = split_classes(stats, th);
    std::vector<HeadTailGroup> groups(splits.size());
    for (std::size_t y = 0; y < splits.size(); ++y) {
        switch (splits[y]) {
            case ClassSplit::Many: groups[y] = HeadTailGroup::Head; break;
            case ClassSplit::Few: groups[y] = HeadTailGroup::Tail; break;
            case ClassSplit::Med: groups[y] = HeadTailGroup::Neither; break;
        }
    }
    return groups;
}

SeparationReport separation_report(const Matrix& prototypes,
                                   const std::vector<HeadTailGroup>& groups) {
    if (prototypes.rows() != groups.size())
        throw std::invalid_argument("group labels do not match the prototype matrix");

    struct Acc {
        double dist_sum = 0.0;
        double cos_sum = 0.0;
        std::size_t pairs = 0;
        std::size_t cos_pairs = 0;
        void add(double dist, std::optional<double> cos) {
            dist_sum += dist;
            ++pairs;
            if (cos) {
                cos_sum += *cos;
                ++cos_pairs;
            }
        }
        SeparationStats finish() const {
            SeparationStats s;
            s.pair_count = pairs;
            if (pairs > 0) s.mean_distance = dist_sum / static_cast<double>(pairs);
            if (cos_pairs > 0) s.mean_cosine = cos_sum / static_cast<double>(cos_pairs);
            return s;
        }
    };
    Acc all, hh, ht, tt;

    std::vector<double> diff(prototypes.cols());
    for (std::size_t i = 0; i < prototypes.rows(); ++i) {
        for (std::size_t j = i + 1; j < prototypes.rows(); ++j) {
            auto a = prototypes.row(i);
            auto b = prototypes.row(j);
            for (std::size_t t = 0; t < diff.size(); ++t) diff[t] = a[t] - b[t];
            const double dist = l2_norm(diff);
            const double na = l2_norm(a);
            const double nb = l2_norm(b);
            std::optional<double> cos;
            if (na > 0.0 && nb > 0.0) cos = dot(a, b) / (na * nb);

            all.add(dist, cos);
            const bool i_head = groups[i] == HeadTailGroup::Head;
            const bool j_head = groups[j] == HeadTailGroup::Head;
            const bool i_tail = groups[i] == HeadTailGroup::Tail;
            const bool j_tail = groups[j] == HeadTailGroup::Tail;
            if (i_head && j_head) hh.add(dist, cos);
            if ((i_head && j_tail) || (i_tail && j_head)) ht.add(dist, cos);
            if (i_tail && j_tail) tt.add(dist, cos);
        }
    }

    SeparationReport report;
    report.all = all.finish();
    report.head_head = hh.finish();
    report.head_tail = ht.finish();
    report.tail_tail = tt.finish();
    return report;
}

void write_norms_csv(const NormReport& report, const ClassStats& stats,
                     const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out.precision(17);
    out << "class,count,norm\n";
    for (std::size_t y = 0; y < report.norms.size(); ++y)
        out << y << ',' << stats.counts[y] << ',' << report.norms[y] << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace pltr
