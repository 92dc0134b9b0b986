#include "pltr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace pltr {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error(msg);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

double parse_double(std::string_view tok, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        fail("malformed row " + std::to_string(line_no) + ": bad value '" + std::string(tok) + "'");
    if (!std::isfinite(v))
        fail("non-finite feature at row " + std::to_string(line_no));
    return v;
}

std::uint32_t parse_label(std::string_view tok, std::size_t line_no) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        fail("malformed row " + std::to_string(line_no) + ": bad label '" + std::string(tok) + "'");
    if (v < 0 || v > 0xFFFFFFFFll)
        fail("label out of range at row " + std::to_string(line_no));
    return static_cast<std::uint32_t>(v);
}

// Rejects empty classes, or compacts the label space when remap is set.
void check_or_remap(FeatureDataset& ds, bool remap) {
    std::vector<std::size_t> counts(ds.num_classes, 0);
    for (std::uint32_t y : ds.labels) ++counts[y];
    std::vector<std::uint32_t> mapping(ds.num_classes);
    std::uint32_t next = 0;
    bool has_gap = false;
    for (std::size_t y = 0; y < counts.size(); ++y) {
        if (counts[y] == 0) {
            has_gap = true;
        } else {
            mapping[y] = next++;
        }
    }
    if (!has_gap) return;
    if (!remap)
        fail("class with no samples in label range [0, " + std::to_string(ds.num_classes) +
             "); pass remap to compact labels");
    for (std::uint32_t& y : ds.labels) y = mapping[y];
    ds.num_classes = next;
}

FeatureDataset load_csv(const std::filesystem::path& path, bool remap, bool skip_header) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path.string() + "'");
    std::string line;
    std::size_t line_no = 0;
    if (skip_header && std::getline(in, line)) ++line_no;

    std::vector<double> values;
    std::vector<std::uint32_t> labels;
    std::size_t dim = 0;
    std::uint32_t max_label = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view row = trim(line);
        if (row.empty()) continue;
        std::vector<std::string_view> tokens;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = row.find(',', start);
            tokens.push_back(trim(row.substr(start, comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (tokens.size() < 2)
            fail("malformed row " + std::to_string(line_no) + ": need at least one feature and a label");
        if (dim == 0) {
            dim = tokens.size() - 1;
        } else if (tokens.size() - 1 != dim) {
            fail("dimension mismatch at row " + std::to_string(line_no) + ": expected " +
                 std::to_string(dim) + " features, got " + std::to_string(tokens.size() - 1));
        }
        for (std::size_t i = 0; i < dim; ++i) values.push_back(parse_double(tokens[i], line_no));
        std::uint32_t y = parse_label(tokens.back(), line_no);
        labels.push_back(y);
        max_label = std::max(max_label, y);
    }
    if (labels.empty()) fail("empty dataset '" + path.string() + "'");

    FeatureDataset ds;
    ds.num_classes = static_cast<std::size_t>(max_label) + 1;
    ds.labels = std::move(labels);
    ds.features = Matrix(ds.labels.size(), dim);
    std::copy(values.begin(), values.end(), ds.features.flat().begin());
    check_or_remap(ds, remap);
    ds.validate();
    return ds;
}

constexpr char kFeatureMagic[4] = {'P', 'L', 'T', 'R'};
constexpr std::uint32_t kFeatureVersion = 1;

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float read_f32(const unsigned char* p) {
    std::uint32_t bits = read_u32(p);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    return f;
}

void append_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xFF));
}

void append_f32(std::vector<unsigned char>& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    append_u32(out, bits);
}

FeatureDataset load_binary(const std::filesystem::path& path, bool remap) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open '" + path.string() + "'");
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    constexpr std::size_t header = 4 + 4 * 4;
    if (buf.size() < header) fail("truncated payload in '" + path.string() + "'");
    if (std::memcmp(buf.data(), kFeatureMagic, 4) != 0)
        fail("bad magic in '" + path.string() + "'");
    const std::uint32_t version = read_u32(buf.data() + 4);
    if (version != kFeatureVersion)
        fail("unsupported version " + std::to_string(version) + " in '" + path.string() + "'");
    const std::uint32_t n = read_u32(buf.data() + 8);
    const std::uint32_t d = read_u32(buf.data() + 12);
    const std::uint32_t k = read_u32(buf.data() + 16);
    if (n == 0 || d == 0 || k == 0) fail("empty dataset '" + path.string() + "'");

    const std::size_t expected = header + std::size_t(n) * d * 4 + std::size_t(n) * 4;
    if (buf.size() < expected) fail("truncated payload in '" + path.string() + "'");
    if (buf.size() > expected) fail("trailing bytes in '" + path.string() + "'");

    FeatureDataset ds;
    ds.num_classes = k;
    ds.features = Matrix(n, d);
    const unsigned char* p = buf.data() + header;
    for (std::size_t i = 0; i < std::size_t(n) * d; ++i, p += 4) {
        const double v = read_f32(p);
        if (!std::isfinite(v)) fail("non-finite feature in '" + path.string() + "'");
        ds.features.flat()[i] = v;
    }
    ds.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i, p += 4) {
        ds.labels[i] = read_u32(p);
        if (ds.labels[i] >= k)
            fail("label out of range in '" + path.string() + "': " + std::to_string(ds.labels[i]));
    }
    check_or_remap(ds, remap);
    ds.validate();
    return ds;
}

}  // namespace

void FeatureDataset::validate() const {
    if (labels.size() != features.rows())
        fail("label count " + std::to_string(labels.size()) + " does not match row count " +
             std::to_string(features.rows()));
    if (num_classes == 0) fail("dataset has no classes");
    for (std::uint32_t y : labels)
        if (y >= num_classes) fail("label out of range: " + std::to_string(y));
    if (!all_finite(features.flat())) fail("non-finite feature");
}

FeatureDataset load_features(const std::filesystem::path& path, FileFormat format,
                             bool remap_labels, bool skip_header) {
    return format == FileFormat::Csv ? load_csv(path, remap_labels, skip_header)
                                     : load_binary(path, remap_labels);
}

void save_features(const FeatureDataset& ds, const std::filesystem::path& path, FileFormat format) {
    ds.validate();
    if (format == FileFormat::Csv) {
        std::ofstream out(path);
        if (!out) fail("cannot write '" + path.string() + "'");
        out.precision(17);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            for (double v : ds.features.row(i)) out << v << ',';
            out << ds.labels[i] << '\n';
        }
        if (!out) fail("write failed for '" + path.string() + "'");
        return;
    }
    std::vector<unsigned char> buf;
    buf.reserve(4 + 16 + ds.features.size() * 4 + ds.size() * 4);
    buf.insert(buf.end(), kFeatureMagic, kFeatureMagic + 4);
    append_u32(buf, kFeatureVersion);
    append_u32(buf, static_cast<std::uint32_t>(ds.size()));
    append_u32(buf, static_cast<std::uint32_t>(ds.dim()));
    append_u32(buf, static_cast<std::uint32_t>(ds.num_classes));
    for (double v : ds.features.flat()) append_f32(buf, static_cast<float>(v));
    for (std::uint32_t y : ds.labels) append_u32(buf, y);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) fail("write failed for '" + path.string() + "'");
}

ClassStats compute_class_stats(const FeatureDataset& ds) {
    ClassStats stats;
    stats.counts.assign(ds.num_classes, 0);
    for (std::uint32_t y : ds.labels) ++stats.counts[y];
    std::size_t lo = 0, hi = 0;
    for (std::size_t c : stats.counts) {
        if (c == 0) continue;
        if (lo == 0 || c < lo) lo = c;
        if (c > hi) hi = c;
    }
    stats.imbalance_ratio = lo > 0 ? static_cast<double>(hi) / static_cast<double>(lo) : 1.0;
    return stats;
}

Matrix compute_centroids(const FeatureDataset& ds) {
    Matrix centroids(ds.num_classes, ds.dim(), 0.0);
    std::vector<std::size_t> counts(ds.num_classes, 0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::uint32_t y = ds.labels[i];
        auto row = centroids.row(y);
        auto feat = ds.features.row(i);
        for (std::size_t j = 0; j < ds.dim(); ++j) row[j] += feat[j];
        ++counts[y];
    }
    for (std::size_t y = 0; y < ds.num_classes; ++y) {
        if (counts[y] == 0)
            fail("class " + std::to_string(y) + " has no samples; centroid undefined");
        for (double& v : centroids.row(y)) v /= static_cast<double>(counts[y]);
    }
    return centroids;
}

std::vector<ClassSplit> split_classes(const ClassStats& stats, SplitThresholds th) {
    if (th.few_max == 0 || th.many_min <= th.few_max)
        throw std::invalid_argument("split thresholds require many_min > few_max > 0");
    std::vector<ClassSplit> out(stats.counts.size());
    for (std::size_t y = 0; y < stats.counts.size(); ++y) {
        if (stats.counts[y] >= th.many_min)
            out[y] = ClassSplit::Many;
        else if (stats.counts[y] < th.few_max)
            out[y] = ClassSplit::Few;
        else
            out[y] = ClassSplit::Med;
    }
    return out;
}

std::vector<std::size_t> longtailed_class_sizes(std::size_t num_classes, std::size_t n_max,
                                                double imbalance_ratio) {
    if (num_classes == 0) throw std::invalid_argument("need at least one class");
    if (imbalance_ratio < 1.0) throw std::invalid_argument("imbalance ratio must be >= 1");
    std::vector<std::size_t> sizes(num_classes);
    for (std::size_t y = 0; y < num_classes; ++y) {
        const double expo = num_classes > 1
                                ? -static_cast<double>(y) / static_cast<double>(num_classes - 1)
                                : 0.0;
        const double raw = static_cast<double>(n_max) * std::pow(imbalance_ratio, expo);
        const long long rounded = std::llround(raw);
        if (rounded < 1)
            fail("class " + std::to_string(y) + " size rounds to " + std::to_string(rounded));
        sizes[y] = static_cast<std::size_t>(rounded);
    }
    return sizes;
}

SynthResult synth_longtailed(const SynthSpec& spec) {
    if (spec.dim == 0) throw std::invalid_argument("dimension must be positive");
    if (spec.within_class_std < 0 || spec.class_mean_scale < 0)
        throw std::invalid_argument("scales must be nonnegative");
    if (spec.test_per_class == 0) throw std::invalid_argument("test_per_class must be positive");
    const auto sizes = longtailed_class_sizes(spec.num_classes, spec.n_max, spec.imbalance_ratio);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Matrix means(spec.num_classes, spec.dim);
    for (double& v : means.flat()) v = spec.class_mean_scale * gauss(rng);

    const std::size_t n_train = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    SynthResult out;
    out.train.num_classes = spec.num_classes;
    out.train.features = Matrix(n_train, spec.dim);
    out.train.labels.reserve(n_train);
    std::size_t row = 0;
    for (std::size_t y = 0; y < spec.num_classes; ++y) {
        for (std::size_t i = 0; i < sizes[y]; ++i, ++row) {
            auto dst = out.train.features.row(row);
            auto mu = means.row(y);
            for (std::size_t j = 0; j < spec.dim; ++j)
                dst[j] = mu[j] + spec.within_class_std * gauss(rng);
            out.train.labels.push_back(static_cast<std::uint32_t>(y));
        }
    }

    const std::size_t n_test = spec.num_classes * spec.test_per_class;
    out.test.num_classes = spec.num_classes;
    out.test.features = Matrix(n_test, spec.dim);
    out.test.labels.reserve(n_test);
    row = 0;
    for (std::size_t y = 0; y < spec.num_classes; ++y) {
        for (std::size_t i = 0; i < spec.test_per_class; ++i, ++row) {
            auto dst = out.test.features.row(row);
            auto mu = means.row(y);
            for (std::size_t j = 0; j < spec.dim; ++j)
                dst[j] = mu[j] + spec.within_class_std * gauss(rng);
            out.test.labels.push_back(static_cast<std::uint32_t>(y));
        }
    }
    return out;
}

}  // namespace pltr
