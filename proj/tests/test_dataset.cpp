#include <doctest.h>

#include <cmath>
#include <fstream>

#include "pltr/dataset.hpp"
#include "test_util.hpp"

using namespace pltr;
using test_util::TempDir;
using test_util::make_dataset;

TEST_CASE("dataset: csv load counts classes") {
    TempDir dir;
    test_util::write_text(dir.file("a.csv"), "0.5,1.0,0\n-1.5,2.0,0\n3.0,4.0,1\n");
    const auto ds = load_features(dir.file("a.csv"), FileFormat::Csv);
    CHECK(ds.size() == 3);
    CHECK(ds.dim() == 2);
    CHECK(ds.num_classes == 2);
    const auto stats = compute_class_stats(ds);
    CHECK(stats.counts == std::vector<std::size_t>{2, 1});
    CHECK(ds.features(1, 0) == -1.5);
    CHECK(ds.labels[2] == 1);
}

TEST_CASE("dataset: csv header flag skips one line") {
    TempDir dir;
    test_util::write_text(dir.file("h.csv"), "x,y,label\n1,2,0\n3,4,1\n");
    CHECK_THROWS(load_features(dir.file("h.csv"), FileFormat::Csv));
    const auto ds = load_features(dir.file("h.csv"), FileFormat::Csv, false, true);
    CHECK(ds.size() == 2);
}

TEST_CASE("dataset: non-finite feature rejected") {
    TempDir dir;
    test_util::write_text(dir.file("bad.csv"), "1.0,nan,0\n");
    CHECK_THROWS_WITH_AS(load_features(dir.file("bad.csv"), FileFormat::Csv),
                         doctest::Contains("non-finite feature"), std::runtime_error);
}

TEST_CASE("dataset: csv dimension mismatch rejected") {
    TempDir dir;
    test_util::write_text(dir.file("dim.csv"), "1.0,2.0,0\n1.0,2.0,3.0,1\n");
    CHECK_THROWS_WITH_AS(load_features(dir.file("dim.csv"), FileFormat::Csv),
                         doctest::Contains("dimension mismatch"), std::runtime_error);
}

TEST_CASE("dataset: csv label gap needs remap") {
    TempDir dir;
    test_util::write_text(dir.file("gap.csv"), "1.0,0\n2.0,2\n");
    CHECK_THROWS(load_features(dir.file("gap.csv"), FileFormat::Csv));
    const auto ds = load_features(dir.file("gap.csv"), FileFormat::Csv, true);
    CHECK(ds.num_classes == 2);
    CHECK(ds.labels == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("dataset: truncated binary payload rejected") {
    TempDir dir;
    Matrix features(100, 16);
    for (std::size_t i = 0; i < features.size(); ++i) features.flat()[i] = double(i % 7);
    std::vector<std::uint32_t> labels(100, 0);
    labels[99] = 1;
    const auto ds = make_dataset(features, labels, 2);
    save_features(ds, dir.file("full.bin"), FileFormat::RawBinary);

    // drop one sample's worth of label bytes from the tail
    std::ifstream in(dir.file("full.bin"), std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out(dir.file("cut.bin"), std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 4));
    out.close();
    CHECK_THROWS_WITH_AS(load_features(dir.file("cut.bin"), FileFormat::RawBinary),
                         doctest::Contains("truncated payload"), std::runtime_error);
}

TEST_CASE("dataset: binary round trip is exact for f32 values") {
    TempDir dir;
    Matrix features(5, 3);
    for (std::size_t i = 0; i < features.size(); ++i)
        features.flat()[i] = static_cast<double>(static_cast<float>(0.25 * double(i) - 1.5));
    const auto ds = make_dataset(features, {0, 1, 2, 1, 0}, 3);
    save_features(ds, dir.file("rt.bin"), FileFormat::RawBinary);
    const auto back = load_features(dir.file("rt.bin"), FileFormat::RawBinary);
    CHECK(back.features == ds.features);
    CHECK(back.labels == ds.labels);
    CHECK(back.num_classes == 3);
}

TEST_CASE("dataset: csv round trip preserves doubles") {
    TempDir dir;
    std::mt19937_64 rng(11);
    const auto features = test_util::random_matrix(7, 4, rng);
    const auto ds = make_dataset(features, {0, 0, 1, 1, 2, 2, 2}, 3);
    save_features(ds, dir.file("rt.csv"), FileFormat::Csv);
    const auto back = load_features(dir.file("rt.csv"), FileFormat::Csv);
    CHECK(back.features == ds.features);
    CHECK(back.labels == ds.labels);
}

TEST_CASE("dataset: binary label out of range rejected") {
    TempDir dir;
    const auto ds = make_dataset(Matrix(2, 2, 1.0), {0, 1}, 2);
    save_features(ds, dir.file("lab.bin"), FileFormat::RawBinary);
    // patch the last label (final 4 bytes) to 9
    std::fstream f(dir.file("lab.bin"), std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-4, std::ios::end);
    const char nine[4] = {9, 0, 0, 0};
    f.write(nine, 4);
    f.close();
    CHECK_THROWS_WITH_AS(load_features(dir.file("lab.bin"), FileFormat::RawBinary),
                         doctest::Contains("label out of range"), std::runtime_error);
}

TEST_CASE("dataset: class stats imbalance ratio") {
    SUBCASE("500 vs 5") {
        Matrix features(505, 1, 0.0);
        std::vector<std::uint32_t> labels(505, 0);
        for (std::size_t i = 500; i < 505; ++i) labels[i] = 1;
        const auto stats = compute_class_stats(make_dataset(features, labels, 2));
        CHECK(stats.imbalance_ratio == doctest::Approx(100.0));
    }
    SUBCASE("balanced") {
        const auto stats = compute_class_stats(make_dataset(Matrix(4, 1), {0, 0, 1, 1}, 2));
        CHECK(stats.imbalance_ratio == 1.0);
    }
    SUBCASE("zero-count class excluded") {
        Matrix features(15, 1);
        std::vector<std::uint32_t> labels(15, 0);
        for (std::size_t i = 10; i < 15; ++i) labels[i] = 2;
        const auto stats = compute_class_stats(make_dataset(features, labels, 3));
        CHECK(stats.counts == std::vector<std::size_t>{10, 0, 5});
        CHECK(stats.imbalance_ratio == doctest::Approx(2.0));
    }
}

TEST_CASE("dataset: centroids") {
    SUBCASE("two-point mean") {
        Matrix features(3, 2);
        features(0, 0) = 0.0; features(0, 1) = 0.0;
        features(1, 0) = 2.0; features(1, 1) = 0.0;
        features(2, 0) = 5.0; features(2, 1) = -1.0;
        const auto c = compute_centroids(make_dataset(features, {0, 0, 1}, 2));
        CHECK(c(0, 0) == 1.0);
        CHECK(c(0, 1) == 0.0);
        // single-sample class equals the sample
        CHECK(c(1, 0) == 5.0);
        CHECK(c(1, 1) == -1.0);
    }
    SUBCASE("matches double-loop oracle") {
        std::mt19937_64 rng(3);
        const std::size_t n = 15, d = 4, k = 3;
        const auto features = test_util::random_matrix(n, d, rng);
        std::vector<std::uint32_t> labels(n);
        for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::uint32_t>(i % k);
        const auto ds = make_dataset(features, labels, k);
        const auto c = compute_centroids(ds);

        for (std::size_t y = 0; y < k; ++y) {
            for (std::size_t j = 0; j < d; ++j) {
                double sum = 0.0;
                std::size_t count = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (labels[i] == y) {
                        sum += features(i, j);
                        ++count;
                    }
                }
                CHECK(c(y, j) == doctest::Approx(sum / double(count)).epsilon(1e-12));
            }
        }
    }
    SUBCASE("empty class rejected") {
        CHECK_THROWS_WITH_AS(compute_centroids(make_dataset(Matrix(2, 1), {0, 2}, 3)),
                             doctest::Contains("class 1"), std::runtime_error);
    }
}

TEST_CASE("dataset: class splits at the boundaries") {
    ClassStats stats;
    stats.counts = {100, 19, 20, 99, 1000};
    const auto splits = split_classes(stats);
    CHECK(splits[0] == ClassSplit::Many);
    CHECK(splits[1] == ClassSplit::Few);
    CHECK(splits[2] == ClassSplit::Med);
    CHECK(splits[3] == ClassSplit::Med);
    CHECK(splits[4] == ClassSplit::Many);
    // group counts always cover every class
    std::size_t covered = 0;
    for (auto s : splits)
        covered += (s == ClassSplit::Many) + (s == ClassSplit::Med) + (s == ClassSplit::Few);
    CHECK(covered == stats.counts.size());
}

TEST_CASE("dataset: long-tailed class sizes") {
    CHECK(longtailed_class_sizes(2, 100, 100.0) == std::vector<std::size_t>{100, 1});
    CHECK(longtailed_class_sizes(3, 50, 1.0) == std::vector<std::size_t>{50, 50, 50});
    const auto sizes = longtailed_class_sizes(10, 500, 100.0);
    CHECK(sizes.front() == 500);
    CHECK(sizes.back() == 5);
    for (std::size_t y = 1; y < sizes.size(); ++y) CHECK(sizes[y] <= sizes[y - 1]);
    CHECK_THROWS(longtailed_class_sizes(2, 1, 100.0));  // tail size rounds to 0
}

TEST_CASE("dataset: synthetic generation is deterministic and well formed") {
    SynthSpec spec;
    spec.num_classes = 5;
    spec.dim = 3;
    spec.n_max = 40;
    spec.imbalance_ratio = 10.0;
    spec.test_per_class = 7;
    spec.seed = 99;

    const auto a = synth_longtailed(spec);
    const auto b = synth_longtailed(spec);
    CHECK(a.train.features == b.train.features);
    CHECK(a.train.labels == b.train.labels);
    CHECK(a.test.features == b.test.features);

    const auto sizes = longtailed_class_sizes(spec.num_classes, spec.n_max, spec.imbalance_ratio);
    const auto stats = compute_class_stats(a.train);
    CHECK(stats.counts == sizes);
    const auto test_stats = compute_class_stats(a.test);
    for (std::size_t y = 0; y < spec.num_classes; ++y) CHECK(test_stats.counts[y] == 7);

    SynthSpec other = spec;
    other.seed = 100;
    CHECK(synth_longtailed(other).train.features != a.train.features);
}
