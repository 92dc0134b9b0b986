#include <doctest.h>

#include <cmath>
#include <random>

#include "pltr/eval.hpp"
#include "test_util.hpp"

using namespace pltr;
using test_util::make_dataset;

namespace {

// Test features encode their class in coordinate 0.
FeatureDataset labeled_by_coordinate(const std::vector<std::uint32_t>& labels, std::size_t k) {
    Matrix features(labels.size(), 1);
    for (std::size_t i = 0; i < labels.size(); ++i) features(i, 0) = double(labels[i]);
    return make_dataset(features, labels, k);
}

std::size_t read_class(std::span<const double> x) {
    return static_cast<std::size_t>(std::llround(x[0]));
}

ClassStats stats_from(std::vector<std::size_t> counts) {
    ClassStats stats;
    stats.counts = std::move(counts);
    return stats;
}

}  // namespace

TEST_CASE("eval: a perfect predictor scores one everywhere") {
    const auto test = labeled_by_coordinate({0, 0, 1, 1, 2, 2}, 3);
    const auto acc = evaluate(read_class, test, stats_from({500, 50, 5}));
    CHECK(acc.all == 1.0);
    CHECK(acc.many == 1.0);
    CHECK(acc.med == 1.0);
    CHECK(acc.few == 1.0);
    CHECK(acc.many_count == 2);
    CHECK(acc.med_count == 2);
    CHECK(acc.few_count == 2);
}

TEST_CASE("eval: a constant predictor on a balanced test scores 1/K") {
    std::vector<std::uint32_t> labels;
    for (std::uint32_t y = 0; y < 10; ++y)
        for (int i = 0; i < 10; ++i) labels.push_back(y);
    const auto test = labeled_by_coordinate(labels, 10);
    const auto acc = evaluate([](std::span<const double>) { return std::size_t{0}; }, test,
                              stats_from(std::vector<std::size_t>(10, 100)));
    CHECK(acc.all == doctest::Approx(0.1));
}

TEST_CASE("eval: hand-counted confusion case") {
    // 6 samples; predictor maps class 1 onto class 0, everything else exact.
    const auto test = labeled_by_coordinate({0, 0, 1, 1, 2, 2}, 3);
    const auto predictor = [](std::span<const double> x) {
        const auto y = read_class(x);
        return y == 1 ? std::size_t{0} : y;
    };
    const auto acc = evaluate(predictor, test, stats_from({200, 50, 10}));
    CHECK(acc.all == doctest::Approx(4.0 / 6.0));
    CHECK(*acc.many == 1.0);   // class 0 only
    CHECK(*acc.med == 0.0);    // class 1 only, fully confused
    CHECK(*acc.few == 1.0);    // class 2 only
}

TEST_CASE("eval: overall accuracy is the count-weighted split average") {
    std::mt19937_64 rng(55);
    std::vector<std::uint32_t> labels;
    for (std::uint32_t y = 0; y < 6; ++y)
        for (int i = 0; i < 9; ++i) labels.push_back(y);
    const auto test = labeled_by_coordinate(labels, 6);
    std::uniform_int_distribution<std::size_t> noisy(0, 5);
    const auto predictor = [&](std::span<const double> x) {
        return noisy(rng) == 0 ? std::size_t{0} : read_class(x);
    };
    const auto acc = evaluate(predictor, test, stats_from({300, 120, 90, 40, 12, 3}));
    double weighted = 0.0;
    if (acc.many) weighted += *acc.many * double(acc.many_count);
    if (acc.med) weighted += *acc.med * double(acc.med_count);
    if (acc.few) weighted += *acc.few * double(acc.few_count);
    CHECK(acc.all == doctest::Approx(weighted / double(acc.total)).epsilon(1e-12));
}

TEST_CASE("eval: micro equals macro on a balanced test set") {
    std::mt19937_64 rng(56);
    std::vector<std::uint32_t> labels;
    for (std::uint32_t y = 0; y < 5; ++y)
        for (int i = 0; i < 20; ++i) labels.push_back(y);
    const auto test = labeled_by_coordinate(labels, 5);
    std::uniform_int_distribution<std::size_t> noisy(0, 4);
    std::vector<std::size_t> predictions;
    for (std::size_t i = 0; i < labels.size(); ++i)
        predictions.push_back(noisy(rng) == 0 ? noisy(rng) : labels[i]);
    std::size_t cursor = 0;
    const auto predictor = [&](std::span<const double>) { return predictions[cursor++]; };
    const auto acc = evaluate(predictor, test, stats_from({300, 120, 90, 40, 12}));

    double macro = 0.0;
    for (std::uint32_t y = 0; y < 5; ++y) {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == y && predictions[i] == y) ++correct;
        macro += double(correct) / 20.0;
    }
    macro /= 5.0;
    CHECK(acc.all == doctest::Approx(macro).epsilon(1e-12));
}

TEST_CASE("eval: empty splits are undefined, not zero") {
    const auto test = labeled_by_coordinate({0, 1}, 2);
    const auto acc = evaluate(read_class, test, stats_from({500, 400}));
    CHECK(acc.many.has_value());
    CHECK_FALSE(acc.med.has_value());
    CHECK_FALSE(acc.few.has_value());
    const auto json = split_accuracy_json(acc);
    CHECK(json.find("\"few\":null") != std::string::npos);
}

TEST_CASE("eval: empty test set is rejected") {
    FeatureDataset empty;
    empty.features = Matrix(0, 1);
    empty.num_classes = 1;
    CHECK_THROWS(evaluate(read_class, empty, stats_from({10})));
}

TEST_CASE("eval: custom thresholds move the split boundaries") {
    const auto test = labeled_by_coordinate({0, 1, 2}, 3);
    SplitThresholds th;
    th.many_min = 50;
    th.few_max = 10;
    const auto acc = evaluate(read_class, test, stats_from({60, 20, 5}), th);
    CHECK(acc.many_count == 1);
    CHECK(acc.med_count == 1);
    CHECK(acc.few_count == 1);
}
