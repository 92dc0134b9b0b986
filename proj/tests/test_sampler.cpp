#include <doctest.h>

#include "pltr/sampler.hpp"
#include "test_util.hpp"

using namespace pltr;
using test_util::make_dataset;

TEST_CASE("sampler: class-balanced marginal is uniform under heavy imbalance") {
    // 999 samples of class 0, 1 of class 1
    Matrix features(1000, 1, 0.0);
    std::vector<std::uint32_t> labels(1000, 0);
    labels[999] = 1;
    const auto ds = make_dataset(features, labels, 2);

    BatchSampler sampler({SamplerKind::ClassBalanced, 100, 123}, ds);
    std::size_t tail_draws = 0;
    const std::size_t total = 10000;
    for (std::size_t i = 0; i < total / 100; ++i)
        for (auto idx : sampler.next_batch()) tail_draws += ds.labels[idx] == 1;

    const double freq = double(tail_draws) / double(total);
    CHECK(freq > 0.48);
    CHECK(freq < 0.52);

    // chi-square against the uniform marginal, 1 dof at alpha = 0.01
    const double expected = double(total) / 2.0;
    const double head = double(total - tail_draws);
    const double chi2 = (head - expected) * (head - expected) / expected +
                        (double(tail_draws) - expected) * (double(tail_draws) - expected) / expected;
    CHECK(chi2 < 6.6348966010212145);
}

TEST_CASE("sampler: single class draws only that class") {
    const auto ds = make_dataset(Matrix(5, 1, 0.0), {0, 0, 0, 0, 0}, 1);
    BatchSampler sampler({SamplerKind::ClassBalanced, 8, 5}, ds);
    for (auto idx : sampler.next_batch()) CHECK(ds.labels[idx] == 0);
}

TEST_CASE("sampler: identical seeds give identical sequences") {
    const auto ds = make_dataset(Matrix(50, 1, 0.0),
                                 std::vector<std::uint32_t>(50, 0), 1);
    for (auto kind : {SamplerKind::ClassBalanced, SamplerKind::InstanceBalanced}) {
        BatchSampler a({kind, 16, 777}, ds);
        BatchSampler b({kind, 16, 777}, ds);
        for (int i = 0; i < 5; ++i) CHECK(a.next_batch() == b.next_batch());
        BatchSampler c({kind, 16, 778}, ds);
        bool any_different = false;
        BatchSampler a2({kind, 16, 777}, ds);
        for (int i = 0; i < 5; ++i) any_different |= a2.next_batch() != c.next_batch();
        CHECK(any_different);
    }
}

TEST_CASE("sampler: class-balanced rejects an empty class") {
    const auto ds = make_dataset(Matrix(4, 1, 0.0), {0, 0, 2, 2}, 3);
    CHECK_THROWS_WITH_AS((BatchSampler({SamplerKind::ClassBalanced, 4, 0}, ds)),
                         doctest::Contains("class 1"), std::invalid_argument);
    // instance-balanced sampling does not care
    BatchSampler ok({SamplerKind::InstanceBalanced, 4, 0}, ds);
    for (auto idx : ok.next_batch()) CHECK(idx < 4);
}

TEST_CASE("sampler: epoch length is ceil(N / batch)") {
    const auto ds = make_dataset(Matrix(10, 1, 0.0), std::vector<std::uint32_t>(10, 0), 1);
    CHECK(BatchSampler({SamplerKind::InstanceBalanced, 3, 0}, ds).batches_per_epoch() == 4);
    CHECK(BatchSampler({SamplerKind::InstanceBalanced, 10, 0}, ds).batches_per_epoch() == 1);
    CHECK(BatchSampler({SamplerKind::InstanceBalanced, 64, 0}, ds).batches_per_epoch() == 1);
}
