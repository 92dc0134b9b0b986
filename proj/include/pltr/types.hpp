#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pltr {

// Dense row-major matrix of doubles. All numerics in this library are
// 64-bit; file formats that store narrower types widen on load.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : data_(rows * cols, value), rows_(rows), cols_(cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> flat() { return data_; }
    std::span<const double> flat() const { return data_; }

    void fill(double value) { data_.assign(data_.size(), value); }

    bool operator==(const Matrix&) const = default;

private:
    std::vector<double> data_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
};

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);
bool all_finite(std::span<const double> v);

// log(sum_i exp(v_i)) with max subtraction.
double log_sum_exp(std::span<const double> v);

// Softmax with max subtraction; sums to 1 for any finite input.
std::vector<double> stable_softmax(std::span<const double> logits);

}  // namespace pltr
