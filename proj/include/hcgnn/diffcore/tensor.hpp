// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace hcgnn::diff {

using Shape = std::vector<std::size_t>;

/// Dense row-major array of doubles. Rank 1 and rank 2 cover everything
/// the models need; higher ranks are accepted but only reshaped.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, double fill = 0.0);
    Tensor(Shape shape, std::vector<double> values);

    static Tensor vector(std::initializer_list<double> values);
    static Tensor vector(std::vector<double> values);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
    static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);
    static Tensor scalar(double value);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    /// Leading extent for rank 2, 1 for rank 1.
    std::size_t rows() const;
    /// Trailing extent.
    std::size_t cols() const;

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> row(std::size_t r) const;
    std::span<double> row(std::size_t r);

    Tensor reshaped(Shape shape) const;
    void fill(double v);
    /// this += other (same shape).
    void add_inplace(const Tensor& other);

    bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }
    bool operator==(const Tensor& other) const = default;

private:
    Shape shape_;
    std::vector<double> values_;
};

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Throws NumericFault naming `what` at the first non-finite entry.
void require_finite(std::span<const double> values, const std::string& what);

}  // namespace hcgnn::diff
