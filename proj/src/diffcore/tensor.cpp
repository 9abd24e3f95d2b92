// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/diffcore/tensor.hpp"

#include <cmath>
#include <sstream>

#include "hcgnn/diffcore/error.hpp"

namespace hcgnn::diff {

std::size_t shape_size(const Shape& shape) {
    std::size_t n = 1;
    for (auto e : shape) {
        if (e == 0) throw Fault("tensor extents must be positive, got " + shape_string(shape));
        n *= e;
    }
    return n;
}

std::string shape_string(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << ']';
    return os.str();
}

void require_finite(std::span<const double> values, const std::string& what) {
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i])) throw NumericFault(what, i);
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
    values_.assign(shape_size(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    if (shape_size(shape_) != values_.size())
        throw Fault("tensor shape " + shape_string(shape_) + " does not match " +
                    std::to_string(values_.size()) + " values");
}

Tensor Tensor::vector(std::initializer_list<double> values) {
    return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::vector(std::vector<double> values) {
    Shape s{values.size()};
    return Tensor(std::move(s), std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
    return Tensor({rows, cols}, std::move(values));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
    std::vector<double> v;
    std::size_t cols = rows.size() ? rows.begin()->size() : 0;
    for (const auto& r : rows) {
        if (r.size() != cols) throw Fault("ragged matrix literal");
        v.insert(v.end(), r.begin(), r.end());
    }
    return Tensor({rows.size(), cols}, std::move(v));
}

Tensor Tensor::scalar(double value) { return Tensor({1}, std::vector<double>{value}); }

std::size_t Tensor::rows() const {
    if (shape_.size() == 1) return 1;
    if (shape_.size() == 2) return shape_[0];
    throw Fault("rows() needs rank 1 or 2, got " + shape_string(shape_));
}

std::size_t Tensor::cols() const {
    if (shape_.empty()) throw Fault("cols() on empty tensor");
    return shape_.back();
}

std::span<const double> Tensor::row(std::size_t r) const {
    const auto c = cols();
    return std::span<const double>(values_).subspan(r * c, c);
}

std::span<double> Tensor::row(std::size_t r) {
    const auto c = cols();
    return std::span<double>(values_).subspan(r * c, c);
}

Tensor Tensor::reshaped(Shape shape) const {
    if (shape_size(shape) != values_.size())
        throw Fault("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
    return Tensor(std::move(shape), values_);
}

void Tensor::fill(double v) {
    for (auto& x : values_) x = v;
}

void Tensor::add_inplace(const Tensor& other) {
    if (values_.size() != other.values_.size())
        throw Fault("add_inplace shape mismatch " + shape_string(shape_) + " vs " +
                    shape_string(other.shape_));
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
}

}  // namespace hcgnn::diff
