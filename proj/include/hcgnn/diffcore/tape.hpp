// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hcgnn/diffcore/tensor.hpp"

namespace hcgnn::diff {

using ParamId = std::size_t;

/// A learnable tensor and its accumulated gradient.
struct Param {
    std::string name;
    Tensor tensor;
    Tensor grad;
};

/// Gradients indexed by ParamId. An empty tensor means the parameter was
/// not reached from the output.
using GradMap = std::vector<Tensor>;

/// Owns the parameters of one model. Ids are dense and stable.
class ParamStore {
public:
    ParamId add(std::string name, Tensor init);

    std::size_t size() const noexcept { return params_.size(); }
    Param& operator[](ParamId id) { return params_.at(id); }
    const Param& operator[](ParamId id) const { return params_.at(id); }

    /// Throws if no parameter carries `name`.
    ParamId find(std::string_view name) const;
    bool contains(std::string_view name) const;

    void zero_grad();
    /// grad += g for every non-empty entry of g.
    void accumulate(const GradMap& g);
    /// Total number of scalar parameters.
    std::size_t scalar_count() const;

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }

    bool operator==(const ParamStore& other) const;

private:
    std::vector<Param> params_;
};

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
struct Var {
    Tape* tape = nullptr;
    std::size_t id = 0;

    const Tensor& value() const;
    const Shape& shape() const { return value().shape(); }
};

/// Grad storage handed to backward closures.
class BackwardContext {
public:
    explicit BackwardContext(const Tape& tape);

    /// True when the input node participates in the gradient.
    bool wants(std::size_t id) const;
    /// Gradient slot of node `id`, zero-initialised on first use.
    Tensor& slot(std::size_t id);
    bool has(std::size_t id) const { return !grads_[id].empty(); }
    Tensor& existing(std::size_t id) { return grads_[id]; }

private:
    const Tape& tape_;
    std::vector<Tensor> grads_;
};

/// Records a computation for reverse-mode differentiation. Single-threaded;
/// independent tapes may run on separate threads.
class Tape {
public:
    using Backward = std::function<void(const Tensor& grad_out, BackwardContext& ctx)>;

    Var constant(Tensor value);
    /// Leaf reading a parameter's current value. Copies the value.
    Var param(const ParamStore& store, ParamId id);

    /// Appends a node produced by a primitive. The value is checked for
    /// non-finite entries and `op` names the primitive in the fault.
    Var record(Tensor value, const std::vector<std::size_t>& inputs, Backward backward,
               const char* op);

    const Tensor& value(std::size_t id) const { return nodes_.at(id).value; }
    bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
    std::size_t size() const noexcept { return nodes_.size(); }
    void clear() { nodes_.clear(); }

    /// Reverse sweep from a scalar output. Returns per-parameter gradients
    /// sized `n_params`; parameters not on the tape stay empty.
    GradMap gradients(Var output, std::size_t n_params);

private:
    struct Node {
        Tensor value;
        Backward backward;
        bool requires_grad = false;
        long param = -1;
    };
    std::vector<Node> nodes_;
};

/// dL/dθ accumulated (+=) into every Param's grad.
void backprop(Var output, ParamStore& store);

// ---------------------------------------------------------------------------
// Differentiable primitives. All inputs must live on the same tape.

Var matmul(Var a, Var b);
/// a · wᵀ, the usual dense-layer product for row-major feature matrices.
Var matmul_nt(Var a, Var w);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
/// Adds a bias vector (rank 1 or 1×c) to every row of x.
Var add_row(Var x, Var bias);
Var scale(Var a, double factor);
Var relu(Var a);
Var leaky_relu(Var a, double slope);
Var abs(Var a);
Var sum(Var a);
Var mean(Var a);
/// Column means over all rows, result 1×c.
Var mean_rows(Var x);
Var gather_rows(Var x, std::vector<std::size_t> index);
/// out[index[e]] += x[e]; out has `n_out` rows.
Var scatter_add_rows(Var x, std::vector<std::size_t> index, std::size_t n_out);
/// Multiplies row e of x by w[e]; w holds one value per row.
Var scale_rows(Var x, Var w);
Var concat_cols(Var a, Var b);
/// Stacks inputs vertically; vectors count as one row.
Var concat_rows(const std::vector<Var>& parts);
Var reshape(Var a, Shape shape);
Var softmax(Var v);
/// Softmax taken independently within each segment id.
Var segment_softmax(Var scores, std::vector<std::size_t> segment, std::size_t n_segments);
/// softmax(q kᵀ / sqrt(d_k)) v over a token sequence (rows).
Var attention(Var q, Var k, Var v);

// Plain tensor forms.
Tensor leaky_relu(const Tensor& x, double slope);
Tensor softmax(const Tensor& v);

}  // namespace hcgnn::diff
