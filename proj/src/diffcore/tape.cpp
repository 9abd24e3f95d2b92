// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/diffcore/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "hcgnn/diffcore/error.hpp"

namespace hcgnn::diff {

// ---------------------------------------------------------------------------
// ParamStore

ParamId ParamStore::add(std::string name, Tensor init) {
    if (contains(name)) throw Fault("duplicate parameter name '" + name + "'");
    Tensor grad(init.shape(), 0.0);
    params_.push_back(Param{std::move(name), std::move(init), std::move(grad)});
    return params_.size() - 1;
}

ParamId ParamStore::find(std::string_view name) const {
    for (std::size_t i = 0; i < params_.size(); ++i)
        if (params_[i].name == name) return i;
    throw Fault("unknown parameter '" + std::string(name) + "'");
}

bool ParamStore::contains(std::string_view name) const {
    return std::any_of(params_.begin(), params_.end(),
                       [&](const Param& p) { return p.name == name; });
}

void ParamStore::zero_grad() {
    for (auto& p : params_) p.grad.fill(0.0);
}

void ParamStore::accumulate(const GradMap& g) {
    if (g.size() > params_.size()) throw Fault("gradient map larger than parameter store");
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!g[i].empty()) params_[i].grad.add_inplace(g[i]);
}

std::size_t ParamStore::scalar_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.tensor.size();
    return n;
}

bool ParamStore::operator==(const ParamStore& other) const {
    if (params_.size() != other.params_.size()) return false;
    for (std::size_t i = 0; i < params_.size(); ++i)
        if (params_[i].name != other.params_[i].name ||
            !(params_[i].tensor == other.params_[i].tensor))
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Tape

const Tensor& Var::value() const { return tape->value(id); }

BackwardContext::BackwardContext(const Tape& tape) : tape_(tape), grads_(tape.size()) {}

bool BackwardContext::wants(std::size_t id) const { return tape_.requires_grad(id); }

Tensor& BackwardContext::slot(std::size_t id) {
    auto& g = grads_[id];
    if (g.empty()) g = Tensor(tape_.value(id).shape(), 0.0);
    return g;
}

Var Tape::constant(Tensor value) {
    require_finite(value.values(), "constant");
    nodes_.push_back(Node{std::move(value), nullptr, false, -1});
    return Var{this, nodes_.size() - 1};
}

Var Tape::param(const ParamStore& store, ParamId id) {
    const auto& p = store[id];
    require_finite(p.tensor.values(), "parameter " + p.name);
    nodes_.push_back(Node{p.tensor, nullptr, true, static_cast<long>(id)});
    return Var{this, nodes_.size() - 1};
}

Var Tape::record(Tensor value, const std::vector<std::size_t>& inputs, Backward backward,
                 const char* op) {
    require_finite(value.values(), op);
    bool rg = false;
    for (auto in : inputs) rg = rg || nodes_.at(in).requires_grad;
    nodes_.push_back(Node{std::move(value), rg ? std::move(backward) : nullptr, rg, -1});
    return Var{this, nodes_.size() - 1};
}

GradMap Tape::gradients(Var output, std::size_t n_params) {
    if (output.tape != this) throw Fault("backprop output belongs to another tape");
    if (value(output.id).size() != 1)
        throw Fault("backprop needs a scalar output, got shape " +
                    shape_string(value(output.id).shape()));
    GradMap out(n_params);
    if (!nodes_[output.id].requires_grad) return out;

    BackwardContext ctx(*this);
    ctx.slot(output.id)[0] = 1.0;
    for (std::size_t i = output.id + 1; i-- > 0;) {
        if (!ctx.has(i)) continue;
        auto& node = nodes_[i];
        if (node.param >= 0) {
            auto pid = static_cast<std::size_t>(node.param);
            if (pid >= n_params) throw Fault("parameter id outside gradient map");
            if (out[pid].empty())
                out[pid] = std::move(ctx.existing(i));
            else
                out[pid].add_inplace(ctx.existing(i));
            continue;
        }
        if (node.backward) node.backward(ctx.existing(i), ctx);
    }
    return out;
}

void backprop(Var output, ParamStore& store) {
    store.accumulate(output.tape->gradients(output, store.size()));
}

// ---------------------------------------------------------------------------
// Kernels

namespace {

void check_same_tape(Var a, Var b) {
    if (a.tape != b.tape || a.tape == nullptr) throw Fault("operands live on different tapes");
}

void require_rank2(const Tensor& t, const char* op) {
    if (t.rank() != 2)
        throw Fault(std::string(op) + " expects a matrix, got shape " + shape_string(t.shape()));
}

// c(m×n) += a(m×k) · b(k×n)
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a[i * k + p];
            if (av == 0.0) continue;
            const double* brow = b + p * n;
            double* crow = c + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
}

// c(m×n) += a(m×k) · b(n×k)ᵀ
void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            const double* arow = a + i * k;
            const double* brow = b + j * k;
            for (std::size_t p = 0; p < k; ++p) s += arow[p] * brow[p];
            c[i * n + j] += s;
        }
}

// c(m×n) += a(k×m)ᵀ · b(k×n)
void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t i = 0; i < m; ++i) {
            const double av = a[p * m + i];
            if (av == 0.0) continue;
            const double* brow = b + p * n;
            double* crow = c + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
}

}  // namespace

// Elementwise primitives capture what the derivative needs directly.

Var relu(Var a) {
    const Tensor& x = a.value();
    Tensor y(x.shape());
    std::vector<char> pos(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        pos[i] = x[i] > 0.0;
        y[i] = pos[i] ? x[i] : 0.0;
    }
    const auto in = a.id;
    return a.tape->record(
        std::move(y), {in},
        [in, pos = std::move(pos)](const Tensor& g, BackwardContext& ctx) {
            auto& dx = ctx.slot(in);
            for (std::size_t i = 0; i < g.size(); ++i)
                if (pos[i]) dx[i] += g[i];
        },
        "relu");
}

Tensor leaky_relu(const Tensor& x, double slope) {
    if (!(slope > 0.0 && slope < 1.0))
        throw Fault("leaky_relu slope must lie in (0,1), got " + std::to_string(slope));
    require_finite(x.values(), "leaky_relu input");
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] >= 0.0 ? x[i] : slope * x[i];
    return y;
}

Var leaky_relu(Var a, double slope) {
    Tensor y = leaky_relu(a.value(), slope);
    const Tensor& x = a.value();
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] >= 0.0 ? 1.0 : slope;
    const auto in = a.id;
    return a.tape->record(
        std::move(y), {in},
        [in, d = std::move(d)](const Tensor& g, BackwardContext& ctx) {
            auto& dx = ctx.slot(in);
            for (std::size_t i = 0; i < g.size(); ++i) dx[i] += d[i] * g[i];
        },
        "leaky_relu");
}

Var abs(Var a) {
    const Tensor& x = a.value();
    Tensor y(x.shape());
    std::vector<double> sgn(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = std::fabs(x[i]);
        sgn[i] = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
    }
    const auto in = a.id;
    return a.tape->record(
        std::move(y), {in},
        [in, sgn = std::move(sgn)](const Tensor& g, BackwardContext& ctx) {
            auto& dx = ctx.slot(in);
            for (std::size_t i = 0; i < g.size(); ++i) dx[i] += sgn[i] * g[i];
        },
        "abs");
}

Var matmul(Var a, Var b) {
    check_same_tape(a, b);
    const Tensor& x = a.value();
    const Tensor& w = b.value();
    require_rank2(x, "matmul");
    require_rank2(w, "matmul");
    const auto m = x.rows(), k = x.cols(), n = w.cols();
    if (w.rows() != k)
        throw Fault("matmul inner dimensions differ: " + shape_string(x.shape()) + " · " +
                    shape_string(w.shape()));
    Tensor y({m, n});
    gemm_nn(x.values().data(), w.values().data(), y.values().data(), m, k, n);
    const auto ia = a.id, ib = b.id;
    Tape* tape = a.tape;
    return tape->record(
        std::move(y), {ia, ib},
        [tape, ia, ib, m, k, n](const Tensor& g, BackwardContext& ctx) {
            if (ctx.wants(ia))
                gemm_nt(g.values().data(), tape->value(ib).values().data(),
                        ctx.slot(ia).values().data(), m, n, k);
            if (ctx.wants(ib))
                gemm_tn(tape->value(ia).values().data(), g.values().data(),
                        ctx.slot(ib).values().data(), k, m, n);
        },
        "matmul");
}

Var matmul_nt(Var a, Var w) {
    check_same_tape(a, w);
    const Tensor& x = a.value();
    const Tensor& wt = w.value();
    require_rank2(x, "matmul_nt");
    require_rank2(wt, "matmul_nt");
    const auto m = x.rows(), k = x.cols(), n = wt.rows();
    if (wt.cols() != k)
        throw Fault("matmul_nt inner dimensions differ: " + shape_string(x.shape()) + " · " +
                    shape_string(wt.shape()) + "ᵀ");
    Tensor y({m, n});
    gemm_nt(x.values().data(), wt.values().data(), y.values().data(), m, k, n);
    const auto ia = a.id, iw = w.id;
    Tape* tape = a.tape;
    return tape->record(
        std::move(y), {ia, iw},
        [tape, ia, iw, m, k, n](const Tensor& g, BackwardContext& ctx) {
            if (ctx.wants(ia))
                gemm_nn(g.values().data(), tape->value(iw).values().data(),
                        ctx.slot(ia).values().data(), m, n, k);
            if (ctx.wants(iw))
                gemm_tn(g.values().data(), tape->value(ia).values().data(),
                        ctx.slot(iw).values().data(), n, m, k);
        },
        "matmul_nt");
}

Var transpose(Var a) {
    const Tensor& x = a.value();
    require_rank2(x, "transpose");
    const auto m = x.rows(), n = x.cols();
    Tensor y({n, m});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) y.at(j, i) = x.at(i, j);
    const auto in = a.id;
    return a.tape->record(
        std::move(y), {in},
        [in, m, n](const Tensor& g, BackwardContext& ctx) {
            auto& dx = ctx.slot(in);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) dx[i * n + j] += g[j * m + i];
        },
        "transpose");
}

namespace {

Var binary_same_shape(Var a, Var b, const char* op, double sign_b) {
    check_same_tape(a, b);
    const Tensor& x = a.value();
    const Tensor& y = b.value();
    if (!x.same_shape(y))
        throw Fault(std::string(op) + " shape mismatch " + shape_string(x.shape()) + " vs " +
                    shape_string(y.shape()));
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + sign_b * y[i];
    const auto ia = a.id, ib = b.id;
    return a.tape->record(
        std::move(out), {ia, ib},
        [ia, ib, sign_b](const Tensor& g, BackwardContext& ctx) {
            if (ctx.wants(ia)) ctx.slot(ia).add_inplace(g);
            if (ctx.wants(ib)) {
                auto& d = ctx.slot(ib);
                for (std::size_t i = 0; i < g.size(); ++i) d[i] += sign_b * g[i];
            }
        },
        op);
}

}  // namespace

Var add(Var a, Var b) { return binary_same_shape(a, b, "add", 1.0); }
Var sub(Var a, Var b) { return binary_same_shape(a, b, "sub", -1.0); }

Var mul(Var a, Var b) {
    check_same_tape(a, b);
    const Tensor& x = a.value();
    const Tensor& y = b.value();
    if (!x.same_shape(y))
        throw Fault("mul shape mismatch " + shape_string(x.shape()) + " vs " +
                    shape_string(y.shape()));
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
    const auto ia = a.id, ib = b.id;
    Tape* tape = a.tape;
    return tape->record(
        std::move(out), {ia, ib},
        [tape, ia, ib](const Tensor& g, BackwardContext& ctx) {
            const Tensor& xv = tape->value(ia);
            const Tensor& yv = tape->value(ib);
            if (ctx.wants(ia)) {
                auto& d = ctx.slot(ia);
                for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * yv[i];
            }
            if (ctx.wants(ib)) {
                auto& d = ctx.slot(ib);
                for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * xv[i];
            }
        },
        "mul");
}

Var add_row(Var x, Var bias) {
    check_same_tape(x, bias);
    const Tensor& xv = x.value();
    const Tensor& bv = bias.value();
    const auto c = xv.cols();
    if (bv.size() != c)
        throw Fault("add_row bias of size " + std::to_string(bv.size()) + " for " +
                    std::to_string(c) + " columns");
    Tensor out = xv;
    const auto r = xv.size() / c;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) out[i * c + j] += bv[j];
    const auto ix = x.id, ib = bias.id;
    return x.tape->record(
        std::move(out), {ix, ib},
        [ix, ib, r, c](const Tensor& g, BackwardContext& ctx) {
            if (ctx.wants(ix)) ctx.slot(ix).add_inplace(g);
            if (ctx.wants(ib)) {
                auto& d = ctx.slot(ib);
                for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t j = 0; j < c; ++j) d[j] += g[i * c + j];
            }
        },
        "add_row");
}

Var scale(Var a, double factor) {
    const Tensor& x = a.value();
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = factor * x[i];
    const auto in = a.id;
    return a.tape->record(
        std::move(y), {in},
        [in, factor](const Tensor& g, BackwardContext& ctx) {
            auto& d = ctx.slot(in);
            for (std::size_t i = 0; i < g.size(); ++i) d[i] += factor * g[i];
        },
        "scale");
}

Var sum(Var a) {
    const Tensor& x = a.value();
    double s = 0.0;
    for (double v : x.values()) s += v;
    const auto in = a.id;
    return a.tape->record(
        Tensor::scalar(s), {in},
        [in](const Tensor& g, BackwardContext& ctx) {
            auto& d = ctx.slot(in);
            for (auto& v : d.values()) v += g[0];
        },
        "sum");
}

Var mean(Var a) { return scale(sum(a), 1.0 / static_cast<double>(a.value().size())); }

Var mean_rows(Var x) {
    const Tensor& xv = x.value();
    const auto r = xv.rows(), c = xv.cols();
    Tensor y({1, c});
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) y[j] += xv[i * c + j];
    const double inv = 1.0 / static_cast<double>(r);
    for (auto& v : y.values()) v *= inv;
    const auto in = x.id;
    return x.tape->record(
        std::move(y), {in},
        [in, r, c, inv](const Tensor& g, BackwardContext& ctx) {
            auto& d = ctx.slot(in);
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < c; ++j) d[i * c + j] += inv * g[j];
        },
        "mean_rows");
}

Var gather_rows(Var x, std::vector<std::size_t> index) {
    const Tensor& xv = x.value();
    const auto r = xv.rows(), c = xv.cols();
    if (index.empty()) throw Fault("gather_rows with empty index");
    Tensor y({index.size(), c});
    for (std::size_t e = 0; e < index.size(); ++e) {
        if (index[e] >= r) throw Fault("gather_rows index out of range");
        std::copy_n(xv.values().data() + index[e] * c, c, y.values().data() + e * c);
    }
    const auto in = x.id;
    return x.tape->record(
        std::move(y), {in},
        [in, c, index = std::move(index)](const Tensor& g, BackwardContext& ctx) {
            auto& d = ctx.slot(in);
            for (std::size_t e = 0; e < index.size(); ++e)
                for (std::size_t j = 0; j < c; ++j) d[index[e] * c + j] += g[e * c + j];
        },
        "gather_rows");
}

Var scatter_add_rows(Var x, std::vector<std::size_t> index, std::size_t n_out) {
    const Tensor& xv = x.value();
    const auto c = xv.cols();
    if (index.size() != xv.rows()) throw Fault("scatter_add_rows index length mismatch");
    Tensor y({n_out, c});
    for (std::size_t e = 0; e < index.size(); ++e) {
        if (index[e] >= n_out) throw Fault("scatter_add_rows index out of range");
        for (std::size_t j = 0; j < c; ++j) y[index[e] * c + j] += xv[e * c + j];
    }
    const auto in = x.id;
    return x.tape->record(
        std::move(y), {in},
        [in, c, index = std::move(index)](const Tensor& g, BackwardContext& ctx) {
            auto& d = ctx.slot(in);
            for (std::size_t e = 0; e < index.size(); ++e)
                for (std::size_t j = 0; j < c; ++j) d[e * c + j] += g[index[e] * c + j];
        },
        "scatter_add_rows");
}

Var scale_rows(Var x, Var w) {
    check_same_tape(x, w);
    const Tensor& xv = x.value();
    const Tensor& wv = w.value();
    const auto r = xv.rows(), c = xv.cols();
    if (wv.size() != r) throw Fault("scale_rows needs one weight per row");
    Tensor y(xv.shape());
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) y[i * c + j] = wv[i] * xv[i * c + j];
    const auto ix = x.id, iw = w.id;
    Tape* tape = x.tape;
    return tape->record(
        std::move(y), {ix, iw},
        [tape, ix, iw, r, c](const Tensor& g, BackwardContext& ctx) {
            const Tensor& xv = tape->value(ix);
            const Tensor& wv = tape->value(iw);
            if (ctx.wants(ix)) {
                auto& d = ctx.slot(ix);
                for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t j = 0; j < c; ++j) d[i * c + j] += wv[i] * g[i * c + j];
            }
            if (ctx.wants(iw)) {
                auto& d = ctx.slot(iw);
                for (std::size_t i = 0; i < r; ++i) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < c; ++j) s += xv[i * c + j] * g[i * c + j];
                    d[i] += s;
                }
            }
        },
        "scale_rows");
}

Var concat_cols(Var a, Var b) {
    check_same_tape(a, b);
    const Tensor& x = a.value();
    const Tensor& y = b.value();
    const auto r = x.rows(), ca = x.cols(), cb = y.cols();
    if (y.rows() != r) throw Fault("concat_cols row counts differ");
    Tensor out({r, ca + cb});
    for (std::size_t i = 0; i < r; ++i) {
        std::copy_n(x.values().data() + i * ca, ca, out.values().data() + i * (ca + cb));
        std::copy_n(y.values().data() + i * cb, cb, out.values().data() + i * (ca + cb) + ca);
    }
    const auto ia = a.id, ib = b.id;
    return a.tape->record(
        std::move(out), {ia, ib},
        [ia, ib, r, ca, cb](const Tensor& g, BackwardContext& ctx) {
            const auto w = ca + cb;
            if (ctx.wants(ia)) {
                auto& d = ctx.slot(ia);
                for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t j = 0; j < ca; ++j) d[i * ca + j] += g[i * w + j];
            }
            if (ctx.wants(ib)) {
                auto& d = ctx.slot(ib);
                for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t j = 0; j < cb; ++j) d[i * cb + j] += g[i * w + ca + j];
            }
        },
        "concat_cols");
}

Var concat_rows(const std::vector<Var>& parts) {
    if (parts.empty()) throw Fault("concat_rows of nothing");
    const auto c = parts.front().value().cols();
    std::size_t r = 0;
    std::vector<std::size_t> ids, offsets;
    for (const auto& p : parts) {
        check_same_tape(parts.front(), p);
        if (p.value().cols() != c) throw Fault("concat_rows column counts differ");
        offsets.push_back(r * c);
        r += p.value().size() / c;
        ids.push_back(p.id);
    }
    Tensor out({r, c});
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const auto& v = parts[k].value();
        std::copy(v.values().begin(), v.values().end(), out.values().begin() + offsets[k]);
    }
    return parts.front().tape->record(
        std::move(out), ids,
        [ids, offsets](const Tensor& g, BackwardContext& ctx) {
            for (std::size_t k = 0; k < ids.size(); ++k) {
                if (!ctx.wants(ids[k])) continue;
                auto& d = ctx.slot(ids[k]);
                for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[offsets[k] + i];
            }
        },
        "concat_rows");
}

Var reshape(Var a, Shape shape) {
    Tensor y = a.value().reshaped(std::move(shape));
    const auto in = a.id;
    return a.tape->record(
        std::move(y), {in},
        [in](const Tensor& g, BackwardContext& ctx) {
            auto& d = ctx.slot(in);
            for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
        },
        "reshape");
}

Tensor softmax(const Tensor& v) {
    if (v.empty()) throw Fault("softmax of an empty vector");
    require_finite(v.values(), "softmax input");
    const double mx = *std::max_element(v.values().begin(), v.values().end());
    Tensor y(v.shape());
    double z = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) z += (y[i] = std::exp(v[i] - mx));
    for (auto& x : y.values()) x /= z;
    return y;
}

Var softmax(Var v) {
    return segment_softmax(v, std::vector<std::size_t>(v.value().size(), 0), 1);
}

Var segment_softmax(Var scores, std::vector<std::size_t> segment, std::size_t n_segments) {
    const Tensor& s = scores.value();
    if (s.empty()) throw Fault("softmax of an empty vector");
    if (segment.size() != s.size()) throw Fault("segment_softmax needs one segment id per score");
    std::vector<double> mx(n_segments, -std::numeric_limits<double>::infinity());
    for (std::size_t e = 0; e < s.size(); ++e) {
        if (segment[e] >= n_segments) throw Fault("segment id out of range");
        mx[segment[e]] = std::max(mx[segment[e]], s[e]);
    }
    Tensor y(s.shape());
    std::vector<double> z(n_segments, 0.0);
    for (std::size_t e = 0; e < s.size(); ++e) z[segment[e]] += (y[e] = std::exp(s[e] - mx[segment[e]]));
    for (std::size_t e = 0; e < s.size(); ++e) y[e] /= z[segment[e]];
    const auto in = scores.id;
    const auto out_id = scores.tape->size();
    Tape* tape = scores.tape;
    return tape->record(
        std::move(y), {in},
        [tape, in, out_id, n_segments, segment = std::move(segment)](const Tensor& g,
                                                                     BackwardContext& ctx) {
            const Tensor& yv = tape->value(out_id);
            std::vector<double> dot(n_segments, 0.0);
            for (std::size_t e = 0; e < g.size(); ++e) dot[segment[e]] += yv[e] * g[e];
            auto& d = ctx.slot(in);
            for (std::size_t e = 0; e < g.size(); ++e) d[e] += yv[e] * (g[e] - dot[segment[e]]);
        },
        "segment_softmax");
}

Var attention(Var q, Var k, Var v) {
    check_same_tape(q, k);
    check_same_tape(q, v);
    const Tensor& qv = q.value();
    const Tensor& kv = k.value();
    const Tensor& vv = v.value();
    require_rank2(qv, "attention");
    require_rank2(kv, "attention");
    require_rank2(vv, "attention");
    const auto nq = qv.rows(), nk = kv.rows(), dk = qv.cols(), dv = vv.cols();
    if (kv.cols() != dk || vv.rows() != nk) throw Fault("attention operand shapes disagree");
    const double inv = 1.0 / std::sqrt(static_cast<double>(dk));

    Tensor a({nq, nk});
    gemm_nt(qv.values().data(), kv.values().data(), a.values().data(), nq, dk, nk);
    for (std::size_t i = 0; i < nq; ++i) {
        auto row = a.row(i);
        double mx = -std::numeric_limits<double>::infinity();
        for (auto& x : row) mx = std::max(mx, x *= inv);
        double z = 0.0;
        for (auto& x : row) z += (x = std::exp(x - mx));
        for (auto& x : row) x /= z;
    }
    Tensor out({nq, dv});
    gemm_nn(a.values().data(), vv.values().data(), out.values().data(), nq, nk, dv);

    const auto iq = q.id, ik = k.id, iv = v.id;
    Tape* tape = q.tape;
    return tape->record(
        std::move(out), {iq, ik, iv},
        [tape, iq, ik, iv, a = std::move(a), nq, nk, dk, dv, inv](const Tensor& g,
                                                                  BackwardContext& ctx) {
            const Tensor& qv = tape->value(iq);
            const Tensor& kv = tape->value(ik);
            const Tensor& vv = tape->value(iv);
            if (ctx.wants(iv))
                gemm_tn(a.values().data(), g.values().data(), ctx.slot(iv).values().data(), nk,
                        nq, dv);
            if (!ctx.wants(iq) && !ctx.wants(ik)) return;
            Tensor da({nq, nk});
            gemm_nt(g.values().data(), vv.values().data(), da.values().data(), nq, dv, nk);
            Tensor ds({nq, nk});
            for (std::size_t i = 0; i < nq; ++i) {
                double dot = 0.0;
                for (std::size_t j = 0; j < nk; ++j) dot += a.at(i, j) * da.at(i, j);
                for (std::size_t j = 0; j < nk; ++j)
                    ds.at(i, j) = a.at(i, j) * (da.at(i, j) - dot) * inv;
            }
            if (ctx.wants(iq))
                gemm_nn(ds.values().data(), kv.values().data(), ctx.slot(iq).values().data(), nq,
                        nk, dk);
            if (ctx.wants(ik))
                gemm_tn(ds.values().data(), qv.values().data(), ctx.slot(ik).values().data(), nk,
                        nq, dk);
        },
        "attention");
}

}  // namespace hcgnn::diff
