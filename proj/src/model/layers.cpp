// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/model/layers.hpp"

#include "hcgnn/diffcore/error.hpp"

namespace hcgnn::model {

using namespace diff;

namespace {

void require_rows(Var h, std::size_t n, const char* op) {
    if (h.value().rank() != 2 || h.value().rows() != n)
        throw Fault(std::string(op) + ": feature matrix " + shape_string(h.shape()) + " for " +
                    std::to_string(n) + " nodes");
}

void require_in_dim(Var w, Var h, const char* op) {
    if (w.value().rank() != 2 || w.value().cols() != h.value().cols())
        throw Fault(std::string(op) + ": weight " + shape_string(w.shape()) + " does not accept " +
                    std::to_string(h.value().cols()) + " input features");
}

Var constant_column(Tape& tape, std::vector<double> values) {
    const auto n = values.size();
    return tape.constant(Tensor({n, 1}, std::move(values)));
}

}  // namespace

AttnPairs attention_pairs(const NeighborLists& nb) {
    AttnPairs p;
    for (std::size_t i = 0; i < nb.size(); ++i) {
        for (auto j : nb[i]) {
            p.dst.push_back(i);
            p.src.push_back(j);
            p.self.push_back(0);
        }
        p.dst.push_back(i);
        p.src.push_back(i);
        p.self.push_back(1);
    }
    return p;
}

Var attention_weights(Var h, const AttnPairs& pairs, Var w_score, Var a, double slope) {
    const auto n = h.value().rows();
    if (w_score.value().cols() != 2 * h.value().cols())
        throw Fault("attention score matrix " + shape_string(w_score.shape()) + " needs " +
                    std::to_string(2 * h.value().cols()) + " columns");
    if (a.value().size() != w_score.value().rows())
        throw Fault("attention vector length differs from score matrix rows");
    const auto cat = concat_cols(gather_rows(h, pairs.dst), gather_rows(h, pairs.src));
    const auto hidden = leaky_relu(matmul_nt(cat, w_score), slope);
    const auto e = matmul_nt(hidden, reshape(a, {1, a.value().size()}));
    return segment_softmax(e, pairs.dst, n);
}

Var attn_layer(Var h, const NeighborLists& nb, const AttnVars& p, bool neighbor_scaling, double slope) {
    const auto n = nb.size();
    require_rows(h, n, "attn_layer");
    require_in_dim(p.w_r, h, "attn_layer");
    require_in_dim(p.w_0, h, "attn_layer");
    if (p.w_score.empty() || p.w_score.size() != p.a.size())
        throw Fault("attn_layer needs K >= 1 heads with one score vector each");
    Tape& tape = *h.tape;
    const auto pairs = attention_pairs(nb);
    const auto e = pairs.dst.size();

    Var coef;
    for (std::size_t k = 0; k < p.w_score.size(); ++k) {
        const auto alpha = attention_weights(h, pairs, p.w_score[k], p.a[k], slope);
        coef = k == 0 ? alpha : add(coef, alpha);
    }
    if (neighbor_scaling) {
        std::vector<double> s(e, 1.0);
        for (std::size_t q = 0; q < e; ++q)
            if (!pairs.self[q]) s[q] = 1.0 / static_cast<double>(nb[pairs.dst[q]].size());
        coef = mul(coef, constant_column(tape, std::move(s)));
    }

    // Rows 0..n-1 carry W_r h_j, rows n..2n-1 carry W_0 h_i.
    const auto messages = concat_rows({matmul_nt(h, p.w_r), matmul_nt(h, p.w_0)});
    std::vector<std::size_t> pick(e);
    for (std::size_t q = 0; q < e; ++q) pick[q] = pairs.self[q] ? n + pairs.dst[q] : pairs.src[q];
    const auto weighted = scale_rows(gather_rows(messages, std::move(pick)), coef);
    return relu(scatter_add_rows(weighted, pairs.dst, n));
}

Var graphconv(Var h, const NeighborLists& nb, Var w, Var w_0) {
    const auto n = nb.size();
    require_rows(h, n, "graphconv");
    require_in_dim(w, h, "graphconv");
    require_in_dim(w_0, h, "graphconv");
    Var out = matmul_nt(h, w_0);
    std::vector<std::size_t> dst, src;
    for (std::size_t i = 0; i < n; ++i)
        for (auto j : nb[i]) {
            dst.push_back(i);
            src.push_back(j);
        }
    if (!dst.empty())
        out = add(out, scatter_add_rows(gather_rows(matmul_nt(h, w), std::move(src)), std::move(dst), n));
    return relu(out);
}

Var rgcn(Var h, const std::vector<const NeighborLists*>& nbs, const std::vector<Var>& w_r, Var w_0) {
    if (nbs.size() != w_r.size())
        throw Fault("rgcn configured for " + std::to_string(w_r.size()) + " relations, graph has " +
                    std::to_string(nbs.size()));
    require_in_dim(w_0, h, "rgcn");
    Tape& tape = *h.tape;
    Var out = matmul_nt(h, w_0);
    for (std::size_t r = 0; r < nbs.size(); ++r) {
        const auto& nb = *nbs[r];
        require_rows(h, nb.size(), "rgcn");
        require_in_dim(w_r[r], h, "rgcn");
        std::vector<std::size_t> dst, src;
        std::vector<double> norm;
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (auto j : nb[i]) {
                dst.push_back(i);
                src.push_back(j);
                norm.push_back(1.0 / static_cast<double>(nb[i].size()));
            }
        if (dst.empty()) continue;
        const auto msg = scale_rows(gather_rows(matmul_nt(h, w_r[r]), std::move(src)),
                                    constant_column(tape, std::move(norm)));
        out = add(out, scatter_add_rows(msg, std::move(dst), nb.size()));
    }
    return relu(out);
}

Var readout(Var h, const std::vector<graph::Role>& roles, Readout mode) {
    require_rows(h, roles.size(), "readout");
    if (mode == Readout::MeanAll) return mean_rows(h);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < roles.size(); ++i)
        if (roles[i] == graph::Role::A) rows.push_back(i);
    if (rows.empty()) throw Fault("speaker-A readout on a graph without speaker-A nodes");
    return mean_rows(gather_rows(h, std::move(rows)));
}

Var fuse_relations(const std::vector<Var>& g, const FusionVars& p) {
    if (g.empty()) throw Fault("fusion needs at least one relation vector");
    const auto d = g.front().value().size();
    for (const auto& v : g)
        if (v.value().size() != d) throw Fault("relation vectors differ in dimension");
    const auto z = concat_rows(g);
    const auto out = attention(matmul_nt(z, p.w_q), matmul_nt(z, p.w_k), matmul_nt(z, p.w_v));
    return reshape(out, {1, out.value().size()});
}

Var heads(Var z, const std::array<HeadVars, 5>& p) {
    Var out;
    for (std::size_t t = 0; t < p.size(); ++t) {
        const auto hidden = relu(add_row(matmul_nt(z, p[t].w1), p[t].b1));
        const auto y = relu(add_row(matmul_nt(hidden, p[t].w2), p[t].b2));
        out = t == 0 ? y : concat_cols(out, y);
    }
    return out;
}

Var mae_loss(Var pred, Var target) {
    if (pred.value().empty()) throw Fault("MAE of an empty batch");
    if (!pred.value().same_shape(target.value()))
        throw Fault("MAE shapes differ: " + shape_string(pred.shape()) + " vs " +
                    shape_string(target.shape()));
    return mean(abs(sub(pred, target)));
}

}  // namespace hcgnn::model
