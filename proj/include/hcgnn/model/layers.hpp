// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "hcgnn/convgraph/convgraph.hpp"
#include "hcgnn/diffcore/tape.hpp"

namespace hcgnn::model {

using diff::Tensor;
using diff::Var;
using graph::NeighborLists;

/// Vars of one relation-specific attention layer. Matrices are stored
/// output-major (d′×d), so a layer applies h·Wᵀ to row features.
struct AttnVars {
    std::vector<Var> w_score;  // per head, d′×2d
    std::vector<Var> a;        // per head, 1×d′
    Var w_r;                   // d′×d
    Var w_0;                   // d′×d
};

/// Pair list of an attention layer: one entry per (i, j ∈ N_i) in node
/// order followed by neighbor order, then the self pair (i, i) last.
struct AttnPairs {
    std::vector<std::size_t> dst;
    std::vector<std::size_t> src;
    std::vector<char> self;
};
AttnPairs attention_pairs(const NeighborLists& nb);

/// Softmax weights of one head over N_i ∪ {i}, one row per pair (E×1).
Var attention_weights(Var h, const AttnPairs& pairs, Var w_score, Var a, double slope);

/// σ(Σ_k Σ_j c·W_r h_j + Σ_k a_ii W_0 h_i), c = a_ij/|N_i| when
/// `neighbor_scaling`, else a_ij.
Var attn_layer(Var h, const NeighborLists& nb, const AttnVars& p, bool neighbor_scaling, double slope);

/// σ(Σ_{j∈N_i} W h_j + W_0 h_i).
Var graphconv(Var h, const NeighborLists& nb, Var w, Var w_0);

/// σ(Σ_r Σ_{j∈N_i^r} W_r h_j / |N_i^r| + W_0 h_i).
Var rgcn(Var h, const std::vector<const NeighborLists*>& nbs, const std::vector<Var>& w_r, Var w_0);

enum class Readout { MeanAll, MeanSpeakerA };

/// Mean over all rows or over speaker-A rows; result 1×c.
Var readout(Var h, const std::vector<graph::Role>& roles, Readout mode);

struct FusionVars {
    Var w_q, w_k, w_v;  // square, d″×d″
};

/// Rows g_r as tokens through single-head scaled-dot self-attention,
/// then flattened to 1×(R·d″).
Var fuse_relations(const std::vector<Var>& g, const FusionVars& p);

struct HeadVars {
    Var w1, b1, w2, b2;  // 16×dz, 1×16, 1×16, 1×1
};

/// relu(W2 relu(W1 z + b1) + b2) for each of the five traits; 1×5.
Var heads(Var z, const std::array<HeadVars, 5>& p);

/// Mean over rows and traits of |P − y|. Both N×5.
Var mae_loss(Var pred, Var target);

}  // namespace hcgnn::model
