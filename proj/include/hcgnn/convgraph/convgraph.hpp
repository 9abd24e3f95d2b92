// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hcgnn/corpus/corpus.hpp"

namespace hcgnn::graph {

using corpus::Role;

/// Directed speaker-pair relation: AA = a→a, BB = b→b, BA = b→a, AB = a→b.
enum class Relation : std::size_t { AA = 0, BB, BA, AB };
inline constexpr std::size_t kNumRelations = 4;

const char* relation_name(Relation r);
Relation parse_relation(std::string_view s);
/// Comma-separated list such as "AA,BA".
std::vector<Relation> parse_relations(std::string_view s);
std::string relations_string(const std::vector<Relation>& rs);
Role source_role(Relation r);
Role target_role(Relation r);

using Edge = std::pair<std::size_t, std::size_t>;
using NeighborLists = std::vector<std::vector<std::size_t>>;

class ConvGraph {
public:
    ConvGraph(std::vector<Role> roles, const std::vector<Relation>& relations, std::size_t window);

    std::size_t n_nodes() const noexcept { return roles_.size(); }
    const std::vector<Role>& roles() const noexcept { return roles_; }
    const std::vector<Relation>& relations() const noexcept { return relations_; }
    bool has_relation(Relation r) const;

    /// Sorted by (src, dst); empty for relations not built.
    const std::vector<Edge>& edges(Relation r) const;
    /// In- and out-neighbors of `node` under `r`, ascending, never `node`.
    const std::vector<std::size_t>& neighbors(std::size_t node, Relation r) const;
    const NeighborLists& neighbor_lists(Relation r) const;
    /// Union of the neighbor sets over every built relation.
    NeighborLists union_neighbors() const;

private:
    std::vector<Role> roles_;
    std::vector<Relation> relations_;
    std::array<std::vector<Edge>, kNumRelations> edges_;
    std::array<NeighborLists, kNumRelations> adjacency_;
};

/// Nearest-occurrence window graph. For X→Y every X utterance links to its
/// `window` nearest preceding and `window` nearest following Y utterances
/// (other than itself).
ConvGraph build_graph(const corpus::Dialogue& d, const std::vector<Relation>& relations,
                      std::size_t window = 1);

/// "rel src dst" per line, ordered by relation, src, dst.
void dump_edges(const ConvGraph& g, std::ostream& out);

}  // namespace hcgnn::graph
