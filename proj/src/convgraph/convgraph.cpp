// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/convgraph/convgraph.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "hcgnn/diffcore/error.hpp"

namespace hcgnn::graph {

namespace {

constexpr std::array<const char*, kNumRelations> kNames{"AA", "BB", "BA", "AB"};

std::size_t slot(Relation r) {
    const auto i = static_cast<std::size_t>(r);
    if (i >= kNumRelations) throw Fault("unknown relation id " + std::to_string(i));
    return i;
}

}  // namespace

const char* relation_name(Relation r) { return kNames[slot(r)]; }

Relation parse_relation(std::string_view s) {
    for (std::size_t i = 0; i < kNumRelations; ++i)
        if (s == kNames[i]) return static_cast<Relation>(i);
    throw Fault("unknown relation '" + std::string(s) + "'");
}

std::vector<Relation> parse_relations(std::string_view s) {
    std::vector<Relation> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto end = std::min(s.find(',', start), s.size());
        out.push_back(parse_relation(s.substr(start, end - start)));
        start = end + 1;
    }
    return out;
}

std::string relations_string(const std::vector<Relation>& rs) {
    std::string out;
    for (auto r : rs) {
        if (!out.empty()) out += ',';
        out += relation_name(r);
    }
    return out;
}

Role source_role(Relation r) {
    return (r == Relation::AA || r == Relation::AB) ? Role::A : Role::B;
}

Role target_role(Relation r) {
    return (r == Relation::AA || r == Relation::BA) ? Role::A : Role::B;
}

ConvGraph::ConvGraph(std::vector<Role> roles, const std::vector<Relation>& relations, std::size_t window)
    : roles_(std::move(roles)) {
    if (roles_.empty()) throw Fault("cannot build a graph over zero utterances");
    if (relations.empty()) throw Fault("graph needs at least one relation");
    if (window == 0) throw Fault("graph window must be >= 1");
    const auto n = roles_.size();
    for (auto r : relations) {
        const auto s = slot(r);
        if (std::find(relations_.begin(), relations_.end(), r) != relations_.end())
            throw Fault(std::string("relation ") + relation_name(r) + " listed twice");
        relations_.push_back(r);

        std::vector<std::size_t> targets;
        for (std::size_t i = 0; i < n; ++i)
            if (roles_[i] == target_role(r)) targets.push_back(i);

        std::set<Edge> edges;
        for (std::size_t i = 0; i < n; ++i) {
            if (roles_[i] != source_role(r)) continue;
            // targets is ascending; split around i.
            const auto mid = std::lower_bound(targets.begin(), targets.end(), i);
            auto before = mid;
            for (std::size_t k = 0; k < window && before != targets.begin(); ++k)
                edges.emplace(i, *--before);
            auto after = mid;
            if (after != targets.end() && *after == i) ++after;
            for (std::size_t k = 0; k < window && after != targets.end(); ++k, ++after)
                edges.emplace(i, *after);
        }
        edges_[s].assign(edges.begin(), edges.end());

        std::vector<std::set<std::size_t>> adj(n);
        for (const auto& [src, dst] : edges_[s]) {
            adj[src].insert(dst);
            adj[dst].insert(src);
        }
        adjacency_[s].resize(n);
        for (std::size_t i = 0; i < n; ++i) adjacency_[s][i].assign(adj[i].begin(), adj[i].end());
    }
}

bool ConvGraph::has_relation(Relation r) const {
    return std::find(relations_.begin(), relations_.end(), r) != relations_.end();
}

const std::vector<Edge>& ConvGraph::edges(Relation r) const { return edges_[slot(r)]; }

const std::vector<std::size_t>& ConvGraph::neighbors(std::size_t node, Relation r) const {
    static const std::vector<std::size_t> kNone;
    const auto s = slot(r);
    if (node >= n_nodes())
        throw Fault("node " + std::to_string(node) + " out of range for " + std::to_string(n_nodes()) +
                    "-node graph");
    return adjacency_[s].empty() ? kNone : adjacency_[s][node];
}

const NeighborLists& ConvGraph::neighbor_lists(Relation r) const {
    const auto s = slot(r);
    if (!has_relation(r)) throw Fault(std::string("relation ") + relation_name(r) + " not in graph");
    return adjacency_[s];
}

NeighborLists ConvGraph::union_neighbors() const {
    std::vector<std::set<std::size_t>> adj(n_nodes());
    for (auto r : relations_)
        for (std::size_t i = 0; i < n_nodes(); ++i)
            adj[i].insert(adjacency_[slot(r)][i].begin(), adjacency_[slot(r)][i].end());
    NeighborLists out(n_nodes());
    for (std::size_t i = 0; i < n_nodes(); ++i) out[i].assign(adj[i].begin(), adj[i].end());
    return out;
}

ConvGraph build_graph(const corpus::Dialogue& d, const std::vector<Relation>& relations,
                      std::size_t window) {
    if (d.utterances.empty()) throw Fault("dialogue '" + d.id + "' has no utterances to build a graph");
    std::vector<Role> roles;
    roles.reserve(d.utterances.size());
    for (const auto& u : d.utterances) roles.push_back(u.role);
    return ConvGraph(std::move(roles), relations, window);
}

void dump_edges(const ConvGraph& g, std::ostream& out) {
    for (std::size_t s = 0; s < kNumRelations; ++s) {
        const auto r = static_cast<Relation>(s);
        for (const auto& [src, dst] : g.edges(r)) out << relation_name(r) << ' ' << src << ' ' << dst << '\n';
    }
}

}  // namespace hcgnn::graph
