// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/corpus/analysis.hpp"

#include "hcgnn/diffcore/error.hpp"
#include "hcgnn/diffcore/stats.hpp"

namespace hcgnn::corpus {

std::array<std::pair<Trait, Trait>, 10> trait_pairs() {
    std::array<std::pair<Trait, Trait>, 10> out{};
    std::size_t k = 0;
    for (std::size_t i = 0; i < kNumTraits; ++i)
        for (std::size_t j = i + 1; j < kNumTraits; ++j)
            out[k++] = {static_cast<Trait>(i), static_cast<Trait>(j)};
    return out;
}

std::array<TraitPairCorrelation, 10> trait_correlations(const std::vector<Speaker>& speakers) {
    std::array<std::vector<double>, kNumTraits> cols;
    for (const auto& s : speakers) {
        if (!s.traits) continue;
        for (std::size_t t = 0; t < kNumTraits; ++t) cols[t].push_back((*s.traits)[t]);
    }
    if (cols[0].size() < 3) throw Fault("trait_correlations needs at least 3 speakers with traits");
    for (std::size_t t = 0; t < kNumTraits; ++t) {
        const auto& c = cols[t];
        bool constant = true;
        for (double v : c) constant = constant && v == c.front();
        if (constant) throw Fault(std::string("trait ") + kTraitNames[t] + " has zero variance");
    }
    std::array<TraitPairCorrelation, 10> out{};
    const auto pairs = trait_pairs();
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [a, b] = pairs[k];
        const auto c = stats::pearson(cols[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
        out[k] = {a, b, c.r, c.p};
    }
    return out;
}

}  // namespace hcgnn::corpus
