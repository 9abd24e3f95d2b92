// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "hcgnn/corpus/corpus.hpp"

namespace hcgnn::corpus {

struct TraitPairCorrelation {
    Trait first;
    Trait second;
    double r = 0.0;
    double p = 1.0;
};

/// The ten unordered trait pairs in the order (N,E) (N,O) (N,A) (N,C) (E,O)
/// (E,A) (E,C) (O,A) (O,C) (A,C).
std::array<std::pair<Trait, Trait>, 10> trait_pairs();

/// Pearson r and two-sided p for every trait pair across speakers with
/// traits. Needs at least three such speakers; a constant trait column
/// faults with its name.
std::array<TraitPairCorrelation, 10> trait_correlations(const std::vector<Speaker>& speakers);

}  // namespace hcgnn::corpus
