// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcgnn/corpus/corpus.hpp"
#include "hcgnn/diffcore/parallel.hpp"

namespace hcgnn::exp {

/// Pairwise trait correlations in the order (N,E) (N,O) (N,A) (N,C) (E,O)
/// (E,A) (E,C) (O,A) (O,C) (A,C).
using PairCorrelations = std::array<double, 10>;

/// Pearson correlations between Big-Five scores in a large self-report
/// sample.
inline constexpr PairCorrelations kReferenceCorrelations{-0.49, -0.23, -0.27, -0.15, 0.47,
                                                         0.46,  0.26,  0.40,  0.15,  0.36};

struct SynthSpec {
    std::size_t n_speakers = 200;
    /// Speaker pairs; pair k is opened by speaker k mod n_speakers.
    std::size_t n_pairs = 2000;
    std::size_t dialogues_per_pair = 1;
    std::size_t turns_min = 10;
    std::size_t turns_max = 15;
    PairCorrelations correlations = kReferenceCorrelations;
    /// Weight of the speaker's own traits on its marker words.
    double signal = 0.4;
    /// Weight of the interlocutor's traits on the speaker's marker words.
    double influence = 0.0;
    /// Standard deviation of per-utterance Gaussian jitter on each marker
    /// probability.
    double noise = 0.05;
    std::size_t words_per_polarity = 1;
    /// Marker words per trait in every utterance.
    std::size_t markers_per_trait = 2;
    std::size_t filler_words = 8;
    std::size_t fillers_per_utterance = 2;
    std::size_t syllables_per_word = 3;
    std::uint64_t seed = 0;

    void validate() const;
    bool set(const std::string& key, const std::string& value);
    nlohmann::json to_json() const;
};

SynthSpec read_synth_spec(std::istream& in, SynthSpec base = {});
SynthSpec load_synth_spec(const std::filesystem::path& path, SynthSpec base = {});

using Matrix5 = std::array<std::array<double, 5>, 5>;

/// Gaussian-copula correlation whose uniform marginals have the target
/// Pearson correlations: 2·sin(π·ρ/6) off the diagonal, projected to the
/// nearest positive semidefinite matrix (eigenvalue clipping, then unit
/// diagonal). Faults on non-finite or out-of-range targets.
Matrix5 copula_correlation(const PairCorrelations& targets, bool* projected = nullptr);

/// clamp(0.5 + signal·(own − 0.5) + influence·(other − 0.5) + jitter, 0, 1).
double marker_probability(double own, double other, double signal, double influence, double jitter);

struct Vocabulary {
    /// positive[t][k], negative[t][k]: marker words of trait t.
    std::array<std::vector<std::string>, 5> positive;
    std::array<std::vector<std::string>, 5> negative;
    std::vector<std::string> fillers;
};

Vocabulary make_vocabulary(const SynthSpec& spec);

struct SynthResult {
    corpus::Corpus corpus;
    /// Spec, copula matrix, vocabulary and measured trait correlations.
    nlohmann::json notes;
};

/// Speakers from the copula, dialogues between random partners, utterance
/// text sampled from trait-tilted marker words. Dialogue j draws from its
/// own sub-seed, so the result does not depend on `exec`.
SynthResult generate_synthetic_corpus(const SynthSpec& spec, Execution exec = Execution::Parallel);

}  // namespace hcgnn::exp
