// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/experiment/synth.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "hcgnn/corpus/analysis.hpp"
#include "hcgnn/diffcore/error.hpp"
#include "hcgnn/diffcore/keyvalue.hpp"
#include "hcgnn/diffcore/rng.hpp"

namespace hcgnn::exp {

using corpus::Role;

namespace {

constexpr std::uint64_t kSpeakerStream = 1;
constexpr std::uint64_t kVocabStream = 2;
constexpr std::uint64_t kPairStream = 3;
constexpr std::uint64_t kDialogueStream = 4;

std::string padded(const char* prefix, std::size_t i, std::size_t n) {
    auto digits = std::to_string(n > 0 ? n - 1 : 0).size();
    auto s = std::to_string(i);
    return prefix + std::string(digits > s.size() ? digits - s.size() : 0, '0') + s;
}

double standard_normal(Rng& rng) {
    // Box-Muller on (0,1] so the log stays finite.
    const double u1 = 1.0 - uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

void SynthSpec::validate() const {
    if (n_speakers < 2) throw Fault("synthetic corpus needs n_speakers >= 2");
    if (n_pairs < 1 || dialogues_per_pair < 1) throw Fault("synthetic corpus needs at least one dialogue");
    if (turns_min < 1 || turns_max < turns_min) throw Fault("need 1 <= turns_min <= turns_max");
    for (double r : correlations)
        if (!std::isfinite(r) || r < -1.0 || r > 1.0) throw Fault("correlation targets must lie in [-1,1]");
    if (!std::isfinite(signal) || !std::isfinite(influence)) throw Fault("signal and influence must be finite");
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw Fault("noise must be a finite value >= 0");
    if (words_per_polarity < 1 || markers_per_trait < 1) throw Fault("vocabulary needs marker words");
    if (fillers_per_utterance > 0 && filler_words < 1) throw Fault("filler tokens need filler words");
    if (syllables_per_word < 2) throw Fault("syllables_per_word must be >= 2");
}

bool SynthSpec::set(const std::string& key, const std::string& value) {
    if (key == "n_speakers") n_speakers = kv::parse_size(key, value);
    else if (key == "n_pairs") n_pairs = kv::parse_size(key, value);
    else if (key == "dialogues_per_pair") dialogues_per_pair = kv::parse_size(key, value);
    else if (key == "turns_min") turns_min = kv::parse_size(key, value);
    else if (key == "turns_max") turns_max = kv::parse_size(key, value);
    else if (key == "correlations") {
        const auto v = kv::parse_reals(key, value);
        if (v.size() != correlations.size()) throw Fault("correlations needs 10 comma-separated values");
        std::copy(v.begin(), v.end(), correlations.begin());
    } else if (key == "signal") signal = kv::parse_real(key, value);
    else if (key == "influence") influence = kv::parse_real(key, value);
    else if (key == "noise") noise = kv::parse_real(key, value);
    else if (key == "words_per_polarity") words_per_polarity = kv::parse_size(key, value);
    else if (key == "markers_per_trait") markers_per_trait = kv::parse_size(key, value);
    else if (key == "filler_words") filler_words = kv::parse_size(key, value);
    else if (key == "fillers_per_utterance") fillers_per_utterance = kv::parse_size(key, value);
    else if (key == "syllables_per_word") syllables_per_word = kv::parse_size(key, value);
    else if (key == "seed") seed = kv::parse_u64(key, value);
    else return false;
    return true;
}

nlohmann::json SynthSpec::to_json() const {
    return {{"n_speakers", n_speakers},
            {"n_pairs", n_pairs},
            {"dialogues_per_pair", dialogues_per_pair},
            {"turns_min", turns_min},
            {"turns_max", turns_max},
            {"correlations", correlations},
            {"signal", signal},
            {"influence", influence},
            {"noise", noise},
            {"words_per_polarity", words_per_polarity},
            {"markers_per_trait", markers_per_trait},
            {"filler_words", filler_words},
            {"fillers_per_utterance", fillers_per_utterance},
            {"syllables_per_word", syllables_per_word},
            {"seed", seed}};
}

SynthSpec read_synth_spec(std::istream& in, SynthSpec base) {
    for (const auto& e : kv::read_entries(in)) {
        try {
            if (!base.set(e.key, e.value)) throw Fault("unknown key '" + e.key + "'");
        } catch (const Fault& f) {
            throw Fault("spec line " + std::to_string(e.line) + ": " + f.what());
        }
    }
    base.validate();
    return base;
}

SynthSpec load_synth_spec(const std::filesystem::path& path, SynthSpec base) {
    std::ifstream in(path);
    if (!in) throw Fault("cannot open synthetic spec " + path.string());
    return read_synth_spec(in, std::move(base));
}

Matrix5 copula_correlation(const PairCorrelations& targets, bool* projected) {
    Eigen::Matrix<double, 5, 5> c = Eigen::Matrix<double, 5, 5>::Identity();
    std::size_t k = 0;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j, ++k) {
            const double r = targets[k];
            if (!std::isfinite(r) || r < -1.0 || r > 1.0)
                throw Fault("correlation target " + std::to_string(r) + " is not a correlation");
            c(i, j) = c(j, i) = 2.0 * std::sin(std::numbers::pi * r / 6.0);
        }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> eig(c);
    if (eig.info() != Eigen::Success) throw Fault("eigendecomposition of the correlation target failed");
    const bool needs = eig.eigenvalues().minCoeff() < 0.0;
    if (projected) *projected = needs;
    if (needs) {
        const Eigen::Matrix<double, 5, 1> clipped = eig.eigenvalues().cwiseMax(0.0);
        c = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
        for (int i = 0; i < 5; ++i)
            if (!(c(i, i) > 0.0)) throw Fault("correlation target cannot be projected to a correlation matrix");
        const Eigen::Matrix<double, 5, 1> s = c.diagonal().cwiseSqrt().cwiseInverse();
        c = s.asDiagonal() * c * s.asDiagonal();
    }
    Matrix5 out{};
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) out[i][j] = i == j ? 1.0 : c(i, j);
    return out;
}

double marker_probability(double own, double other, double signal, double influence, double jitter) {
    return std::clamp(0.5 + signal * (own - 0.5) + influence * (other - 0.5) + jitter, 0.0, 1.0);
}

Vocabulary make_vocabulary(const SynthSpec& spec) {
    static constexpr std::string_view kOnsets = "bdfgklmnprstvz";
    static constexpr std::string_view kVowels = "aeiou";
    Rng rng(sub_seed(spec.seed, kVocabStream));
    std::set<std::string> used;
    auto word = [&] {
        for (;;) {
            std::string w;
            for (std::size_t s = 0; s < spec.syllables_per_word; ++s) {
                w += kOnsets[uniform_index(rng, kOnsets.size())];
                w += kVowels[uniform_index(rng, kVowels.size())];
            }
            if (used.insert(w).second) return w;
        }
    };
    Vocabulary v;
    for (std::size_t t = 0; t < 5; ++t)
        for (std::size_t k = 0; k < spec.words_per_polarity; ++k) {
            v.positive[t].push_back(word());
            v.negative[t].push_back(word());
        }
    for (std::size_t k = 0; k < spec.filler_words; ++k) v.fillers.push_back(word());
    return v;
}

SynthResult generate_synthetic_corpus(const SynthSpec& spec, Execution exec) {
    spec.validate();
    bool projected = false;
    const auto copula = copula_correlation(spec.correlations, &projected);

    Eigen::Matrix<double, 5, 5> c;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) c(i, j) = copula[i][j];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> eig(c);
    const Eigen::Matrix<double, 5, 5> root =
        eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

    std::vector<corpus::Speaker> speakers(spec.n_speakers);
    Rng srng(sub_seed(spec.seed, kSpeakerStream));
    for (std::size_t s = 0; s < spec.n_speakers; ++s) {
        Eigen::Matrix<double, 5, 1> g;
        for (int k = 0; k < 5; ++k) g(k) = standard_normal(srng);
        const Eigen::Matrix<double, 5, 1> z = root * g;
        std::array<double, 5> u{};
        for (int k = 0; k < 5; ++k) u[k] = std::clamp(normal_cdf(z(k)), 0.0, 1.0);
        speakers[s] = corpus::Speaker{padded("spk", s, spec.n_speakers), corpus::TraitVector(u)};
    }

    const auto vocab = make_vocabulary(spec);
    const std::size_t n_dialogues = spec.n_pairs * spec.dialogues_per_pair;
    std::vector<corpus::Dialogue> dialogues(n_dialogues);
    for_each_index(n_dialogues, exec, [&](std::size_t j) {
        const std::size_t pair = j / spec.dialogues_per_pair;
        Rng prng(sub_seed(sub_seed(spec.seed, kPairStream), pair));
        const std::size_t a = pair % spec.n_speakers;
        std::size_t b = static_cast<std::size_t>(uniform_index(prng, spec.n_speakers - 1));
        if (b >= a) ++b;

        Rng rng(sub_seed(sub_seed(spec.seed, kDialogueStream), j));
        const auto turns = spec.turns_min + uniform_index(rng, spec.turns_max - spec.turns_min + 1);
        corpus::Dialogue d;
        d.id = padded("dlg", j, n_dialogues);
        d.speaker_a = speakers[a].id;
        d.speaker_b = speakers[b].id;
        for (std::size_t u = 0; u < 2 * turns; ++u) {
            const bool is_a = u % 2 == 0;
            const auto& own = *speakers[is_a ? a : b].traits;
            const auto& other = *speakers[is_a ? b : a].traits;
            std::vector<const std::string*> tokens;
            for (std::size_t t = 0; t < 5; ++t) {
                const double jitter = spec.noise > 0.0 ? spec.noise * standard_normal(rng) : 0.0;
                const double p = marker_probability(own[t], other[t], spec.signal, spec.influence, jitter);
                for (std::size_t m = 0; m < spec.markers_per_trait; ++m) {
                    const auto& pool = uniform01(rng) < p ? vocab.positive[t] : vocab.negative[t];
                    tokens.push_back(&pool[uniform_index(rng, pool.size())]);
                }
            }
            for (std::size_t f = 0; f < spec.fillers_per_utterance; ++f)
                tokens.push_back(&vocab.fillers[uniform_index(rng, vocab.fillers.size())]);
            for (std::size_t i = tokens.size(); i > 1; --i) std::swap(tokens[i - 1], tokens[uniform_index(rng, i)]);
            std::string text;
            for (const auto* w : tokens) {
                if (!text.empty()) text += ' ';
                text += *w;
            }
            d.utterances.push_back(corpus::Utterance{u, is_a ? Role::A : Role::B, std::move(text)});
        }
        dialogues[j] = std::move(d);
    });

    SynthResult out;
    for (auto& s : speakers) out.corpus.add_speaker(s);
    for (auto& d : dialogues) out.corpus.add_dialogue(std::move(d));

    nlohmann::json vj{{"fillers", vocab.fillers}};
    for (std::size_t t = 0; t < 5; ++t)
        vj[corpus::kTraitNames[t]] = {{"positive", vocab.positive[t]}, {"negative", vocab.negative[t]}};
    nlohmann::json measured = nlohmann::json::array();
    if (spec.n_speakers >= 3) {
        for (const auto& pc : corpus::trait_correlations(speakers))
            measured.push_back({{"pair", std::string(corpus::kTraitNames[static_cast<std::size_t>(pc.first)]) +
                                             corpus::kTraitNames[static_cast<std::size_t>(pc.second)]},
                                {"r", pc.r},
                                {"p", pc.p}});
    }
    out.notes = {{"spec", spec.to_json()},
                 {"copula_correlation", copula},
                 {"psd_projected", projected},
                 {"vocabulary", vj},
                 {"measured_correlations", measured}};
    return out;
}

}  // namespace hcgnn::exp
