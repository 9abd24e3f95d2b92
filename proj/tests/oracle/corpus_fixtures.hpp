#pragma once

#include <string>

#include "hcgnn/corpus/corpus.hpp"
#include "hcgnn/diffcore/rng.hpp"

namespace testutil {

using hcgnn::corpus::Corpus;
using hcgnn::corpus::Dialogue;
using hcgnn::corpus::Role;
using hcgnn::corpus::Speaker;
using hcgnn::corpus::TraitVector;
using hcgnn::corpus::Utterance;

inline Dialogue make_dialogue(const std::string& id, const std::string& a, const std::string& b,
                              std::size_t turns, const std::string& tag = "") {
    Dialogue d{id, a, b, {}, false, false};
    for (std::size_t t = 0; t < turns; ++t) {
        d.utterances.push_back({2 * t, Role::A, tag + id + " a" + std::to_string(t)});
        d.utterances.push_back({2 * t + 1, Role::B, tag + id + " b" + std::to_string(t)});
    }
    return d;
}

inline TraitVector random_traits(hcgnn::Rng& rng) {
    std::array<double, 5> v{};
    for (auto& x : v) x = hcgnn::uniform01(rng);
    return TraitVector(v);
}

/// `n_speakers` speakers with random traits; speaker i initiates
/// dialogues_for(i) dialogues with partner (i+1) mod n.
template <class F>
Corpus ring_corpus(std::size_t n_speakers, F dialogues_for, std::size_t turns,
                   std::uint64_t seed = 1) {
    hcgnn::Rng rng(seed);
    Corpus c;
    for (std::size_t i = 0; i < n_speakers; ++i)
        c.add_speaker(Speaker{"s" + std::to_string(i), random_traits(rng)});
    for (std::size_t i = 0; i < n_speakers; ++i)
        for (std::size_t k = 0; k < dialogues_for(i); ++k)
            c.add_dialogue(make_dialogue("d" + std::to_string(i) + "_" + std::to_string(k),
                                         "s" + std::to_string(i),
                                         "s" + std::to_string((i + 1) % n_speakers), turns));
    return c;
}

}  // namespace testutil
