// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hcgnn/corpus/corpus.hpp"
#include "hcgnn/diffcore/parallel.hpp"
#include "hcgnn/diffcore/rng.hpp"

namespace hcgnn::augment {

using corpus::Corpus;
using corpus::Dialogue;
using corpus::TraitVector;
using corpus::Utterance;

/// t consecutive turns of one dialogue (the last chunk may be shorter).
struct Chunk {
    std::string source_id;
    std::size_t index = 0;
    std::vector<Utterance> utterances;
    bool partial = false;
};

/// floor(n/t) full chunks plus a trailing partial chunk when t ∤ n. For
/// monologues a turn is one utterance.
std::vector<Chunk> chunk_dialogue(const Dialogue& d, std::size_t t);

/// β·y1 + (1−β)·y2 componentwise, β ∈ [0,1].
TraitVector interpolate_labels(const TraitVector& y1, const TraitVector& y2, double beta);

/// Per-index choice: 1 = unit taken from the first source.
using ChoiceMask = std::vector<int>;

struct Fusion {
    std::vector<Utterance> utterances;  // re-indexed from 0
    ChoiceMask mask;
};

/// Chunk-level fusion with an explicit mask over the first mask.size()
/// chunk indices; both dialogues must have at least that many chunks.
Fusion fuse_with_mask(const Dialogue& d1, const Dialogue& d2, const ChoiceMask& mask, std::size_t t);

/// Each of the l = min(l1, l2) chunk indices takes D1's chunk with
/// probability β (independent draws), else D2's.
Fusion fuse_dialogues(const Dialogue& d1, const Dialogue& d2, double beta, Rng& rng, std::size_t t);

/// Utterance-level fusion of two monologues; length min(|M1|, |M2|).
Fusion fuse_monologues(const std::vector<Utterance>& m1, const std::vector<Utterance>& m2,
                       double beta, Rng& rng);

enum class BetaMode { Uniform01, Fixed };
enum class SpeakerMode { CrossSpeaker, SameSpeaker };
enum class Setting { Dialogue, Monologue };

struct AugmentOptions {
    BetaMode beta_mode = BetaMode::Uniform01;
    double beta0 = 0.5;
    SpeakerMode speaker_mode = SpeakerMode::CrossSpeaker;
    bool truncate = false;
    std::size_t t_min = 2;
    /// Turns per chunk.
    std::size_t t = 3;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    Setting setting = Setting::Dialogue;
    std::string id_prefix = "syn";

    /// Throws on out-of-range fields.
    void validate() const;
};

struct Provenance {
    std::string syn_id;
    std::string src1;
    std::string src2;
    double beta = 0.0;
    ChoiceMask mask;
    std::optional<std::size_t> trunc_turns;

    bool operator==(const Provenance&) const = default;
};

struct SyntheticSample {
    /// Synthetic ids: dialogue `syn_id`, speakers `syn_id-a` / `syn_id-b`.
    Dialogue dialogue;
    TraitVector label;
    Provenance provenance;
};

/// `opts.count` samples drawn from `train` (dialogues of the training
/// partition). Sample i uses its own sub-seed, so the parallel and serial
/// paths give identical output in index order.
std::vector<SyntheticSample> synthesize(const Corpus& source, const std::vector<const Dialogue*>& train,
                                        const AugmentOptions& opts,
                                        Execution exec = Execution::Parallel);

/// Rebuilds a sample from its provenance record alone.
SyntheticSample replay(const Corpus& source, const Provenance& prov, std::size_t t, Setting setting);

/// Synthetic speakers and dialogues as a corpus. Speaker b of a synthetic
/// dialogue carries no traits.
Corpus to_corpus(const std::vector<SyntheticSample>& samples);

void write_provenance(const std::vector<SyntheticSample>& samples, std::ostream& out);
std::vector<Provenance> read_provenance(std::istream& in);

}  // namespace hcgnn::augment
