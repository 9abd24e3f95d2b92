// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/augment/augment.hpp"

#include <algorithm>
#include <istream>
#include <json.hpp>
#include <map>
#include <ostream>

#include "hcgnn/diffcore/error.hpp"

namespace hcgnn::augment {

using corpus::Role;

std::vector<Chunk> chunk_dialogue(const Dialogue& d, std::size_t t) {
    if (t == 0) throw Fault("chunk size t must be >= 1");
    const std::size_t per_chunk = t * (d.monologue ? 1 : 2);
    std::vector<Chunk> out;
    for (std::size_t start = 0; start < d.utterances.size(); start += per_chunk) {
        const auto end = std::min(start + per_chunk, d.utterances.size());
        Chunk c{d.id, out.size(), {d.utterances.begin() + static_cast<long>(start),
                                   d.utterances.begin() + static_cast<long>(end)},
                end - start < per_chunk};
        out.push_back(std::move(c));
    }
    return out;
}

TraitVector interpolate_labels(const TraitVector& y1, const TraitVector& y2, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0))
        throw Fault("fusion ratio beta = " + std::to_string(beta) + " outside [0,1]");
    std::array<double, corpus::kNumTraits> v{};
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double mix = beta * y1[i] + (1.0 - beta) * y2[i];
        // Rounding may step one ulp outside the segment; pin it back.
        v[i] = std::clamp(mix, std::min(y1[i], y2[i]), std::max(y1[i], y2[i]));
    }
    return TraitVector(v);
}

namespace {

void append_reindexed(std::vector<Utterance>& dst, const std::vector<Utterance>& src) {
    for (auto u : src) {
        u.index = dst.size();
        dst.push_back(std::move(u));
    }
}

ChoiceMask draw_mask(std::size_t l, double beta, Rng& rng) {
    if (!(beta >= 0.0 && beta <= 1.0))
        throw Fault("fusion ratio beta = " + std::to_string(beta) + " outside [0,1]");
    ChoiceMask mask(l);
    for (auto& m : mask) m = uniform01(rng) < beta ? 1 : 0;
    return mask;
}

Fusion fuse_monologues_with_mask(const std::vector<Utterance>& m1, const std::vector<Utterance>& m2,
                                 const ChoiceMask& mask) {
    if (mask.empty()) throw Fault("fusion length is zero");
    if (mask.size() > m1.size() || mask.size() > m2.size())
        throw Fault("fusion mask longer than a source monologue");
    Fusion f{{}, mask};
    for (std::size_t i = 0; i < mask.size(); ++i) {
        auto u = mask[i] ? m1[i] : m2[i];
        u.index = i;
        u.role = Role::A;
        f.utterances.push_back(std::move(u));
    }
    return f;
}

}  // namespace

Fusion fuse_with_mask(const Dialogue& d1, const Dialogue& d2, const ChoiceMask& mask, std::size_t t) {
    const auto c1 = chunk_dialogue(d1, t);
    const auto c2 = chunk_dialogue(d2, t);
    if (mask.empty()) throw Fault("fusion length is zero");
    if (mask.size() > c1.size() || mask.size() > c2.size())
        throw Fault("fusion mask longer than the chunk count of a source dialogue");
    Fusion f{{}, mask};
    for (std::size_t i = 0; i < mask.size(); ++i)
        append_reindexed(f.utterances, mask[i] ? c1[i].utterances : c2[i].utterances);
    return f;
}

Fusion fuse_dialogues(const Dialogue& d1, const Dialogue& d2, double beta, Rng& rng, std::size_t t) {
    const auto l = std::min(chunk_dialogue(d1, t).size(), chunk_dialogue(d2, t).size());
    if (l == 0) throw Fault("fusion length is zero: a source dialogue is empty");
    return fuse_with_mask(d1, d2, draw_mask(l, beta, rng), t);
}

Fusion fuse_monologues(const std::vector<Utterance>& m1, const std::vector<Utterance>& m2,
                       double beta, Rng& rng) {
    const auto l = std::min(m1.size(), m2.size());
    if (l == 0) throw Fault("fusion length is zero: a source monologue is empty");
    return fuse_monologues_with_mask(m1, m2, draw_mask(l, beta, rng));
}

void AugmentOptions::validate() const {
    if (beta_mode == BetaMode::Fixed && !(beta0 >= 0.0 && beta0 <= 1.0))
        throw Fault("fixed beta must lie in [0,1]");
    if (t < 1) throw Fault("chunk turns t must be >= 1");
    if (truncate && t_min < 2) throw Fault("t_min must be >= 2");
    if (id_prefix.empty()) throw Fault("synthetic id prefix must be nonempty");
}

namespace {

Dialogue source_view(const Dialogue& d, Setting setting) {
    return setting == Setting::Monologue ? corpus::monologue_of(d, Role::A) : d;
}

SyntheticSample assemble(const Corpus& source, const Dialogue& d1, const Dialogue& d2, double beta,
                         const Fusion& fusion, std::optional<std::size_t> trunc,
                         const std::string& syn_id, Setting setting) {
    SyntheticSample s;
    s.dialogue.id = syn_id;
    s.dialogue.speaker_a = syn_id + "-a";
    s.dialogue.speaker_b = setting == Setting::Monologue ? std::string{} : syn_id + "-b";
    s.dialogue.monologue = setting == Setting::Monologue;
    s.dialogue.utterances = fusion.utterances;
    s.dialogue.truncated = !s.dialogue.monologue && s.dialogue.utterances.size() % 2 == 1;
    if (trunc) s.dialogue = corpus::truncate_to_turns(s.dialogue, *trunc);
    s.label = interpolate_labels(source.label_of(d1), source.label_of(d2), beta);
    s.provenance = Provenance{syn_id, d1.id, d2.id, beta, fusion.mask, trunc};
    return s;
}

}  // namespace

std::vector<SyntheticSample> synthesize(const Corpus& source, const std::vector<const Dialogue*>& train,
                                        const AugmentOptions& opts, Execution exec) {
    opts.validate();
    if (opts.count == 0) return {};
    if (train.empty()) throw Fault("augmentation needs at least one training dialogue");

    std::map<std::string, std::vector<std::size_t>> by_speaker;
    for (std::size_t i = 0; i < train.size(); ++i) by_speaker[train[i]->speaker_a].push_back(i);
    if (opts.speaker_mode == SpeakerMode::CrossSpeaker && by_speaker.size() < 2)
        throw Fault("cross-speaker augmentation needs at least 2 distinct initiating speakers");

    std::vector<Dialogue> views;
    views.reserve(train.size());
    for (const auto* d : train) views.push_back(source_view(*d, opts.setting));

    std::vector<SyntheticSample> out(opts.count);
    for_each_index(opts.count, exec, [&](std::size_t k) {
        Rng rng(sub_seed(opts.seed, k));
        const auto i1 = static_cast<std::size_t>(uniform_index(rng, train.size()));
        std::size_t i2;
        if (opts.speaker_mode == SpeakerMode::CrossSpeaker) {
            i2 = static_cast<std::size_t>(uniform_index(rng, train.size()));
        } else {
            const auto& same = by_speaker.at(train[i1]->speaker_a);
            if (same.size() == 1) {
                i2 = i1;
            } else {
                // Another dialogue of the same speaker.
                auto j = static_cast<std::size_t>(uniform_index(rng, same.size() - 1));
                const auto self = static_cast<std::size_t>(
                    std::find(same.begin(), same.end(), i1) - same.begin());
                if (j >= self) ++j;
                i2 = same[j];
            }
        }
        const double beta = opts.beta_mode == BetaMode::Fixed ? opts.beta0 : uniform01(rng);
        const auto& v1 = views[i1];
        const auto& v2 = views[i2];
        const auto fusion = opts.setting == Setting::Monologue
                                ? fuse_monologues(v1.utterances, v2.utterances, beta, rng)
                                : fuse_dialogues(v1, v2, beta, rng, opts.t);

        std::optional<std::size_t> trunc;
        if (opts.truncate) {
            Dialogue probe;
            probe.monologue = opts.setting == Setting::Monologue;
            probe.utterances = fusion.utterances;
            const auto turns = probe.n_turns();
            if (turns >= opts.t_min)
                trunc = opts.t_min + static_cast<std::size_t>(uniform_index(rng, turns - opts.t_min + 1));
        }
        out[k] = assemble(source, *train[i1], *train[i2], beta, fusion, trunc,
                          opts.id_prefix + std::to_string(k), opts.setting);
    });
    return out;
}

SyntheticSample replay(const Corpus& source, const Provenance& prov, std::size_t t, Setting setting) {
    const auto& d1 = source.dialogue(prov.src1);
    const auto& d2 = source.dialogue(prov.src2);
    const auto v1 = source_view(d1, setting);
    const auto v2 = source_view(d2, setting);
    const auto fusion = setting == Setting::Monologue
                            ? fuse_monologues_with_mask(v1.utterances, v2.utterances, prov.mask)
                            : fuse_with_mask(v1, v2, prov.mask, t);
    return assemble(source, d1, d2, prov.beta, fusion, prov.trunc_turns, prov.syn_id, setting);
}

Corpus to_corpus(const std::vector<SyntheticSample>& samples) {
    Corpus c;
    for (const auto& s : samples) {
        c.add_speaker(corpus::Speaker{s.dialogue.speaker_a, s.label});
        if (!s.dialogue.monologue) c.add_speaker(corpus::Speaker{s.dialogue.speaker_b, std::nullopt});
        c.add_dialogue(s.dialogue);
    }
    return c;
}

void write_provenance(const std::vector<SyntheticSample>& samples, std::ostream& out) {
    for (const auto& s : samples) {
        const auto& p = s.provenance;
        nlohmann::json j{{"syn_id", p.syn_id}, {"src1", p.src1}, {"src2", p.src2},
                         {"beta", p.beta},     {"mask", p.mask}, {"trunc_turns", nullptr}};
        if (p.trunc_turns) j["trunc_turns"] = *p.trunc_turns;
        out << j.dump() << '\n';
    }
}

std::vector<Provenance> read_provenance(std::istream& in) {
    std::vector<Provenance> out;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(text);
            Provenance p;
            p.syn_id = j.at("syn_id").get<std::string>();
            p.src1 = j.at("src1").get<std::string>();
            p.src2 = j.at("src2").get<std::string>();
            p.beta = j.at("beta").get<double>();
            p.mask = j.at("mask").get<ChoiceMask>();
            if (!j.at("trunc_turns").is_null()) p.trunc_turns = j.at("trunc_turns").get<std::size_t>();
            out.push_back(std::move(p));
        } catch (const nlohmann::json::exception& e) {
            throw Fault("provenance line " + std::to_string(line) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace hcgnn::augment
