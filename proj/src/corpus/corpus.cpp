// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/corpus/corpus.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "hcgnn/diffcore/error.hpp"

namespace hcgnn::corpus {

using nlohmann::json;

TraitVector::TraitVector(const std::array<double, kNumTraits>& values) : values_(values) {
    for (std::size_t i = 0; i < kNumTraits; ++i)
        if (!std::isfinite(values[i]) || values[i] < 0.0 || values[i] > 1.0)
            throw Fault(std::string("trait ") + kTraitNames[i] + " = " + std::to_string(values[i]) +
                        " outside [0,1]");
}

double normalize_trait(double raw, Trait trait) {
    if (!(raw >= 1.0 && raw <= 7.0))
        throw Fault(std::string("raw trait ") + kTraitNames[static_cast<std::size_t>(trait)] +
                    " = " + std::to_string(raw) + " outside [1,7]");
    return (raw - 1.0) / 6.0;
}

char role_char(Role r) { return r == Role::A ? 'A' : 'B'; }

Role parse_role(std::string_view s) {
    if (s == "A") return Role::A;
    if (s == "B") return Role::B;
    throw Fault("unknown role '" + std::string(s) + "'");
}

std::size_t Dialogue::n_turns() const {
    return monologue ? utterances.size() : utterances.size() / 2;
}

void validate_dialogue(const Dialogue& d) {
    const std::string where = "dialogue '" + d.id + "': ";
    if (d.id.empty()) throw Fault("dialogue with empty id");
    if (!d.monologue && d.speaker_a == d.speaker_b)
        throw Fault(where + "speaker_a and speaker_b are the same speaker");
    for (std::size_t i = 0; i < d.utterances.size(); ++i) {
        const auto& u = d.utterances[i];
        if (u.index != i) throw Fault(where + "utterance indices must be consecutive from 0");
        const Role expect = (d.monologue || i % 2 == 0) ? Role::A : Role::B;
        if (u.role != expect)
            throw Fault(where + "roles must alternate starting with A (utterance " +
                        std::to_string(i) + ")");
    }
    if (!d.monologue && d.utterances.size() % 2 == 1 && !d.truncated)
        throw Fault(where + "unpaired trailing utterance in a dialogue not marked truncated");
}

void Corpus::add_speaker(Speaker s) {
    if (s.id.empty()) throw Fault("speaker with empty id");
    if (speaker_index_.count(s.id)) throw Fault("duplicate speaker id '" + s.id + "'");
    speaker_index_.emplace(s.id, speakers_.size());
    speakers_.push_back(std::move(s));
}

void Corpus::add_dialogue(Dialogue d) {
    validate_dialogue(d);
    if (!has_speaker(d.speaker_a))
        throw Fault("dialogue '" + d.id + "' references unknown speaker '" + d.speaker_a + "'");
    if (!d.monologue && !has_speaker(d.speaker_b))
        throw Fault("dialogue '" + d.id + "' references unknown speaker '" + d.speaker_b + "'");
    if (dialogue_index_.count(d.id)) throw Fault("duplicate dialogue id '" + d.id + "'");
    dialogue_index_.emplace(d.id, dialogues_.size());
    dialogues_.push_back(std::move(d));
}

const Dialogue& Corpus::dialogue(std::string_view id) const {
    auto it = dialogue_index_.find(std::string(id));
    if (it == dialogue_index_.end()) throw Fault("unknown dialogue '" + std::string(id) + "'");
    return dialogues_[it->second];
}

bool Corpus::has_speaker(std::string_view id) const {
    return speaker_index_.count(std::string(id)) > 0;
}

const Speaker& Corpus::speaker(std::string_view id) const {
    auto it = speaker_index_.find(std::string(id));
    if (it == speaker_index_.end()) throw Fault("unknown speaker '" + std::string(id) + "'");
    return speakers_[it->second];
}

const TraitVector& Corpus::label_of(const Dialogue& d) const {
    const auto& s = speaker(d.speaker_a);
    if (!s.traits) throw Fault("speaker '" + s.id + "' has no traits to use as a label");
    return *s.traits;
}

namespace {

TraitVector traits_from_json(const json& j) {
    std::array<double, kNumTraits> v{};
    if (j.contains("traits_raw")) {
        const auto& a = j.at("traits_raw");
        if (!a.is_array() || a.size() != kNumTraits) throw Fault("traits_raw needs 5 numbers");
        for (std::size_t i = 0; i < kNumTraits; ++i)
            v[i] = normalize_trait(a[i].get<double>(), static_cast<Trait>(i));
    } else {
        const auto& a = j.at("traits");
        if (!a.is_array() || a.size() != kNumTraits) throw Fault("traits needs 5 numbers");
        for (std::size_t i = 0; i < kNumTraits; ++i) v[i] = a[i].get<double>();
    }
    return TraitVector(v);
}

struct PendingDialogue {
    std::size_t line;
    Dialogue dialogue;
};

}  // namespace

Corpus read_corpus(std::istream& in) {
    Corpus corpus;
    std::vector<PendingDialogue> pending;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = json::parse(text);
            const auto type = j.at("type").get<std::string>();
            if (type == "speaker") {
                Speaker s;
                s.id = j.at("id").get<std::string>();
                if (j.contains("traits_raw") || (j.contains("traits") && !j.at("traits").is_null()))
                    s.traits = traits_from_json(j);
                corpus.add_speaker(std::move(s));
            } else if (type == "dialogue") {
                Dialogue d;
                d.id = j.at("id").get<std::string>();
                d.speaker_a = j.at("speaker_a").get<std::string>();
                d.monologue = j.value("monologue", false);
                d.speaker_b = d.monologue ? j.value("speaker_b", std::string{})
                                          : j.at("speaker_b").get<std::string>();
                d.truncated = j.value("truncated", false);
                std::size_t idx = 0;
                for (const auto& u : j.at("utterances"))
                    d.utterances.push_back(Utterance{idx++, parse_role(u.at("role").get<std::string>()),
                                                     u.at("text").get<std::string>()});
                validate_dialogue(d);
                pending.push_back({line, std::move(d)});
            } else {
                throw Fault("unknown record type '" + type + "'");
            }
        } catch (const json::exception& e) {
            throw Fault("corpus line " + std::to_string(line) + ": " + e.what());
        } catch (const Fault& e) {
            throw Fault("corpus line " + std::to_string(line) + ": " + e.what());
        }
    }
    for (auto& p : pending) {
        try {
            corpus.add_dialogue(std::move(p.dialogue));
        } catch (const Fault& e) {
            throw Fault("corpus line " + std::to_string(p.line) + ": " + e.what());
        }
    }
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Fault("cannot open corpus file " + path.string());
    return read_corpus(in);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
    for (const auto& s : corpus.speakers()) {
        json j{{"type", "speaker"}, {"id", s.id}};
        if (s.traits) j["traits"] = s.traits->values();
        out << j.dump() << '\n';
    }
    for (const auto& d : corpus.dialogues()) {
        json utts = json::array();
        for (const auto& u : d.utterances)
            utts.push_back({{"role", std::string(1, role_char(u.role))}, {"text", u.text}});
        json j{{"type", "dialogue"},
               {"id", d.id},
               {"speaker_a", d.speaker_a},
               {"speaker_b", d.speaker_b},
               {"utterances", std::move(utts)}};
        if (d.truncated) j["truncated"] = true;
        if (d.monologue) j["monologue"] = true;
        out << j.dump() << '\n';
    }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Fault("cannot write corpus file " + path.string());
    write_corpus(corpus, out);
}

Dialogue truncate_to_turns(const Dialogue& d, std::size_t k) {
    if (k == 0) throw Fault("truncate_to_turns needs k >= 1");
    if (k >= d.n_turns()) return d;
    Dialogue out = d;
    out.utterances.resize(d.monologue ? k : 2 * k);
    out.truncated = true;
    return out;
}

std::vector<Utterance> to_monologue(const Dialogue& d, Role role) {
    std::vector<Utterance> out;
    for (const auto& u : d.utterances)
        if (u.role == role) out.push_back(u);
    return out;
}

Dialogue monologue_of(const Dialogue& d, Role role) {
    if (d.monologue) return d;
    Dialogue m;
    m.id = d.id;
    m.speaker_a = role == Role::A ? d.speaker_a : d.speaker_b;
    m.monologue = true;
    m.truncated = d.truncated;
    for (auto u : to_monologue(d, role)) {
        u.index = m.utterances.size();
        u.role = Role::A;
        m.utterances.push_back(std::move(u));
    }
    return m;
}

}  // namespace hcgnn::corpus
