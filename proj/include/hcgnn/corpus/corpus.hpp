// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hcgnn::corpus {

/// Big-Five traits in canonical order.
enum class Trait : std::size_t { N = 0, E, O, A, C };
inline constexpr std::size_t kNumTraits = 5;
inline constexpr std::array<const char*, kNumTraits> kTraitNames{"N", "E", "O", "A", "C"};

/// Normalized Big-Five scores, each in [0,1], order (N,E,O,A,C).
class TraitVector {
public:
    TraitVector() = default;
    /// Throws if any component lies outside [0,1] or is non-finite.
    explicit TraitVector(const std::array<double, kNumTraits>& values);

    double operator[](std::size_t i) const { return values_[i]; }
    double operator[](Trait t) const { return values_[static_cast<std::size_t>(t)]; }
    const std::array<double, kNumTraits>& values() const noexcept { return values_; }

    bool operator==(const TraitVector&) const = default;

private:
    std::array<double, kNumTraits> values_{};
};

/// (raw − 1) / 6 for questionnaire scores on the 1..7 scale.
double normalize_trait(double raw, Trait trait = Trait::N);

enum class Role { A, B };
char role_char(Role r);
Role parse_role(std::string_view s);

struct Speaker {
    std::string id;
    /// Unset for synthetic interlocutors whose traits are undefined.
    std::optional<TraitVector> traits;

    bool operator==(const Speaker&) const = default;
};

struct Utterance {
    std::size_t index = 0;
    Role role = Role::A;
    std::string text;

    bool operator==(const Utterance&) const = default;
};

/// Alternating A/B utterances. A monologue holds a single speaker's
/// utterances, all with role A.
struct Dialogue {
    std::string id;
    std::string speaker_a;
    std::string speaker_b;
    std::vector<Utterance> utterances;
    /// Set when produced by truncation; only then may a trailing unpaired A
    /// utterance remain.
    bool truncated = false;
    bool monologue = false;

    /// One turn is an A utterance followed by a B utterance; for monologues,
    /// one utterance.
    std::size_t n_turns() const;

    bool operator==(const Dialogue&) const = default;
};

/// Throws a Fault describing the first broken structural invariant.
void validate_dialogue(const Dialogue& d);

/// Immutable after construction; safe for concurrent readers.
class Corpus {
public:
    /// Throws on duplicate id.
    void add_speaker(Speaker s);
    /// Validates structure and that both speakers are known.
    void add_dialogue(Dialogue d);

    const std::vector<Speaker>& speakers() const noexcept { return speakers_; }
    const std::vector<Dialogue>& dialogues() const noexcept { return dialogues_; }

    bool has_speaker(std::string_view id) const;
    const Speaker& speaker(std::string_view id) const;
    const Dialogue& dialogue(std::string_view id) const;
    /// Traits of the initiating speaker; throws if unset.
    const TraitVector& label_of(const Dialogue& d) const;

    bool operator==(const Corpus& other) const {
        return speakers_ == other.speakers_ && dialogues_ == other.dialogues_;
    }

private:
    std::vector<Speaker> speakers_;
    std::vector<Dialogue> dialogues_;
    std::unordered_map<std::string, std::size_t> speaker_index_;
    std::unordered_map<std::string, std::size_t> dialogue_index_;
};

/// Parses corpus JSONL. Faults carry the 1-based line number.
Corpus read_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);
void write_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// First min(k, n_turns) turns; flagged truncated when anything is dropped.
Dialogue truncate_to_turns(const Dialogue& d, std::size_t k);

/// The given speaker's utterances in order, original indices kept.
std::vector<Utterance> to_monologue(const Dialogue& d, Role role);

/// to_monologue wrapped as a re-indexed monologue Dialogue whose speaker_a
/// is the chosen speaker.
Dialogue monologue_of(const Dialogue& d, Role role);

}  // namespace hcgnn::corpus
