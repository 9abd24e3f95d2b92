// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hcgnn/corpus/corpus.hpp"

namespace hcgnn::corpus {

enum class Partition { Train = 0, Valid = 1, Test = 2 };

/// What the realized proportions are measured on when ranking trials.
enum class SplitMetric { DialogueCounts, SpeakerCounts };

struct SplitOptions {
    std::array<double, 3> ratios{8.0, 1.0, 1.0};
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    SplitMetric metric = SplitMetric::DialogueCounts;
};

/// Partition of initiating speakers into train/valid/test.
struct SplitAssignment {
    std::vector<std::string> train, valid, test;  // sorted ids
    /// Realized dialogue-count proportions (train, valid, test).
    std::array<double, 3> proportions{};
    /// L1 distance between realized and target proportions under the metric.
    double deviation = 0.0;
    std::size_t chosen_trial = 0;
    /// Deviation of every trial, in trial order.
    std::vector<double> trial_deviations;

    const std::vector<std::string>& ids(Partition p) const;
    /// Throws if the speaker is in none of the partitions.
    Partition partition_of(const std::string& speaker_id) const;
    bool contains(Partition p, const std::string& speaker_id) const;
};

/// Among `trials` seeded random speaker partitions with counts in the given
/// ratio, returns the one whose realized proportions are closest (L1) to the
/// targets. Earliest trial wins ties. Deterministic given the seed.
SplitAssignment speaker_split(const Corpus& corpus, const SplitOptions& opts);

/// Dialogues of `corpus` whose initiating speaker is in partition `p`.
std::vector<const Dialogue*> dialogues_in(const Corpus& corpus, const SplitAssignment& split,
                                          Partition p);

void save_split(const SplitAssignment& split, const std::filesystem::path& path);
SplitAssignment load_split(const std::filesystem::path& path);

}  // namespace hcgnn::corpus
