// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/corpus/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <numeric>

#include "hcgnn/diffcore/error.hpp"
#include "hcgnn/diffcore/rng.hpp"

namespace hcgnn::corpus {

const std::vector<std::string>& SplitAssignment::ids(Partition p) const {
    switch (p) {
        case Partition::Train: return train;
        case Partition::Valid: return valid;
        case Partition::Test: return test;
    }
    throw Fault("bad partition");
}

bool SplitAssignment::contains(Partition p, const std::string& speaker_id) const {
    const auto& v = ids(p);
    return std::binary_search(v.begin(), v.end(), speaker_id);
}

Partition SplitAssignment::partition_of(const std::string& speaker_id) const {
    for (auto p : {Partition::Train, Partition::Valid, Partition::Test})
        if (contains(p, speaker_id)) return p;
    throw Fault("speaker '" + speaker_id + "' is not in the split");
}

namespace {

// Largest-remainder apportionment of n speakers, at least one per partition.
std::array<std::size_t, 3> partition_sizes(std::size_t n, const std::array<double, 3>& ratios) {
    const double total = ratios[0] + ratios[1] + ratios[2];
    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> frac{};
    std::size_t used = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double exact = static_cast<double>(n) * ratios[i] / total;
        sizes[i] = static_cast<std::size_t>(std::floor(exact));
        frac[i] = exact - std::floor(exact);
        used += sizes[i];
    }
    while (used < n) {
        const auto i = static_cast<std::size_t>(std::max_element(frac.begin(), frac.end()) - frac.begin());
        ++sizes[i];
        frac[i] = -1.0;
        ++used;
    }
    for (std::size_t i = 0; i < 3; ++i) {
        while (sizes[i] == 0) {
            const auto j = static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
            --sizes[j];
            ++sizes[i];
        }
    }
    return sizes;
}

}  // namespace

SplitAssignment speaker_split(const Corpus& corpus, const SplitOptions& opts) {
    for (double r : opts.ratios)
        if (!(r > 0.0)) throw Fault("split ratios must be positive");
    if (opts.trials == 0) throw Fault("speaker_split needs at least one trial");

    std::map<std::string, std::size_t> counts;  // initiating speaker → dialogues
    for (const auto& d : corpus.dialogues()) ++counts[d.speaker_a];
    if (counts.size() < 3)
        throw Fault("speaker_split needs at least 3 initiating speakers, got " +
                    std::to_string(counts.size()));

    std::vector<std::string> ids;
    std::vector<double> weight;
    double total_dialogues = 0.0;
    for (const auto& [id, c] : counts) {
        ids.push_back(id);
        weight.push_back(static_cast<double>(c));
        total_dialogues += static_cast<double>(c);
    }
    const auto sizes = partition_sizes(ids.size(), opts.ratios);
    const double ratio_total = opts.ratios[0] + opts.ratios[1] + opts.ratios[2];

    Rng rng(opts.seed);
    SplitAssignment best;
    std::vector<std::size_t> best_perm;
    std::vector<std::size_t> perm(ids.size());
    for (std::size_t trial = 0; trial < opts.trials; ++trial) {
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = perm.size(); i > 1; --i)
            std::swap(perm[i - 1], perm[uniform_index(rng, i)]);

        std::array<double, 3> dialog_prop{}, speaker_prop{};
        std::size_t pos = 0;
        for (std::size_t p = 0; p < 3; ++p) {
            for (std::size_t k = 0; k < sizes[p]; ++k) dialog_prop[p] += weight[perm[pos++]];
            dialog_prop[p] /= total_dialogues;
            speaker_prop[p] = static_cast<double>(sizes[p]) / static_cast<double>(ids.size());
        }
        const auto& measured = opts.metric == SplitMetric::DialogueCounts ? dialog_prop : speaker_prop;
        double dev = 0.0;
        for (std::size_t p = 0; p < 3; ++p) dev += std::fabs(measured[p] - opts.ratios[p] / ratio_total);
        best.trial_deviations.push_back(dev);
        if (trial == 0 || dev < best.deviation) {
            best.deviation = dev;
            best.chosen_trial = trial;
            best.proportions = dialog_prop;
            best_perm = perm;
        }
    }

    std::size_t pos = 0;
    for (std::size_t p = 0; p < 3; ++p) {
        auto& dst = p == 0 ? best.train : (p == 1 ? best.valid : best.test);
        for (std::size_t k = 0; k < sizes[p]; ++k) dst.push_back(ids[best_perm[pos++]]);
        std::sort(dst.begin(), dst.end());
    }
    return best;
}

std::vector<const Dialogue*> dialogues_in(const Corpus& corpus, const SplitAssignment& split,
                                          Partition p) {
    std::vector<const Dialogue*> out;
    for (const auto& d : corpus.dialogues())
        if (split.contains(p, d.speaker_a)) out.push_back(&d);
    return out;
}

void save_split(const SplitAssignment& split, const std::filesystem::path& path) {
    nlohmann::json j{{"train", split.train},
                     {"valid", split.valid},
                     {"test", split.test},
                     {"proportions", split.proportions},
                     {"deviation", split.deviation},
                     {"chosen_trial", split.chosen_trial},
                     {"trial_deviations", split.trial_deviations}};
    std::ofstream out(path);
    if (!out) throw Fault("cannot write split file " + path.string());
    out << j.dump(2) << '\n';
}

SplitAssignment load_split(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Fault("cannot open split file " + path.string());
    try {
        const auto j = nlohmann::json::parse(in);
        SplitAssignment s;
        s.train = j.at("train").get<std::vector<std::string>>();
        s.valid = j.at("valid").get<std::vector<std::string>>();
        s.test = j.at("test").get<std::vector<std::string>>();
        for (auto* v : {&s.train, &s.valid, &s.test}) std::sort(v->begin(), v->end());
        s.proportions = j.value("proportions", std::array<double, 3>{});
        s.deviation = j.value("deviation", 0.0);
        s.chosen_trial = j.value("chosen_trial", std::size_t{0});
        s.trial_deviations = j.value("trial_deviations", std::vector<double>{});
        for (const auto& id : s.train)
            if (s.contains(Partition::Valid, id) || s.contains(Partition::Test, id))
                throw Fault("split file lists speaker '" + id + "' in two partitions");
        for (const auto& id : s.valid)
            if (s.contains(Partition::Test, id))
                throw Fault("split file lists speaker '" + id + "' in two partitions");
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Fault("split file " + path.string() + ": " + e.what());
    }
}

}  // namespace hcgnn::corpus
