// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "hcgnn/diffcore/stats.hpp"

namespace hcgnn::exp {

using TraitArray = std::array<double, 5>;

/// Per-trait training-set median.
TraitArray median_thresholds(const std::vector<TraitArray>& labels);

/// value > threshold ⇒ 1.
std::vector<int> binarize(const std::vector<double>& values, double threshold);

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);
/// Mean of sensitivity and specificity. With one class absent from the
/// truth, the rate of the present class.
double balanced_accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

struct TraitMetrics {
    double accuracy = 0.0;
    double balanced_accuracy = 0.0;
    /// Unset when n < 3 or either side is constant.
    std::optional<stats::Correlation> pearson;
    std::optional<stats::Correlation> spearman;

    bool operator==(const TraitMetrics&) const;
};

struct MetricsReport {
    std::array<TraitMetrics, 5> traits;
    double avg_accuracy = 0.0;
    double avg_balanced_accuracy = 0.0;
    std::size_t n = 0;

    nlohmann::json to_json() const;
    bool operator==(const MetricsReport&) const = default;
};

MetricsReport compute_metrics(const std::vector<TraitArray>& pred, const std::vector<TraitArray>& truth,
                              const TraitArray& thresholds);

}  // namespace hcgnn::exp
