// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace hcgnn::stats {

struct Correlation {
    double r = 0.0;
    /// Two-sided p-value from the t statistic with n−2 degrees of freedom.
    double p = 1.0;
};

/// Pearson product-moment correlation. Needs n ≥ 3 and nonzero variance in
/// both inputs; the fault names which input is constant.
Correlation pearson(std::span<const double> x, std::span<const double> y);

/// Pearson on average ranks.
Correlation spearman(std::span<const double> x, std::span<const double> y);

/// 1-based ranks; ties share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> x);

/// Two-sided p for t = r·sqrt((n−2)/(1−r²)).
double correlation_p_value(double r, std::size_t n);

double mean(std::span<const double> x);
/// Median, with the mean of the two middle values for even counts.
double median(std::vector<double> x);

}  // namespace hcgnn::stats
