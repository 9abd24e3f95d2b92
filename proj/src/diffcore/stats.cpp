// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/diffcore/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numeric>

#include "hcgnn/diffcore/error.hpp"

namespace hcgnn::stats {

double mean(std::span<const double> x) {
    if (x.empty()) throw Fault("mean of an empty sequence");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double median(std::vector<double> x) {
    if (x.empty()) throw Fault("median of an empty sequence");
    std::sort(x.begin(), x.end());
    const auto n = x.size();
    return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double correlation_p_value(double r, std::size_t n) {
    if (n < 3) throw Fault("correlation p-value needs n >= 3");
    const double df = static_cast<double>(n - 2);
    const double r2 = r * r;
    if (r2 >= 1.0) return 0.0;
    const double t2 = r2 * df / (1.0 - r2);
    // P(|T| > |t|) = I_{df/(df+t²)}(df/2, 1/2)
    return boost::math::ibeta(df / 2.0, 0.5, df / (df + t2));
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Fault("pearson inputs differ in length");
    if (x.size() < 3) throw Fault("pearson needs at least 3 observations");
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw Fault("pearson: first input has zero variance");
    if (syy == 0.0) throw Fault("pearson: second input has zero variance");
    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);
    return {r, correlation_p_value(r, x.size())};
}

std::vector<double> average_ranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

Correlation spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Fault("spearman inputs differ in length");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

}  // namespace hcgnn::stats
