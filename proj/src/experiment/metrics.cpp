// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/experiment/metrics.hpp"

#include <algorithm>

#include "hcgnn/corpus/corpus.hpp"
#include "hcgnn/diffcore/error.hpp"

namespace hcgnn::exp {

namespace {

std::vector<double> column(const std::vector<TraitArray>& rows, std::size_t t) {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i][t];
    return out;
}

bool constant(const std::vector<double>& x) {
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

bool same(const std::optional<stats::Correlation>& a, const std::optional<stats::Correlation>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || (a->r == b->r && a->p == b->p);
}

nlohmann::json corr_json(const std::optional<stats::Correlation>& c) {
    if (!c) return nullptr;
    return {{"r", c->r}, {"p", c->p}};
}

}  // namespace

TraitArray median_thresholds(const std::vector<TraitArray>& labels) {
    if (labels.empty()) throw Fault("median thresholds need at least one training label");
    TraitArray out{};
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = stats::median(column(labels, t));
    return out;
}

std::vector<int> binarize(const std::vector<double>& values, double threshold) {
    std::vector<int> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] > threshold ? 1 : 0;
    return out;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.empty() || pred.size() != truth.size()) throw Fault("accuracy needs equal nonempty inputs");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == truth[i];
    return static_cast<double>(hit) / static_cast<double>(pred.size());
}

double balanced_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.empty() || pred.size() != truth.size())
        throw Fault("balanced accuracy needs equal nonempty inputs");
    std::size_t tp = 0, pos = 0, tn = 0, neg = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (truth[i]) {
            ++pos;
            tp += pred[i] != 0;
        } else {
            ++neg;
            tn += pred[i] == 0;
        }
    }
    if (pos == 0) return static_cast<double>(tn) / static_cast<double>(neg);
    if (neg == 0) return static_cast<double>(tp) / static_cast<double>(pos);
    return 0.5 * (static_cast<double>(tp) / static_cast<double>(pos) +
                  static_cast<double>(tn) / static_cast<double>(neg));
}

bool TraitMetrics::operator==(const TraitMetrics& o) const {
    return accuracy == o.accuracy && balanced_accuracy == o.balanced_accuracy && same(pearson, o.pearson) &&
           same(spearman, o.spearman);
}

nlohmann::json MetricsReport::to_json() const {
    nlohmann::json per = nlohmann::json::object();
    for (std::size_t t = 0; t < traits.size(); ++t) {
        const auto& m = traits[t];
        per[corpus::kTraitNames[t]] = {{"accuracy", m.accuracy},
                                       {"balanced_accuracy", m.balanced_accuracy},
                                       {"pearson", corr_json(m.pearson)},
                                       {"spearman", corr_json(m.spearman)}};
    }
    return {{"n", n}, {"traits", per}, {"avg_accuracy", avg_accuracy},
            {"avg_balanced_accuracy", avg_balanced_accuracy}};
}

MetricsReport compute_metrics(const std::vector<TraitArray>& pred, const std::vector<TraitArray>& truth,
                              const TraitArray& thresholds) {
    if (pred.empty() || pred.size() != truth.size())
        throw Fault("metrics need equal nonempty prediction and label lists");
    MetricsReport r;
    r.n = pred.size();
    for (std::size_t t = 0; t < r.traits.size(); ++t) {
        const auto p = column(pred, t), y = column(truth, t);
        auto& m = r.traits[t];
        const auto pb = binarize(p, thresholds[t]), yb = binarize(y, thresholds[t]);
        m.accuracy = accuracy(pb, yb);
        m.balanced_accuracy = balanced_accuracy(pb, yb);
        if (p.size() >= 3 && !constant(p) && !constant(y)) {
            m.pearson = stats::pearson(p, y);
            m.spearman = stats::spearman(p, y);
        }
        r.avg_accuracy += m.accuracy;
        r.avg_balanced_accuracy += m.balanced_accuracy;
    }
    r.avg_accuracy /= 5.0;
    r.avg_balanced_accuracy /= 5.0;
    return r;
}

}  // namespace hcgnn::exp
