// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcgnn/experiment/config.hpp"
#include "hcgnn/experiment/data.hpp"
#include "hcgnn/experiment/metrics.hpp"
#include "hcgnn/model/model.hpp"

namespace hcgnn::exp {

struct BatchGradient {
    /// Sum of per-dialogue MAE losses.
    double loss_sum = 0.0;
    /// Gradient of the batch-mean loss.
    diff::GradMap grad;
};

/// Per-dialogue forward/backward; contributions are summed in batch order
/// on both paths, so Serial and Parallel agree bit for bit.
BatchGradient batch_gradient(const model::Model& m, const std::vector<const Example*>& batch,
                             Execution exec = Execution::Parallel);

/// Mean MAE over the examples.
double mean_loss(const model::Model& m, const std::vector<Example>& examples, Execution exec = Execution::Parallel);

std::vector<TraitArray> predict_all(const model::Model& m, const std::vector<Example>& examples,
                                    Execution exec = Execution::Parallel);

/// Patience rule on validation loss: a loss counts as an improvement only
/// when it beats the best so far by more than `min_delta`.
class EarlyStopping {
public:
    explicit EarlyStopping(std::size_t patience, double min_delta = 1e-6);

    /// Records one epoch; true when it improved.
    bool observe(double valid_loss);
    bool should_stop() const noexcept { return since_best_ >= patience_; }
    /// 1-based epoch of the best loss; 0 before any epoch.
    std::size_t best_epoch() const noexcept { return best_epoch_; }
    double best_loss() const noexcept { return best_; }

private:
    std::size_t patience_;
    double min_delta_;
    std::size_t epoch_ = 0;
    std::size_t best_epoch_ = 0;
    std::size_t since_best_ = 0;
    double best_ = 0.0;
};

struct EpochLog {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double valid_loss = 0.0;
    /// Learning rate of the epoch's last step.
    double lr = 0.0;
    std::uint64_t step = 0;
    bool improved = false;

    bool operator==(const EpochLog&) const = default;
};

struct TrainLog {
    std::vector<EpochLog> epochs;
    std::size_t best_epoch = 0;
    bool early_stopped = false;

    nlohmann::json to_json() const;
    /// One line per epoch with round-trip exact numbers.
    std::string to_text() const;
    bool operator==(const TrainLog&) const = default;
};

struct TrainResult {
    /// Parameters and optimizer state of the best validation epoch.
    model::Checkpoint checkpoint;
    TrainLog log;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Seeded-shuffle minibatch Adam with a warmup/linear-decay schedule,
/// validation after every epoch, patience-based stopping and restoration
/// of the best epoch. Train and valid speakers must be disjoint.
TrainResult train(const model::ModelConfig& mcfg, const std::vector<Example>& train_set,
                  const std::vector<Example>& valid_set, const TrainConfig& tcfg,
                  Execution exec = Execution::Parallel, const EpochCallback& on_epoch = {});

MetricsReport evaluate(const model::Model& m, const std::vector<Example>& examples, const TraitArray& thresholds,
                       Execution exec = Execution::Parallel);

/// Context length for a sweep; unset means the full dialogue.
using ContextK = std::optional<std::size_t>;

/// Parses "2,3,4,5,10,full".
std::vector<ContextK> parse_context_ks(const std::string& text);
std::string context_k_name(const ContextK& k);

// Pipeline over a data directory.

/// Thresholds from the original training partition; training set is that
/// partition plus any augmented dialogues; validation on the valid
/// partition. The checkpoint meta records encoder, thresholds and config.
TrainResult train_on_data(const DataDir& data, const RunConfig& cfg, Execution exec = Execution::Parallel,
                          const EpochCallback& on_epoch = {});

/// Evaluates a checkpoint on the test partition, optionally truncated.
MetricsReport evaluate_on_data(const model::Checkpoint& ck, const DataDir& data, const ContextK& k = std::nullopt,
                               Execution exec = Execution::Parallel);

struct SweepRow {
    std::string condition;
    MetricsReport report;
};

std::vector<SweepRow> context_sweep(const model::Checkpoint& ck, const DataDir& data, const std::vector<ContextK>& ks,
                                    Execution exec = Execution::Parallel);

/// Table layout: one row per condition, columns N,E,O,A,C,Avg of balanced
/// accuracy in percent.
std::string report_csv(const std::vector<SweepRow>& rows);
nlohmann::json report_json(const std::vector<SweepRow>& rows);

}  // namespace hcgnn::exp
