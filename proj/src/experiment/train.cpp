// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/experiment/train.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hcgnn/diffcore/adam.hpp"
#include "hcgnn/diffcore/error.hpp"
#include "hcgnn/diffcore/keyvalue.hpp"

namespace hcgnn::exp {

using diff::GradMap;
using diff::Tape;
using diff::Tensor;
using model::Model;

namespace {

double example_loss(const Model& m, const Example& e, Tape& tape, diff::Var* out = nullptr) {
    const auto pred = m.forward(tape, e.input);
    const auto y = tape.constant(Tensor({1, 5}, std::vector<double>(e.label.begin(), e.label.end())));
    const auto loss = model::mae_loss(pred, y);
    if (out) *out = loss;
    return loss.value()[0];
}

void add_into(GradMap& acc, const GradMap& g) {
    if (acc.size() < g.size()) acc.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i].empty()) continue;
        if (acc[i].empty()) acc[i] = g[i];
        else acc[i].add_inplace(g[i]);
    }
}

struct Snapshot {
    diff::ParamStore params;
    std::vector<diff::AdamState> optimizer;
};

}  // namespace

BatchGradient batch_gradient(const Model& m, const std::vector<const Example*>& batch, Execution exec) {
    if (batch.empty()) throw Fault("empty minibatch");
    const auto n_params = m.params().size();
    std::vector<GradMap> grads(batch.size());
    std::vector<double> losses(batch.size());
    for_each_index(batch.size(), exec, [&](std::size_t i) {
        Tape tape;
        diff::Var loss;
        losses[i] = example_loss(m, *batch[i], tape, &loss);
        grads[i] = tape.gradients(loss, n_params);
    });
    BatchGradient out;
    out.grad.resize(n_params);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        out.loss_sum += losses[i];
        add_into(out.grad, grads[i]);
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (auto& g : out.grad)
        for (auto& v : g.values()) v *= inv;
    return out;
}

double mean_loss(const Model& m, const std::vector<Example>& examples, Execution exec) {
    if (examples.empty()) throw Fault("mean loss over an empty set");
    std::vector<double> losses(examples.size());
    for_each_index(examples.size(), exec, [&](std::size_t i) {
        Tape tape;
        losses[i] = example_loss(m, examples[i], tape);
    });
    double s = 0.0;
    for (double l : losses) s += l;
    return s / static_cast<double>(examples.size());
}

std::vector<TraitArray> predict_all(const Model& m, const std::vector<Example>& examples, Execution exec) {
    std::vector<TraitArray> out(examples.size());
    for_each_index(examples.size(), exec, [&](std::size_t i) { out[i] = m.predict(examples[i].input); });
    return out;
}

EarlyStopping::EarlyStopping(std::size_t patience, double min_delta) : patience_(patience), min_delta_(min_delta) {
    if (patience < 1) throw Fault("patience must be >= 1");
}

bool EarlyStopping::observe(double valid_loss) {
    ++epoch_;
    if (best_epoch_ == 0 || valid_loss < best_ - min_delta_) {
        best_ = valid_loss;
        best_epoch_ = epoch_;
        since_best_ = 0;
        return true;
    }
    ++since_best_;
    return false;
}

nlohmann::json TrainLog::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : epochs)
        rows.push_back({{"epoch", e.epoch},
                        {"train_loss", e.train_loss},
                        {"valid_loss", e.valid_loss},
                        {"lr", e.lr},
                        {"step", e.step},
                        {"improved", e.improved}});
    return {{"epochs", rows}, {"best_epoch", best_epoch}, {"early_stopped", early_stopped}};
}

std::string TrainLog::to_text() const {
    std::ostringstream out;
    for (const auto& e : epochs)
        out << "epoch=" << e.epoch << " train_loss=" << kv::format_real(e.train_loss)
            << " valid_loss=" << kv::format_real(e.valid_loss) << " lr=" << kv::format_real(e.lr)
            << " step=" << e.step << " improved=" << (e.improved ? 1 : 0) << '\n';
    out << "best_epoch=" << best_epoch << " early_stopped=" << (early_stopped ? 1 : 0) << '\n';
    return out.str();
}

TrainResult train(const model::ModelConfig& mcfg, const std::vector<Example>& train_set,
                  const std::vector<Example>& valid_set, const TrainConfig& tcfg, Execution exec,
                  const EpochCallback& on_epoch) {
    tcfg.validate();
    if (train_set.empty()) throw Fault("training set is empty");
    if (valid_set.empty()) throw Fault("validation set is empty");
    std::set<std::string> train_speakers;
    for (const auto& e : train_set) train_speakers.insert(e.speaker);
    for (const auto& e : valid_set)
        if (train_speakers.count(e.speaker))
            throw Fault("speaker '" + e.speaker + "' appears in both training and validation data");

    Model m(mcfg);
    diff::Adam adam(m.params(), {tcfg.beta1, tcfg.beta2, tcfg.adam_eps});
    const std::size_t n = train_set.size();
    const std::size_t per_epoch = (n + tcfg.batch_size - 1) / tcfg.batch_size;
    const std::uint64_t total = static_cast<std::uint64_t>(per_epoch) * tcfg.max_epochs;
    // The schedule needs warmup < total; short runs warm up for all but the
    // last step.
    const std::uint64_t warmup = std::min<std::uint64_t>(tcfg.warmup_steps, total - 1);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(tcfg.seed);
    EarlyStopping stopper(tcfg.patience);
    Snapshot best{m.params(), adam.states()};
    TrainResult result;
    std::uint64_t step = 0;

    for (std::size_t epoch = 1; epoch <= tcfg.max_epochs; ++epoch) {
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
        double loss_sum = 0.0, lr = 0.0;
        for (std::size_t b = 0; b < per_epoch; ++b) {
            ++step;
            std::vector<const Example*> batch;
            for (std::size_t i = b * tcfg.batch_size; i < std::min(n, (b + 1) * tcfg.batch_size); ++i)
                batch.push_back(&train_set[order[i]]);
            BatchGradient g;
            try {
                g = batch_gradient(m, batch, exec);
            } catch (const NumericFault& f) {
                throw Fault("training diverged at epoch " + std::to_string(epoch) + " step " +
                            std::to_string(step) + ": " + f.what());
            }
            if (!std::isfinite(g.loss_sum))
                throw Fault("non-finite training loss at epoch " + std::to_string(epoch) + " step " +
                            std::to_string(step));
            loss_sum += g.loss_sum;
            lr = diff::lr_at_step(step, tcfg.lr, warmup, total);
            m.params().zero_grad();
            m.params().accumulate(g.grad);
            adam.step(m.params(), lr);
        }
        EpochLog row;
        row.epoch = epoch;
        row.train_loss = loss_sum / static_cast<double>(n);
        row.valid_loss = mean_loss(m, valid_set, exec);
        row.lr = lr;
        row.step = step;
        row.improved = stopper.observe(row.valid_loss);
        if (row.improved) best = Snapshot{m.params(), adam.states()};
        result.log.epochs.push_back(row);
        if (on_epoch) on_epoch(row);
        if (stopper.should_stop()) {
            result.log.early_stopped = true;
            break;
        }
    }
    result.log.best_epoch = stopper.best_epoch();
    best.params.zero_grad();
    auto& ck = result.checkpoint;
    ck.config = mcfg;
    ck.params = best.params;
    for (std::size_t id = 0; id < ck.params.size(); ++id) ck.optimizer[ck.params[id].name] = best.optimizer[id];
    ck.meta["train_config"] = tcfg.to_json();
    ck.meta["best_epoch"] = result.log.best_epoch;
    ck.meta["best_valid_loss"] = stopper.best_loss();
    return result;
}

MetricsReport evaluate(const Model& m, const std::vector<Example>& examples, const TraitArray& thresholds,
                       Execution exec) {
    if (examples.empty()) throw Fault("evaluation set is empty");
    return compute_metrics(predict_all(m, examples, exec), labels_of(examples), thresholds);
}

std::vector<ContextK> parse_context_ks(const std::string& text) {
    std::vector<ContextK> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "full") {
            out.emplace_back(std::nullopt);
            continue;
        }
        const auto k = kv::parse_size("ks", item);
        if (k < 1) throw Fault("context length must be >= 1");
        out.emplace_back(k);
    }
    if (out.empty()) throw Fault("no context lengths given");
    return out;
}

std::string context_k_name(const ContextK& k) { return k ? "k=" + std::to_string(*k) : std::string("full"); }

namespace {

std::vector<const corpus::Dialogue*> all_dialogues(const corpus::Corpus& c) {
    std::vector<const corpus::Dialogue*> out;
    for (const auto& d : c.dialogues()) out.push_back(&d);
    return out;
}

TraitArray thresholds_of(const model::Checkpoint& ck) {
    if (!ck.meta.contains("thresholds")) throw Fault("checkpoint carries no thresholds");
    return ck.meta.at("thresholds").get<TraitArray>();
}

}  // namespace

TrainResult train_on_data(const DataDir& data, const RunConfig& cfg, Execution exec, const EpochCallback& on_epoch) {
    cfg.model.validate();
    const auto f = data.featurizer(cfg.model.d);
    const auto train_d = corpus::dialogues_in(data.corpus, data.split, corpus::Partition::Train);
    const auto valid_d = corpus::dialogues_in(data.corpus, data.split, corpus::Partition::Valid);
    auto train_set = build_examples(data.corpus, train_d, f, cfg.model, std::nullopt, exec);
    const auto thresholds = median_thresholds(labels_of(train_set));
    if (data.augmented) {
        auto extra = build_examples(*data.augmented, all_dialogues(*data.augmented), f, cfg.model, std::nullopt, exec);
        for (auto& e : extra) train_set.push_back(std::move(e));
    }
    const auto valid_set = build_examples(data.corpus, valid_d, f, cfg.model, std::nullopt, exec);
    auto r = train(cfg.model, train_set, valid_set, cfg.train, exec, on_epoch);
    r.checkpoint.meta["thresholds"] = thresholds;
    r.checkpoint.meta["encoder"] = f.to_json();
    r.checkpoint.meta["train_size"] = train_set.size();
    r.checkpoint.meta["augmented_size"] = data.augmented ? data.augmented->dialogues().size() : 0;
    return r;
}

MetricsReport evaluate_on_data(const model::Checkpoint& ck, const DataDir& data, const ContextK& k, Execution exec) {
    const Model m(ck.config, ck.params);
    const auto f = data.featurizer(ck.meta.at("encoder"));
    const auto test_d = corpus::dialogues_in(data.corpus, data.split, corpus::Partition::Test);
    return evaluate(m, build_examples(data.corpus, test_d, f, ck.config, k, exec), thresholds_of(ck), exec);
}

std::vector<SweepRow> context_sweep(const model::Checkpoint& ck, const DataDir& data, const std::vector<ContextK>& ks,
                                    Execution exec) {
    std::vector<SweepRow> rows;
    for (const auto& k : ks) rows.push_back({context_k_name(k), evaluate_on_data(ck, data, k, exec)});
    return rows;
}

std::string report_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "condition,N,E,O,A,C,Avg\n";
    char buf[32];
    for (const auto& r : rows) {
        out << r.condition;
        for (const auto& t : r.report.traits) {
            std::snprintf(buf, sizeof buf, ",%.1f", 100.0 * t.balanced_accuracy);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.1f", 100.0 * r.report.avg_balanced_accuracy);
        out << buf << '\n';
    }
    return out.str();
}

nlohmann::json report_json(const std::vector<SweepRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) out.push_back({{"condition", r.condition}, {"metrics", r.report.to_json()}});
    return out;
}

}  // namespace hcgnn::exp
