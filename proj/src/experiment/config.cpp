// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/experiment/config.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "hcgnn/diffcore/error.hpp"
#include "hcgnn/diffcore/keyvalue.hpp"

namespace hcgnn::exp {

using kv::format_real;

TrainConfig TrainConfig::desk() { return TrainConfig{}; }

TrainConfig TrainConfig::large(model::Variant v) {
    TrainConfig c;
    c.lr = 1e-5;
    c.batch_size = v == model::Variant::MLP ? 128 : 32;
    return c;
}

void TrainConfig::validate() const {
    if (!(lr > 0.0) || !std::isfinite(lr)) throw Fault("lr must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        throw Fault("Adam betas must lie in [0,1)");
    if (!(adam_eps > 0.0)) throw Fault("adam_eps must be positive");
    if (max_epochs < 1) throw Fault("max_epochs must be >= 1");
    if (patience < 1) throw Fault("patience must be >= 1");
    if (batch_size < 1) throw Fault("batch_size must be >= 1");
}

bool TrainConfig::set(const std::string& key, const std::string& value) {
    if (key == "lr") lr = kv::parse_real(key, value);
    else if (key == "beta1") beta1 = kv::parse_real(key, value);
    else if (key == "beta2") beta2 = kv::parse_real(key, value);
    else if (key == "adam_eps") adam_eps = kv::parse_real(key, value);
    else if (key == "warmup_steps") warmup_steps = kv::parse_u64(key, value);
    else if (key == "max_epochs") max_epochs = kv::parse_size(key, value);
    else if (key == "patience") patience = kv::parse_size(key, value);
    else if (key == "batch_size") batch_size = kv::parse_size(key, value);
    else if (key == "seed") seed = kv::parse_u64(key, value);
    else return false;
    return true;
}

nlohmann::json TrainConfig::to_json() const {
    return {{"lr", lr},
            {"beta1", beta1},
            {"beta2", beta2},
            {"adam_eps", adam_eps},
            {"warmup_steps", warmup_steps},
            {"max_epochs", max_epochs},
            {"patience", patience},
            {"batch_size", batch_size},
            {"seed", seed}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.lr = j.at("lr").get<double>();
    c.beta1 = j.at("beta1").get<double>();
    c.beta2 = j.at("beta2").get<double>();
    c.adam_eps = j.at("adam_eps").get<double>();
    c.warmup_steps = j.at("warmup_steps").get<std::uint64_t>();
    c.max_epochs = j.at("max_epochs").get<std::size_t>();
    c.patience = j.at("patience").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.validate();
    return c;
}

RunConfig read_run_config(std::istream& in, RunConfig base) {
    const auto entries = kv::read_entries(in);
    RunConfig cfg = std::move(base);
    auto variant = cfg.model.variant;
    for (const auto& e : entries)
        if (e.key == "variant") variant = model::parse_variant(e.value);
    for (const auto& e : entries) {
        if (e.key != "profile") continue;
        if (e.value == "desk") cfg.train = TrainConfig::desk();
        else if (e.value == "large") cfg.train = TrainConfig::large(variant);
        else throw Fault("config line " + std::to_string(e.line) + ": unknown profile '" + e.value + "'");
    }
    for (const auto& e : entries) {
        if (e.key == "profile") continue;
        try {
            if (!cfg.model.set(e.key, e.value) && !cfg.train.set(e.key, e.value))
                throw Fault("unknown key '" + e.key + "'");
        } catch (const Fault& f) {
            throw Fault("config line " + std::to_string(e.line) + ": " + f.what());
        }
    }
    cfg.model.validate();
    cfg.train.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw Fault("cannot open config file " + path.string());
    return read_run_config(in, std::move(base));
}

void write_run_config(const RunConfig& cfg, std::ostream& out) {
    const auto& m = cfg.model;
    out << "variant=" << model::variant_name(m.variant) << '\n'
        << "setting=" << model::setting_name(m.setting) << '\n'
        << "relations=" << graph::relations_string(m.relations) << '\n'
        << "d=" << m.d << '\n'
        << "d_prime=" << m.d_prime << '\n'
        << "d_dprime=" << m.d_dprime << '\n'
        << "heads=" << m.heads << '\n'
        << "window=" << m.window << '\n'
        << "readout=" << model::readout_name(m.readout) << '\n'
        << "neighbor_scaling=" << (m.neighbor_scaling ? "true" : "false") << '\n'
        << "leaky_slope=" << format_real(m.leaky_slope) << '\n'
        << "head_bias_init=" << format_real(m.head_bias_init) << '\n'
        << "init_seed=" << m.init_seed << '\n';
    const auto& t = cfg.train;
    out << "lr=" << format_real(t.lr) << '\n'
        << "beta1=" << format_real(t.beta1) << '\n'
        << "beta2=" << format_real(t.beta2) << '\n'
        << "adam_eps=" << format_real(t.adam_eps) << '\n'
        << "warmup_steps=" << t.warmup_steps << '\n'
        << "max_epochs=" << t.max_epochs << '\n'
        << "patience=" << t.patience << '\n'
        << "batch_size=" << t.batch_size << '\n'
        << "seed=" << t.seed << '\n';
}

}  // namespace hcgnn::exp
