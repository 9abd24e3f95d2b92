// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hcgnn/convgraph/convgraph.hpp"
#include "hcgnn/diffcore/adam.hpp"
#include "hcgnn/diffcore/rng.hpp"
#include "hcgnn/diffcore/tape.hpp"
#include "hcgnn/model/layers.hpp"

namespace hcgnn::model {

enum class Variant { HCGNN, MLP, GCN, GAT, RGCN };
enum class Setting { Dialogue, Monologue };

const char* variant_name(Variant v);
Variant parse_variant(std::string_view s);
const char* setting_name(Setting s);
Setting parse_setting(std::string_view s);
const char* readout_name(Readout r);
Readout parse_readout(std::string_view s);

inline constexpr std::size_t kHeadHidden = 16;

struct ModelConfig {
    Variant variant = Variant::HCGNN;
    Setting setting = Setting::Dialogue;
    std::vector<graph::Relation> relations{graph::Relation::AA, graph::Relation::BA};
    std::size_t d = 32;
    std::size_t d_prime = 32;
    std::size_t d_dprime = 32;
    std::size_t heads = 2;
    std::size_t window = 1;
    Readout readout = Readout::MeanAll;
    /// Divide each attention-weighted neighbor message by the relation degree.
    bool neighbor_scaling = true;
    double leaky_slope = 0.2;
    /// Initial output bias b2 of every trait head. Midway in the label
    /// range so the final ReLU starts active.
    double head_bias_init = 0.5;
    std::uint64_t init_seed = 0;

    /// Throws on inconsistent fields; the dialogue setting requires
    /// relations {AA, BA}, the monologue setting {AA}.
    void validate() const;
    /// Relations for a setting.
    static std::vector<graph::Relation> default_relations(Setting s);

    nlohmann::json to_json() const;
    static ModelConfig from_json(const nlohmann::json& j);
    /// Applies one key=value entry; returns false for keys it does not own.
    bool set(const std::string& key, const std::string& value);

    bool operator==(const ModelConfig&) const = default;
};

/// One model input: node features (n×d) and the utterance graph.
struct GraphInput {
    Tensor features;
    graph::ConvGraph graph;
};

/// Learnable parameters of one variant: Xavier-uniform matrices drawn from
/// `config.init_seed`, zero hidden biases, head output biases at
/// `config.head_bias_init`.
class Model {
public:
    explicit Model(ModelConfig config);
    Model(ModelConfig config, diff::ParamStore params);

    const ModelConfig& config() const noexcept { return config_; }
    diff::ParamStore& params() noexcept { return params_; }
    const diff::ParamStore& params() const noexcept { return params_; }

    /// 1×5 prediction recorded on `tape`.
    Var forward(diff::Tape& tape, const GraphInput& input) const;
    /// Per-relation readouts g_r of the HC-GNN branch stack (HCGNN only).
    std::vector<Var> relation_readouts(diff::Tape& tape, const GraphInput& input) const;
    std::array<double, 5> predict(const GraphInput& input) const;

private:
    Var p(diff::Tape& tape, const std::string& name) const;
    AttnVars attn_vars(diff::Tape& tape, const std::string& prefix) const;
    std::array<HeadVars, 5> head_vars(diff::Tape& tape) const;
    Var branch(diff::Tape& tape, const GraphInput& input, graph::Relation r) const;

    ModelConfig config_;
    diff::ParamStore params_;
};

/// Xavier-uniform bound sqrt(6 / (fan_in + fan_out)).
Tensor xavier_uniform(std::size_t rows, std::size_t cols, Rng& rng);

struct Checkpoint {
    ModelConfig config;
    diff::ParamStore params;
    /// Optimizer moments by parameter name, if saved.
    std::map<std::string, diff::AdamState> optimizer;
    /// Free-form settings stored alongside (encoder, thresholds, ...).
    nlohmann::json meta = nlohmann::json::object();

    bool operator==(const Checkpoint&) const;
};

void write_checkpoint(const Checkpoint& ck, std::ostream& out);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hcgnn::model
