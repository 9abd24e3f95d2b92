// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/model/model.hpp"

#include <cmath>

#include "hcgnn/diffcore/error.hpp"
#include "hcgnn/diffcore/keyvalue.hpp"

namespace hcgnn::model {

using namespace diff;
using graph::Relation;
using nlohmann::json;
using kv::parse_bool;
using kv::parse_real;
using kv::parse_size;

namespace {

constexpr std::array<const char*, 5> kVariantNames{"hcgnn", "mlp", "gcn", "gat", "rgcn"};
constexpr std::array<const char*, 5> kTraitNames{"N", "E", "O", "A", "C"};

}  // namespace

const char* variant_name(Variant v) { return kVariantNames.at(static_cast<std::size_t>(v)); }

Variant parse_variant(std::string_view s) {
    for (std::size_t i = 0; i < kVariantNames.size(); ++i)
        if (s == kVariantNames[i]) return static_cast<Variant>(i);
    throw Fault("unknown model variant '" + std::string(s) + "'");
}

const char* setting_name(Setting s) { return s == Setting::Dialogue ? "dialogue" : "monologue"; }

Setting parse_setting(std::string_view s) {
    if (s == "dialogue") return Setting::Dialogue;
    if (s == "monologue") return Setting::Monologue;
    throw Fault("unknown setting '" + std::string(s) + "'");
}

const char* readout_name(Readout r) { return r == Readout::MeanAll ? "mean_all" : "mean_speaker_a"; }

Readout parse_readout(std::string_view s) {
    if (s == "mean_all") return Readout::MeanAll;
    if (s == "mean_speaker_a") return Readout::MeanSpeakerA;
    throw Fault("unknown readout '" + std::string(s) + "'");
}

std::vector<Relation> ModelConfig::default_relations(Setting s) {
    if (s == Setting::Monologue) return {Relation::AA};
    return {Relation::AA, Relation::BA};
}

void ModelConfig::validate() const {
    if (d == 0 || d_prime == 0 || d_dprime == 0) throw Fault("model dimensions must be positive");
    if (heads == 0) throw Fault("attention needs K >= 1 heads");
    if (window == 0) throw Fault("graph window must be >= 1");
    if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) throw Fault("leaky_slope must lie in (0,1)");
    if (!std::isfinite(head_bias_init)) throw Fault("head_bias_init must be finite");
    if (relations != default_relations(setting))
        throw Fault(std::string("the ") + setting_name(setting) + " setting uses relations " +
                    graph::relations_string(default_relations(setting)) + ", got " +
                    graph::relations_string(relations));
}

json ModelConfig::to_json() const {
    return json{{"variant", variant_name(variant)},
                {"setting", setting_name(setting)},
                {"relations", graph::relations_string(relations)},
                {"d", d},
                {"d_prime", d_prime},
                {"d_dprime", d_dprime},
                {"heads", heads},
                {"window", window},
                {"readout", readout_name(readout)},
                {"neighbor_scaling", neighbor_scaling},
                {"leaky_slope", leaky_slope},
                {"head_bias_init", head_bias_init},
                {"init_seed", init_seed}};
}

ModelConfig ModelConfig::from_json(const json& j) {
    ModelConfig c;
    c.variant = parse_variant(j.at("variant").get<std::string>());
    c.setting = parse_setting(j.at("setting").get<std::string>());
    c.relations = graph::parse_relations(j.at("relations").get<std::string>());
    c.d = j.at("d").get<std::size_t>();
    c.d_prime = j.at("d_prime").get<std::size_t>();
    c.d_dprime = j.at("d_dprime").get<std::size_t>();
    c.heads = j.at("heads").get<std::size_t>();
    c.window = j.at("window").get<std::size_t>();
    c.readout = parse_readout(j.at("readout").get<std::string>());
    c.neighbor_scaling = j.at("neighbor_scaling").get<bool>();
    c.leaky_slope = j.at("leaky_slope").get<double>();
    c.head_bias_init = j.at("head_bias_init").get<double>();
    c.init_seed = j.at("init_seed").get<std::uint64_t>();
    c.validate();
    return c;
}

bool ModelConfig::set(const std::string& key, const std::string& value) {
    if (key == "variant") variant = parse_variant(value);
    else if (key == "setting") {
        setting = parse_setting(value);
        relations = default_relations(setting);
    } else if (key == "relations") relations = graph::parse_relations(value);
    else if (key == "d") d = parse_size(key, value);
    else if (key == "d_prime") d_prime = parse_size(key, value);
    else if (key == "d_dprime") d_dprime = parse_size(key, value);
    else if (key == "heads") heads = parse_size(key, value);
    else if (key == "window") window = parse_size(key, value);
    else if (key == "readout") readout = parse_readout(value);
    else if (key == "neighbor_scaling") neighbor_scaling = parse_bool(key, value);
    else if (key == "leaky_slope") leaky_slope = parse_real(key, value);
    else if (key == "head_bias_init") head_bias_init = parse_real(key, value);
    else if (key == "init_seed") init_seed = kv::parse_u64(key, value);
    else return false;
    return true;
}

Tensor xavier_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Tensor t({rows, cols});
    for (auto& v : t.values()) v = (2.0 * uniform01(rng) - 1.0) * bound;
    return t;
}

namespace {

struct Builder {
    ParamStore& store;
    Rng& rng;
    void matrix(const std::string& name, std::size_t r, std::size_t c) {
        store.add(name, xavier_uniform(r, c, rng));
    }
    void bias(const std::string& name, std::size_t c, double fill = 0.0) { store.add(name, Tensor({1, c}, fill)); }
    void attn(const std::string& prefix, const ModelConfig& cfg, std::size_t in, std::size_t out) {
        for (std::size_t k = 0; k < cfg.heads; ++k) {
            matrix(prefix + ".k" + std::to_string(k) + ".W", out, 2 * in);
            matrix(prefix + ".k" + std::to_string(k) + ".a", 1, out);
        }
        matrix(prefix + ".Wr", out, in);
        matrix(prefix + ".W0", out, in);
    }
    void conv(const std::string& prefix, std::size_t in, std::size_t out) {
        matrix(prefix + ".W", out, in);
        matrix(prefix + ".W0", out, in);
    }
};

std::size_t head_input_dim(const ModelConfig& c) {
    switch (c.variant) {
        case Variant::HCGNN: return c.relations.size() * c.d_dprime;
        case Variant::MLP: return c.d;
        case Variant::GAT: return c.d_prime;
        case Variant::GCN:
        case Variant::RGCN: return c.d_dprime;
    }
    throw Fault("unknown variant");
}

ParamStore fresh_params(const ModelConfig& c) {
    c.validate();
    ParamStore store;
    Rng rng(c.init_seed);
    Builder b{store, rng};
    switch (c.variant) {
        case Variant::HCGNN:
            for (auto r : c.relations) {
                const std::string rel = graph::relation_name(r);
                b.attn(rel + ".attn", c, c.d, c.d_prime);
                b.conv(rel + ".conv1", c.d_prime, c.d_dprime);
                b.conv(rel + ".conv2", c.d_dprime, c.d_dprime);
            }
            b.matrix("fusion.Wq", c.d_dprime, c.d_dprime);
            b.matrix("fusion.Wk", c.d_dprime, c.d_dprime);
            b.matrix("fusion.Wv", c.d_dprime, c.d_dprime);
            break;
        case Variant::MLP: break;
        case Variant::GCN:
            b.conv("gcn1", c.d, c.d_prime);
            b.conv("gcn2", c.d_prime, c.d_dprime);
            break;
        case Variant::GAT: b.attn("gat", c, c.d, c.d_prime); break;
        case Variant::RGCN:
            for (auto r : c.relations) b.matrix(std::string("rgcn.") + graph::relation_name(r) + ".W", c.d_prime, c.d);
            b.matrix("rgcn.W0", c.d_prime, c.d);
            b.conv("conv", c.d_prime, c.d_dprime);
            break;
    }
    const auto dz = head_input_dim(c);
    for (const char* t : kTraitNames) {
        const std::string h = std::string("head.") + t;
        b.matrix(h + ".W1", kHeadHidden, dz);
        b.bias(h + ".b1", kHeadHidden);
        b.matrix(h + ".W2", 1, kHeadHidden);
        b.bias(h + ".b2", 1, c.head_bias_init);
    }
    return store;
}

}  // namespace

Model::Model(ModelConfig config) : config_(std::move(config)), params_(fresh_params(config_)) {}

Model::Model(ModelConfig config, ParamStore params) : config_(std::move(config)), params_(std::move(params)) {
    const auto layout = fresh_params(config_);
    if (layout.size() != params_.size())
        throw Fault("parameter count " + std::to_string(params_.size()) + " does not match the " +
                    variant_name(config_.variant) + " layout (" + std::to_string(layout.size()) + ")");
    for (std::size_t i = 0; i < layout.size(); ++i) {
        if (layout[i].name != params_[i].name)
            throw Fault("parameter " + std::to_string(i) + " is '" + params_[i].name + "', expected '" +
                        layout[i].name + "'");
        if (!layout[i].tensor.same_shape(params_[i].tensor))
            throw Fault("parameter '" + params_[i].name + "' has shape " +
                        shape_string(params_[i].tensor.shape()) + ", expected " +
                        shape_string(layout[i].tensor.shape()));
        params_[i].grad = Tensor(params_[i].tensor.shape());
    }
}

Var Model::p(Tape& tape, const std::string& name) const { return tape.param(params_, params_.find(name)); }

AttnVars Model::attn_vars(Tape& tape, const std::string& prefix) const {
    AttnVars v;
    for (std::size_t k = 0; k < config_.heads; ++k) {
        v.w_score.push_back(p(tape, prefix + ".k" + std::to_string(k) + ".W"));
        v.a.push_back(p(tape, prefix + ".k" + std::to_string(k) + ".a"));
    }
    v.w_r = p(tape, prefix + ".Wr");
    v.w_0 = p(tape, prefix + ".W0");
    return v;
}

std::array<HeadVars, 5> Model::head_vars(Tape& tape) const {
    std::array<HeadVars, 5> out;
    for (std::size_t t = 0; t < 5; ++t) {
        const std::string h = std::string("head.") + kTraitNames[t];
        out[t] = {p(tape, h + ".W1"), p(tape, h + ".b1"), p(tape, h + ".W2"), p(tape, h + ".b2")};
    }
    return out;
}

Var Model::branch(Tape& tape, const GraphInput& input, Relation r) const {
    const std::string rel = graph::relation_name(r);
    const auto& nb = input.graph.neighbor_lists(r);
    auto h = tape.constant(input.features);
    h = attn_layer(h, nb, attn_vars(tape, rel + ".attn"), config_.neighbor_scaling, config_.leaky_slope);
    h = graphconv(h, nb, p(tape, rel + ".conv1.W"), p(tape, rel + ".conv1.W0"));
    h = graphconv(h, nb, p(tape, rel + ".conv2.W"), p(tape, rel + ".conv2.W0"));
    return readout(h, input.graph.roles(), config_.readout);
}

std::vector<Var> Model::relation_readouts(Tape& tape, const GraphInput& input) const {
    if (config_.variant != Variant::HCGNN) throw Fault("relation readouts exist only for hcgnn");
    std::vector<Var> g;
    for (auto r : config_.relations) g.push_back(branch(tape, input, r));
    return g;
}

Var Model::forward(Tape& tape, const GraphInput& input) const {
    const auto& f = input.features;
    if (f.rank() != 2 || f.cols() != config_.d)
        throw Fault("features " + shape_string(f.shape()) + " do not match model dimension " +
                    std::to_string(config_.d));
    if (f.rows() != input.graph.n_nodes()) throw Fault("feature rows differ from graph node count");
    for (auto r : config_.relations)
        if (!input.graph.has_relation(r) && config_.variant != Variant::MLP)
            throw Fault(std::string("graph lacks relation ") + graph::relation_name(r));

    Var z;
    switch (config_.variant) {
        case Variant::HCGNN: {
            const FusionVars fv{p(tape, "fusion.Wq"), p(tape, "fusion.Wk"), p(tape, "fusion.Wv")};
            z = fuse_relations(relation_readouts(tape, input), fv);
            break;
        }
        case Variant::MLP: z = mean_rows(tape.constant(f)); break;
        case Variant::GCN: {
            const auto nb = input.graph.union_neighbors();
            auto h = graphconv(tape.constant(f), nb, p(tape, "gcn1.W"), p(tape, "gcn1.W0"));
            h = graphconv(h, nb, p(tape, "gcn2.W"), p(tape, "gcn2.W0"));
            z = readout(h, input.graph.roles(), config_.readout);
            break;
        }
        case Variant::GAT: {
            const auto nb = input.graph.union_neighbors();
            const auto h = attn_layer(tape.constant(f), nb, attn_vars(tape, "gat"), config_.neighbor_scaling,
                                      config_.leaky_slope);
            z = readout(h, input.graph.roles(), config_.readout);
            break;
        }
        case Variant::RGCN: {
            std::vector<const NeighborLists*> nbs;
            std::vector<Var> w;
            for (auto r : config_.relations) {
                nbs.push_back(&input.graph.neighbor_lists(r));
                w.push_back(p(tape, std::string("rgcn.") + graph::relation_name(r) + ".W"));
            }
            auto h = rgcn(tape.constant(f), nbs, w, p(tape, "rgcn.W0"));
            h = graphconv(h, input.graph.union_neighbors(), p(tape, "conv.W"), p(tape, "conv.W0"));
            z = readout(h, input.graph.roles(), config_.readout);
            break;
        }
    }
    return heads(z, head_vars(tape));
}

std::array<double, 5> Model::predict(const GraphInput& input) const {
    Tape tape;
    const auto out = forward(tape, input);
    std::array<double, 5> p{};
    for (std::size_t t = 0; t < 5; ++t) p[t] = out.value()[t];
    return p;
}

}  // namespace hcgnn::model
