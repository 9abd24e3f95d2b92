// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/experiment/data.hpp"

#include "hcgnn/diffcore/error.hpp"

namespace hcgnn::exp {

namespace fs = std::filesystem;
using corpus::Role;

Featurizer::Featurizer(embed::EncoderSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    if (spec_.kind == embed::EncoderKind::File) {
        table_ = embed::load_embeddings(spec_.file, spec_.dim);
        spec_.dim = table_->dim();
    }
}

Featurizer::Featurizer(embed::EncoderSpec spec, embed::EmbeddingTable table)
    : spec_(std::move(spec)), table_(std::move(table)) {
    spec_.kind = embed::EncoderKind::File;
    spec_.dim = table_->dim();
}

diff::Tensor Featurizer::features(const corpus::Dialogue& d, const std::vector<corpus::Utterance>& utterances) const {
    if (table_) return embed::utterance_matrix(*table_, d.id, utterances);
    diff::Tensor out({utterances.size(), spec_.dim});
    for (std::size_t i = 0; i < utterances.size(); ++i) {
        const auto e = embed::encode_utterance(utterances[i].text, spec_);
        std::copy(e.values.begin(), e.values.end(), out.row(i).begin());
    }
    return out;
}

nlohmann::json Featurizer::to_json() const { return encoder_to_json(spec_); }

nlohmann::json encoder_to_json(const embed::EncoderSpec& spec) {
    if (spec.kind == embed::EncoderKind::File) return {{"kind", "file"}, {"dim", spec.dim}};
    return {{"kind", "hashed"}, {"dim", spec.dim}, {"ngram_sizes", spec.ngram_sizes}, {"salt", spec.salt}};
}

embed::EncoderSpec encoder_from_json(const nlohmann::json& j) {
    embed::EncoderSpec s;
    const auto kind = j.at("kind").get<std::string>();
    s.dim = j.at("dim").get<std::size_t>();
    if (kind == "file") {
        s.kind = embed::EncoderKind::File;
    } else if (kind == "hashed") {
        s.kind = embed::EncoderKind::HashedNgram;
        s.ngram_sizes = j.at("ngram_sizes").get<std::vector<std::size_t>>();
        s.salt = j.at("salt").get<std::string>();
    } else {
        throw Fault("unknown encoder kind '" + kind + "'");
    }
    return s;
}

std::vector<Example> build_examples(const corpus::Corpus& c, const std::vector<const corpus::Dialogue*>& dialogues,
                                    const Featurizer& f, const model::ModelConfig& cfg,
                                    std::optional<std::size_t> truncate_turns, Execution exec) {
    if (f.dim() != cfg.d)
        throw Fault("feature dimension " + std::to_string(f.dim()) + " does not match model d = " +
                    std::to_string(cfg.d));
    std::vector<std::optional<Example>> slots(dialogues.size());
    for_each_index(dialogues.size(), exec, [&](std::size_t i) {
        const auto& src = *dialogues[i];
        const auto d = truncate_turns ? corpus::truncate_to_turns(src, *truncate_turns) : src;
        std::vector<corpus::Utterance> nodes;
        std::vector<Role> roles;
        if (cfg.setting == model::Setting::Monologue) {
            nodes = d.monologue ? d.utterances : corpus::to_monologue(d, Role::A);
            roles.assign(nodes.size(), Role::A);
        } else {
            nodes = d.utterances;
            for (const auto& u : nodes) roles.push_back(u.role);
        }
        if (nodes.empty()) throw Fault("dialogue '" + d.id + "' has no utterances to build a graph from");
        slots[i] = Example{d.id, d.speaker_a,
                           model::GraphInput{f.features(d, nodes), graph::ConvGraph(roles, cfg.relations, cfg.window)},
                           c.label_of(src).values()};
    });
    std::vector<Example> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

std::vector<TraitArray> labels_of(const std::vector<Example>& examples) {
    std::vector<TraitArray> out;
    out.reserve(examples.size());
    for (const auto& e : examples) out.push_back(e.label);
    return out;
}

bool DataDir::has_embeddings() const { return fs::exists(root / kEmbeddingsFile); }

Featurizer DataDir::featurizer(std::size_t dim) const {
    embed::EncoderSpec spec;
    spec.dim = dim;
    if (has_embeddings()) {
        spec.kind = embed::EncoderKind::File;
        spec.file = root / kEmbeddingsFile;
    }
    return Featurizer(spec);
}

Featurizer DataDir::featurizer(const nlohmann::json& encoder) const {
    auto spec = encoder_from_json(encoder);
    if (spec.kind == embed::EncoderKind::File) {
        if (!has_embeddings())
            throw Fault("checkpoint was trained on file embeddings but " + (root / kEmbeddingsFile).string() +
                        " is missing");
        spec.file = root / kEmbeddingsFile;
    }
    return Featurizer(spec);
}

DataDir load_data_dir(const fs::path& root) {
    if (!fs::is_directory(root)) throw Fault("data directory " + root.string() + " does not exist");
    DataDir d;
    d.root = root;
    d.corpus = corpus::load_corpus(root / kCorpusFile);
    d.split = corpus::load_split(root / kSplitFile);
    if (fs::exists(root / kAugmentedFile)) d.augmented = corpus::load_corpus(root / kAugmentedFile);
    return d;
}

}  // namespace hcgnn::exp
