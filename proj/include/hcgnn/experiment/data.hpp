// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcgnn/corpus/corpus.hpp"
#include "hcgnn/corpus/split.hpp"
#include "hcgnn/embed/embed.hpp"
#include "hcgnn/experiment/metrics.hpp"
#include "hcgnn/model/model.hpp"

namespace hcgnn::exp {

/// One dialogue prepared for a model: graph, node features and the
/// initiating speaker's traits.
struct Example {
    std::string dialogue_id;
    std::string speaker;
    model::GraphInput input;
    TraitArray label{};
};

/// Utterance features from an embedding table (file encoder) or computed
/// from text (hashed encoder).
class Featurizer {
public:
    explicit Featurizer(embed::EncoderSpec spec);
    Featurizer(embed::EncoderSpec spec, embed::EmbeddingTable table);

    const embed::EncoderSpec& spec() const noexcept { return spec_; }
    std::size_t dim() const noexcept { return spec_.dim; }

    /// n×dim rows for the given utterances of dialogue `d`. File features
    /// are keyed by dialogue id and original utterance index.
    diff::Tensor features(const corpus::Dialogue& d, const std::vector<corpus::Utterance>& utterances) const;

    nlohmann::json to_json() const;

private:
    embed::EncoderSpec spec_;
    std::optional<embed::EmbeddingTable> table_;
};

/// Hashed-encoder spec as JSON and back; file specs record only the kind.
nlohmann::json encoder_to_json(const embed::EncoderSpec& spec);
embed::EncoderSpec encoder_from_json(const nlohmann::json& j);

/// Examples for the given dialogues. In the monologue setting each dialogue
/// is reduced to its initiating speaker's utterances. With `truncate_turns`
/// set, dialogues are first cut to that many turns.
std::vector<Example> build_examples(const corpus::Corpus& c, const std::vector<const corpus::Dialogue*>& dialogues,
                                    const Featurizer& f, const model::ModelConfig& cfg,
                                    std::optional<std::size_t> truncate_turns = std::nullopt,
                                    Execution exec = Execution::Parallel);

std::vector<TraitArray> labels_of(const std::vector<Example>& examples);

/// Files of a data directory.
inline constexpr const char* kCorpusFile = "corpus.jsonl";
inline constexpr const char* kSplitFile = "split.json";
inline constexpr const char* kAugmentedFile = "augmented.jsonl";
inline constexpr const char* kProvenanceFile = "provenance.jsonl";
inline constexpr const char* kEmbeddingsFile = "embeddings.pemb";

struct DataDir {
    std::filesystem::path root;
    corpus::Corpus corpus;
    corpus::SplitAssignment split;
    /// Synthetic training dialogues, when augmentation was run.
    std::optional<corpus::Corpus> augmented;

    bool has_embeddings() const;
    /// File encoder when the directory holds embeddings, else hashed
    /// n-grams of dimension `dim`.
    Featurizer featurizer(std::size_t dim) const;
    /// Rebuilds the featurizer recorded in a checkpoint.
    Featurizer featurizer(const nlohmann::json& encoder) const;
};

/// Reads corpus.jsonl and split.json, plus augmented.jsonl when present.
DataDir load_data_dir(const std::filesystem::path& root);

}  // namespace hcgnn::exp
