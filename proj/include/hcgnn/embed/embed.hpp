// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hcgnn/corpus/corpus.hpp"
#include "hcgnn/diffcore/parallel.hpp"
#include "hcgnn/diffcore/tensor.hpp"

namespace hcgnn::embed {

enum class EncoderKind { HashedNgram, File };

struct EncoderSpec {
    EncoderKind kind = EncoderKind::HashedNgram;
    std::size_t dim = 32;
    std::vector<std::size_t> ngram_sizes{2, 3};
    std::string salt = "hcgnn";
    std::filesystem::path file;

    void validate() const;
};

struct Encoded {
    std::vector<double> values;
    /// No n-gram survived (empty text or full sign cancellation); the
    /// vector is all zeros and left unnormalized.
    bool featureless = false;
};

std::uint64_t fnv1a64(std::string_view bytes);

/// Splits UTF-8 text into code points. Stray continuation bytes become
/// single-byte units.
std::vector<std::string> code_points(std::string_view text);

/// Signed hashed character n-gram counts, L2-normalized. Text is framed by
/// start/end sentinels so a single character still yields n-grams.
Encoded encode_utterance(std::string_view text, const EncoderSpec& spec);

/// Key of one utterance row: "<dialogue id>#<utterance index>".
std::string row_key(std::string_view dialogue_id, std::size_t index);

class EmbeddingTable {
public:
    explicit EmbeddingTable(std::size_t dim = 0);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return rows_.size(); }

    /// Throws on length mismatch or non-finite entries.
    void set(const std::string& key, std::vector<float> row);
    bool contains(const std::string& key) const { return rows_.count(key) > 0; }
    const std::vector<float>& at(const std::string& key) const;
    const std::map<std::string, std::vector<float>>& rows() const noexcept { return rows_; }

    bool operator==(const EmbeddingTable&) const = default;

private:
    std::size_t dim_;
    std::map<std::string, std::vector<float>> rows_;
};

/// Encodes every utterance of every dialogue.
EmbeddingTable encode_corpus(const corpus::Corpus& c, const EncoderSpec& spec,
                             Execution exec = Execution::Parallel);
void add_dialogue_rows(EmbeddingTable& table, const corpus::Dialogue& d, const EncoderSpec& spec);

/// Every key the corpus needs but the table lacks, in corpus order.
std::vector<std::string> missing_keys(const EmbeddingTable& table, const corpus::Corpus& c);

/// n×d feature matrix for the given utterances of a dialogue.
diff::Tensor utterance_matrix(const EmbeddingTable& table, std::string_view dialogue_id,
                              const std::vector<corpus::Utterance>& utterances);

void write_embeddings(const EmbeddingTable& table, std::ostream& out);
EmbeddingTable read_embeddings(std::istream& in, std::size_t expected_dim = 0);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);
EmbeddingTable load_embeddings(const std::filesystem::path& path, std::size_t expected_dim = 0);

}  // namespace hcgnn::embed
