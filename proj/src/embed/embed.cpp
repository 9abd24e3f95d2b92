// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/embed/embed.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "hcgnn/diffcore/error.hpp"

namespace hcgnn::embed {

namespace {

constexpr char kMagic[4] = {'P', 'E', 'M', 'B'};
constexpr std::uint32_t kVersion = 1;
constexpr std::string_view kStart = "\x02";
constexpr std::string_view kEnd = "\x03";

template <class T>
void put_le(std::ostream& out, T v) {
    char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, sizeof(T));
}

template <class T>
T get_le(std::istream& in, const char* what) {
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(T)))
        throw Fault(std::string("embedding file truncated while reading ") + what);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
}

}  // namespace

void EncoderSpec::validate() const {
    if (dim == 0) throw Fault("embedding dimension must be positive");
    if (kind == EncoderKind::HashedNgram) {
        if (ngram_sizes.empty()) throw Fault("hashed encoder needs at least one n-gram size");
        for (auto n : ngram_sizes)
            if (n == 0) throw Fault("n-gram size must be positive");
    }
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::string> code_points(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto lead = static_cast<unsigned char>(text[i]);
        std::size_t len = 1;
        if (lead >= 0xf0) len = 4;
        else if (lead >= 0xe0) len = 3;
        else if (lead >= 0xc0) len = 2;
        len = std::min(len, text.size() - i);
        out.emplace_back(text.substr(i, len));
        i += len;
    }
    return out;
}

Encoded encode_utterance(std::string_view text, const EncoderSpec& spec) {
    spec.validate();
    if (spec.kind != EncoderKind::HashedNgram) throw Fault("encode_utterance needs a hashed n-gram spec");
    Encoded e{std::vector<double>(spec.dim, 0.0), true};
    if (text.empty()) return e;

    std::vector<std::string> units{std::string(kStart)};
    for (auto& cp : code_points(text)) units.push_back(std::move(cp));
    units.emplace_back(kEnd);

    for (auto n : spec.ngram_sizes) {
        for (std::size_t s = 0; s + n <= units.size(); ++s) {
            std::string key = spec.salt;
            key += '\x1f';
            for (std::size_t k = 0; k < n; ++k) key += units[s + k];
            const auto h = fnv1a64(key);
            // Bucket from the bits above the sign bit so the two stay independent.
            e.values[(h >> 1) % spec.dim] += (h & 1) ? -1.0 : 1.0;
        }
    }
    double norm2 = 0.0;
    for (double v : e.values) norm2 += v * v;
    if (norm2 == 0.0) return e;
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : e.values) v *= inv;
    e.featureless = false;
    return e;
}

std::string row_key(std::string_view dialogue_id, std::size_t index) {
    return std::string(dialogue_id) + "#" + std::to_string(index);
}

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {}

void EmbeddingTable::set(const std::string& key, std::vector<float> row) {
    if (row.size() != dim_)
        throw Fault("embedding row '" + key + "' has length " + std::to_string(row.size()) +
                    ", table dimension is " + std::to_string(dim_));
    for (std::size_t i = 0; i < row.size(); ++i)
        if (!std::isfinite(row[i]))
            throw Fault("embedding row '" + key + "' has a non-finite entry at " + std::to_string(i));
    if (key.size() > 0xffff) throw Fault("embedding key longer than 65535 bytes");
    rows_[key] = std::move(row);
}

const std::vector<float>& EmbeddingTable::at(const std::string& key) const {
    auto it = rows_.find(key);
    if (it == rows_.end()) throw Fault("no embedding for '" + key + "'");
    return it->second;
}

void add_dialogue_rows(EmbeddingTable& table, const corpus::Dialogue& d, const EncoderSpec& spec) {
    if (table.dim() != spec.dim) throw Fault("encoder dimension differs from table dimension");
    for (const auto& u : d.utterances) {
        const auto e = encode_utterance(u.text, spec);
        table.set(row_key(d.id, u.index), std::vector<float>(e.values.begin(), e.values.end()));
    }
}

EmbeddingTable encode_corpus(const corpus::Corpus& c, const EncoderSpec& spec, Execution exec) {
    spec.validate();
    const auto& ds = c.dialogues();
    std::vector<EmbeddingTable> parts(ds.size(), EmbeddingTable(spec.dim));
    for_each_index(ds.size(), exec, [&](std::size_t i) { add_dialogue_rows(parts[i], ds[i], spec); });
    EmbeddingTable table(spec.dim);
    for (auto& p : parts)
        for (const auto& [k, v] : p.rows()) table.set(k, v);
    return table;
}

std::vector<std::string> missing_keys(const EmbeddingTable& table, const corpus::Corpus& c) {
    std::vector<std::string> out;
    for (const auto& d : c.dialogues())
        for (const auto& u : d.utterances) {
            auto k = row_key(d.id, u.index);
            if (!table.contains(k)) out.push_back(std::move(k));
        }
    return out;
}

diff::Tensor utterance_matrix(const EmbeddingTable& table, std::string_view dialogue_id,
                              const std::vector<corpus::Utterance>& utterances) {
    if (utterances.empty()) throw Fault("dialogue '" + std::string(dialogue_id) + "' has no utterances");
    diff::Tensor m({utterances.size(), table.dim()});
    for (std::size_t r = 0; r < utterances.size(); ++r) {
        const auto& row = table.at(row_key(dialogue_id, utterances[r].index));
        for (std::size_t c = 0; c < row.size(); ++c) m.at(r, c) = row[c];
    }
    return m;
}

void write_embeddings(const EmbeddingTable& table, std::ostream& out) {
    out.write(kMagic, 4);
    put_le<std::uint32_t>(out, kVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(table.dim()));
    put_le<std::uint64_t>(out, table.size());
    for (const auto& [key, row] : table.rows()) {
        put_le<std::uint16_t>(out, static_cast<std::uint16_t>(key.size()));
        out.write(key.data(), static_cast<std::streamsize>(key.size()));
        for (float f : row) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
    }
}

EmbeddingTable read_embeddings(std::istream& in, std::size_t expected_dim) {
    char magic[4];
    if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic))
        throw Fault("embedding file has wrong magic (expected PEMB)");
    const auto version = get_le<std::uint32_t>(in, "version");
    if (version != kVersion) throw Fault("unsupported embedding file version " + std::to_string(version));
    const auto dim = get_le<std::uint32_t>(in, "dimension");
    if (dim == 0) throw Fault("embedding file declares dimension 0");
    if (expected_dim != 0 && dim != expected_dim)
        throw Fault("embedding dimension " + std::to_string(dim) + " does not match expected " +
                    std::to_string(expected_dim));
    const auto rows = get_le<std::uint64_t>(in, "row count");
    EmbeddingTable table(dim);
    for (std::uint64_t r = 0; r < rows; ++r) {
        const auto len = get_le<std::uint16_t>(in, "key length");
        std::string key(len, '\0');
        if (!in.read(key.data(), len)) throw Fault("embedding file truncated in key of row " + std::to_string(r));
        std::vector<float> row(dim);
        for (auto& f : row) f = std::bit_cast<float>(get_le<std::uint32_t>(in, "row payload"));
        if (table.contains(key)) throw Fault("duplicate embedding key '" + key + "'");
        table.set(key, std::move(row));
    }
    return table;
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Fault("cannot write embedding file " + path.string());
    write_embeddings(table, out);
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, std::size_t expected_dim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Fault("cannot open embedding file " + path.string());
    return read_embeddings(in, expected_dim);
}

}  // namespace hcgnn::embed
