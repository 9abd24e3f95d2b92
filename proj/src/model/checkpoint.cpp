// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

#include "hcgnn/diffcore/error.hpp"
#include "hcgnn/model/model.hpp"

namespace hcgnn::model {

using namespace diff;
using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'P', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;
const std::string kOptM = "opt.m.";
const std::string kOptV = "opt.v.";
const std::string kOptStep = "opt.step.";

template <class T>
void put(std::ostream& out, T v) {
    char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& in, const char* what) {
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(T)))
        throw Fault(std::string("checkpoint truncated while reading ") + what);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
}

void put_block(std::ostream& out, const std::string& name, const Tensor& t) {
    put<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (auto e : t.shape()) put<std::uint64_t>(out, e);
    for (double v : t.values()) put<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
}

std::pair<std::string, Tensor> get_block(std::istream& in) {
    const auto len = get<std::uint16_t>(in, "block name length");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw Fault("checkpoint truncated in block name");
    const auto rank = get<std::uint32_t>(in, "block rank");
    if (rank == 0 || rank > 8) throw Fault("checkpoint block '" + name + "' has rank " + std::to_string(rank));
    Shape shape(rank);
    for (auto& e : shape) {
        e = get<std::uint64_t>(in, "block shape");
        if (e == 0 || e > (1ULL << 32)) throw Fault("checkpoint block '" + name + "' has a bad extent");
    }
    Tensor t(shape);
    for (auto& v : t.values()) v = std::bit_cast<double>(get<std::uint64_t>(in, "block payload"));
    return {std::move(name), std::move(t)};
}

bool starts_with(const std::string& s, const std::string& p) { return s.compare(0, p.size(), p) == 0; }

}  // namespace

bool Checkpoint::operator==(const Checkpoint& o) const {
    if (!(config == o.config) || !(params == o.params) || meta != o.meta) return false;
    if (optimizer.size() != o.optimizer.size()) return false;
    for (const auto& [name, st] : optimizer) {
        auto it = o.optimizer.find(name);
        if (it == o.optimizer.end() || !(st.m == it->second.m) || !(st.v == it->second.v) ||
            st.step != it->second.step)
            return false;
    }
    return true;
}

void write_checkpoint(const Checkpoint& ck, std::ostream& out) {
    const auto header = json{{"model", ck.config.to_json()}, {"meta", ck.meta}}.dump();
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(header.size()));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(ck.params.size() + 3 * ck.optimizer.size()));
    for (const auto& p : ck.params) put_block(out, p.name, p.tensor);
    for (const auto& [name, st] : ck.optimizer) {
        put_block(out, kOptM + name, st.m);
        put_block(out, kOptV + name, st.v);
        put_block(out, kOptStep + name, Tensor::vector({static_cast<double>(st.step)}));
    }
}

Checkpoint read_checkpoint(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic))
        throw Fault("checkpoint has wrong magic (expected PCKP)");
    const auto version = get<std::uint32_t>(in, "version");
    if (version != kVersion) throw Fault("unsupported checkpoint version " + std::to_string(version));
    const auto hlen = get<std::uint32_t>(in, "header length");
    std::string header(hlen, '\0');
    if (!in.read(header.data(), hlen)) throw Fault("checkpoint truncated in header");
    Checkpoint ck;
    try {
        const auto j = json::parse(header);
        ck.config = ModelConfig::from_json(j.at("model"));
        ck.meta = j.at("meta");
    } catch (const json::exception& e) {
        throw Fault(std::string("checkpoint header: ") + e.what());
    }
    const auto blocks = get<std::uint32_t>(in, "block count");
    ParamStore params;
    for (std::uint32_t b = 0; b < blocks; ++b) {
        auto [name, t] = get_block(in);
        if (starts_with(name, kOptM)) ck.optimizer[name.substr(kOptM.size())].m = std::move(t);
        else if (starts_with(name, kOptV)) ck.optimizer[name.substr(kOptV.size())].v = std::move(t);
        else if (starts_with(name, kOptStep)) ck.optimizer[name.substr(kOptStep.size())].step =
            static_cast<std::uint64_t>(t[0]);
        else params.add(name, std::move(t));
    }
    for (const auto& [name, st] : ck.optimizer) {
        if (!params.contains(name)) throw Fault("optimizer state for unknown parameter '" + name + "'");
        const auto& shape = params[params.find(name)].tensor.shape();
        if (st.m.shape() != shape || st.v.shape() != shape)
            throw Fault("optimizer state for '" + name + "' has the wrong shape");
    }
    // Validates names and shapes against the configured layout.
    ck.params = Model(ck.config, std::move(params)).params();
    return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Fault("cannot write checkpoint " + path.string());
    write_checkpoint(ck, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Fault("cannot open checkpoint " + path.string());
    return read_checkpoint(in);
}

}  // namespace hcgnn::model
