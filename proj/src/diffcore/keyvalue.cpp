// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/diffcore/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "hcgnn/diffcore/error.hpp"

namespace hcgnn::kv {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<Entry> read_entries(std::istream& in) {
    std::vector<Entry> out;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        const auto t = trim(text);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Fault("config line " + std::to_string(line) + ": expected key=value");
        Entry e{trim(t.substr(0, eq)), trim(t.substr(eq + 1)), line};
        if (e.key.empty()) throw Fault("config line " + std::to_string(line) + ": empty key");
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<Entry> load_entries(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Fault("cannot open config file " + path.string());
    return read_entries(in);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, v);
    if (value.empty() || ec != std::errc() || ptr != end)
        throw Fault("config key '" + key + "' expects a nonnegative integer, got '" + value + "'");
    return v;
}

std::size_t parse_size(const std::string& key, const std::string& value) {
    return static_cast<std::size_t>(parse_u64(key, value));
}

double parse_real(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != value.size())
        throw Fault("config key '" + key + "' expects a number, got '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw Fault("config key '" + key + "' expects true/false, got '" + value + "'");
}

std::vector<double> parse_reals(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
    return out;
}

std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace hcgnn::kv
