// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace hcgnn::kv {

struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/// Flat `key = value` lines. Blank lines and lines starting with '#' are
/// skipped; surrounding whitespace is trimmed.
std::vector<Entry> read_entries(std::istream& in);
std::vector<Entry> load_entries(const std::filesystem::path& path);

std::size_t parse_size(const std::string& key, const std::string& value);
std::uint64_t parse_u64(const std::string& key, const std::string& value);
double parse_real(const std::string& key, const std::string& value);
bool parse_bool(const std::string& key, const std::string& value);
/// Comma-separated reals.
std::vector<double> parse_reals(const std::string& key, const std::string& value);

/// Shortest text that reads back to the same double.
std::string format_real(double v);

}  // namespace hcgnn::kv
