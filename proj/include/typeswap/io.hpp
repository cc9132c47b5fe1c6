// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace typeswap::io {

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Calls `visit(line_number, record)` for every non-empty line; line numbers are 1-based.
void for_each_jsonl_record(std::string_view jsonl, const std::string& origin,
                           const std::function<void(std::size_t, const nlohmann::json&)>& visit);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Required string field; raises a parse error naming origin and line.
std::string require_string(const nlohmann::json& record, const char* field,
                           const std::string& origin, std::size_t line);

} // namespace typeswap::io
