// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#include "typeswap/io.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include <openssl/evp.h>
#include <unistd.h>

#include "typeswap/error.hpp"

namespace typeswap::io {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        fail(ErrorKind::Io, "read failure on '" + path.string() + "'");
    }
    return std::move(buffer).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(ErrorKind::Io, "cannot open '" + tmp.string() + "' for writing");
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            fail(ErrorKind::Io, "write failure on '" + path.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorKind::Io, "cannot move output into place at '" + path.string() + "'");
    }
}

void for_each_jsonl_record(std::string_view jsonl, const std::string& origin,
                           const std::function<void(std::size_t, const nlohmann::json&)>& visit) {
    std::size_t line_number = 0;
    std::size_t pos = 0;
    while (pos < jsonl.size()) {
        auto nl = jsonl.find('\n', pos);
        auto line = jsonl.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? jsonl.size() : nl + 1;
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.find_first_not_of(" \t") == std::string_view::npos) {
            continue;
        }
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            fail(ErrorKind::Parse, origin + ":" + std::to_string(line_number) +
                                       ": malformed record: " + e.what());
        }
        if (!record.is_object()) {
            fail(ErrorKind::Parse,
                 origin + ":" + std::to_string(line_number) + ": record is not an object");
        }
        visit(line_number, record);
    }
}

std::string require_string(const nlohmann::json& record, const char* field,
                           const std::string& origin, std::size_t line) {
    auto it = record.find(field);
    if (it == record.end() || !it->is_string()) {
        fail(ErrorKind::Parse, origin + ":" + std::to_string(line) + ": missing string field '" +
                                   field + "'");
    }
    return it->get<std::string>();
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        fail(ErrorKind::Io, "sha256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

} // namespace typeswap::io
