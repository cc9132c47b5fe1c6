// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors
//
// Clean and poisoned corpora, query sets, and the tokenizer every other
// module counts with.

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace typeswap {

struct Document {
    std::string id;
    std::string text;

    bool operator==(const Document&) const = default;
};

struct Query {
    std::string id;
    std::string question;
    std::string gold_answer;

    bool operator==(const Query&) const = default;
};

/// Byte range [start, end) of a token; `surface` views into the tokenized text.
struct TokenSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string_view surface;
};

/// Ordered, immutable document collection with unique ids.
class Corpus {
public:
    Corpus() = default;

    /// Validates id uniqueness and non-blank text.
    static Corpus from_documents(std::vector<Document> documents);

    std::size_t size() const noexcept { return documents_.size(); }
    bool empty() const noexcept { return documents_.empty(); }

    const Document& operator[](std::size_t i) const { return documents_[i]; }
    const Document& at(std::size_t i) const { return documents_.at(i); }
    std::optional<std::size_t> find(std::string_view id) const;

    auto begin() const noexcept { return documents_.begin(); }
    auto end() const noexcept { return documents_.end(); }
    const std::vector<Document>& documents() const noexcept { return documents_; }

    bool operator==(const Corpus& other) const { return documents_ == other.documents_; }

private:
    std::vector<Document> documents_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Line-delimited JSON: {"id": ..., "text": ...} per line.
Corpus parse_corpus(std::string_view jsonl, const std::string& origin = "<memory>");
std::string serialize_corpus(const Corpus& corpus);
Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Line-delimited JSON: {"id": ..., "question": ..., "answer": ...} per line.
std::vector<Query> parse_queries(std::string_view jsonl, const std::string& origin = "<memory>");
std::string serialize_queries(const std::vector<Query>& queries);
std::vector<Query> load_queries(const std::filesystem::path& path);
void save_queries(const std::vector<Query>& queries, const std::filesystem::path& path);

/// Splits on ASCII whitespace; each ASCII punctuation byte is its own token
/// except apostrophes and hyphens joining two word characters. Bytes >= 0x80
/// are word characters, so multi-byte code points are never split.
std::vector<TokenSpan> tokenize(std::string_view text);

} // namespace typeswap
