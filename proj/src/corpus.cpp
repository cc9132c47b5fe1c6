// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#include "typeswap/corpus.hpp"

#include <json.hpp>

#include "typeswap/error.hpp"
#include "typeswap/io.hpp"

namespace typeswap {

namespace {

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
           c >= 0x80;
}

bool is_blank(std::string_view text) {
    for (unsigned char c : text) {
        if (!is_space(c)) {
            return false;
        }
    }
    return true;
}

} // namespace

Corpus Corpus::from_documents(std::vector<Document> documents) {
    Corpus corpus;
    corpus.index_.reserve(documents.size());
    for (std::size_t i = 0; i < documents.size(); ++i) {
        const auto& doc = documents[i];
        if (doc.id.empty()) {
            fail(ErrorKind::Validation, "document " + std::to_string(i) + " has an empty id");
        }
        if (is_blank(doc.text)) {
            fail(ErrorKind::Validation, "document '" + doc.id + "' has blank text");
        }
        if (!corpus.index_.emplace(doc.id, i).second) {
            fail(ErrorKind::Validation, "duplicate document id '" + doc.id + "'");
        }
    }
    corpus.documents_ = std::move(documents);
    return corpus;
}

std::optional<std::size_t> Corpus::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Corpus parse_corpus(std::string_view jsonl, const std::string& origin) {
    std::vector<Document> documents;
    io::for_each_jsonl_record(jsonl, origin, [&](std::size_t line, const nlohmann::json& record) {
        Document doc;
        doc.id = io::require_string(record, "id", origin, line);
        doc.text = io::require_string(record, "text", origin, line);
        documents.push_back(std::move(doc));
    });
    return Corpus::from_documents(std::move(documents));
}

std::string serialize_corpus(const Corpus& corpus) {
    std::string out;
    for (const auto& doc : corpus) {
        nlohmann::ordered_json record;
        record["id"] = doc.id;
        record["text"] = doc.text;
        out += record.dump();
        out += '\n';
    }
    return out;
}

Corpus load_corpus(const std::filesystem::path& path) {
    return parse_corpus(io::read_file(path), path.string());
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    io::write_file_atomic(path, serialize_corpus(corpus));
}

std::vector<Query> parse_queries(std::string_view jsonl, const std::string& origin) {
    std::vector<Query> queries;
    std::unordered_map<std::string, std::size_t> seen;
    io::for_each_jsonl_record(jsonl, origin, [&](std::size_t line, const nlohmann::json& record) {
        Query q;
        q.id = io::require_string(record, "id", origin, line);
        q.question = io::require_string(record, "question", origin, line);
        q.gold_answer = io::require_string(record, "answer", origin, line);
        if (q.id.empty() || is_blank(q.question) || is_blank(q.gold_answer)) {
            fail(ErrorKind::Validation,
                 origin + ":" + std::to_string(line) + ": query fields must be non-empty");
        }
        if (!seen.emplace(q.id, line).second) {
            fail(ErrorKind::Validation, origin + ":" + std::to_string(line) +
                                            ": duplicate query id '" + q.id + "'");
        }
        queries.push_back(std::move(q));
    });
    return queries;
}

std::string serialize_queries(const std::vector<Query>& queries) {
    std::string out;
    for (const auto& q : queries) {
        nlohmann::ordered_json record;
        record["id"] = q.id;
        record["question"] = q.question;
        record["answer"] = q.gold_answer;
        out += record.dump();
        out += '\n';
    }
    return out;
}

std::vector<Query> load_queries(const std::filesystem::path& path) {
    return parse_queries(io::read_file(path), path.string());
}

void save_queries(const std::vector<Query>& queries, const std::filesystem::path& path) {
    io::write_file_atomic(path, serialize_queries(queries));
}

std::vector<TokenSpan> tokenize(std::string_view text) {
    std::vector<TokenSpan> spans;
    const auto n = text.size();
    auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
    std::size_t i = 0;
    while (i < n) {
        unsigned char c = byte(i);
        if (is_space(c)) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (!is_word(c)) {
            ++i;
        } else {
            ++i;
            while (i < n) {
                unsigned char d = byte(i);
                if (is_word(d)) {
                    ++i;
                } else if ((d == '\'' || d == '-') && i + 1 < n && is_word(byte(i + 1))) {
                    i += 2;
                } else {
                    break;
                }
            }
        }
        spans.push_back(TokenSpan{start, i, text.substr(start, i - start)});
    }
    return spans;
}

} // namespace typeswap
