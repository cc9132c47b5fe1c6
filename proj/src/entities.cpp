// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#include "typeswap/entities.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "typeswap/detail/parallel.hpp"
#include "typeswap/error.hpp"
#include "typeswap/io.hpp"

namespace typeswap {

namespace {

constexpr std::array<std::string_view, kAllEntityTypes.size()> kLabels = {
    "PERSON", "NORP",     "FAC",  "ORG",  "GPE",     "LOC",   "PRODUCT",  "EVENT",
    "WORK_OF_ART", "LAW", "LANGUAGE", "DATE", "TIME", "PERCENT", "MONEY", "QUANTITY",
    "ORDINAL", "CARDINAL", "ALIAS", "BRIDGE",
};

// Capitalized only because they open a sentence.
const std::unordered_set<std::string_view> kFunctionWords = {
    "A",     "An",    "The",   "In",     "On",    "At",    "Of",     "For",   "By",
    "With",  "From",  "To",    "And",    "But",   "Or",    "As",     "After", "Before",
    "During", "His",  "Her",   "Its",    "Their", "This",  "That",   "These", "Those",
    "It",    "He",    "She",   "They",   "We",    "Which", "What",   "Who",   "Whom",
    "When",  "Where", "How",   "Why",    "Is",    "Was",   "Were",   "Are",   "Did",
    "Does",  "Do",    "If",    "While",  "There", "Then",  "Since",  "Although",
};

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool looks_like_year(std::string_view s) {
    return s.size() == 4 && all_digits(s) && (s[0] == '1' || s[0] == '2');
}

} // namespace

std::string_view to_string(EntityType type) noexcept {
    return kLabels[static_cast<std::size_t>(type)];
}

std::optional<EntityType> parse_entity_type(std::string_view label) noexcept {
    for (std::size_t i = 0; i < kLabels.size(); ++i) {
        if (kLabels[i] == label) {
            return kAllEntityTypes[i];
        }
    }
    return std::nullopt;
}

std::string describe(const TypedEntity& entity) {
    return "(\"" + entity.surface + "\", " + std::string(to_string(entity.type)) + ")";
}

EntityInventory EntityInventory::build(const Corpus& corpus, std::vector<Mention> mentions) {
    EntityInventory inv;
    inv.per_document_.resize(corpus.size());
    for (auto& m : mentions) {
        if (m.doc >= corpus.size()) {
            fail(ErrorKind::Reference, "mention of " + describe(m.entity) +
                                           " references document index " + std::to_string(m.doc) +
                                           " outside the corpus");
        }
        const auto& text = corpus[m.doc].text;
        if (m.entity.surface.empty() || m.start >= m.end || m.end > text.size() ||
            std::string_view(text).substr(m.start, m.end - m.start) != m.entity.surface) {
            fail(ErrorKind::StaleAnnotation,
                 "stale annotation: " + describe(m.entity) + " at [" + std::to_string(m.start) +
                     ", " + std::to_string(m.end) + ") in document '" + corpus[m.doc].id +
                     "' does not match the document text");
        }
        inv.per_document_[m.doc].push_back(std::move(m));
    }
    for (std::size_t d = 0; d < inv.per_document_.size(); ++d) {
        auto& list = inv.per_document_[d];
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        std::set<TypedEntity> counted;
        for (const auto& m : list) {
            auto& record = inv.records_[m.entity];
            record.mentions.push_back(m);
            if (counted.insert(m.entity).second) {
                ++record.frequency;
            }
        }
    }
    return inv;
}

std::size_t EntityInventory::frequency(const TypedEntity& entity) const {
    auto it = records_.find(entity);
    return it == records_.end() ? 0 : it->second.frequency;
}

const EntityInventory::Record* EntityInventory::find(const TypedEntity& entity) const {
    auto it = records_.find(entity);
    return it == records_.end() ? nullptr : &it->second;
}

std::vector<TypedEntity> EntityInventory::entities_of_type(EntityType type) const {
    std::vector<TypedEntity> out;
    for (const auto& [entity, record] : records_) {
        if (entity.type == type) {
            out.push_back(entity);
        }
    }
    return out;
}

std::vector<TypedEntity> EntityInventory::document_entities(std::size_t doc) const {
    std::vector<TypedEntity> out;
    for (const auto& m : per_document_.at(doc)) {
        out.push_back(m.entity);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

EntityInventory parse_annotations(const Corpus& corpus, std::string_view jsonl,
                                  const std::string& origin) {
    std::vector<Mention> mentions;
    io::for_each_jsonl_record(jsonl, origin, [&](std::size_t line, const nlohmann::json& record) {
        const auto where = origin + ":" + std::to_string(line);
        auto doc_id = io::require_string(record, "doc_id", origin, line);
        auto doc = corpus.find(doc_id);
        if (!doc) {
            fail(ErrorKind::Reference, where + ": unknown doc_id '" + doc_id + "'");
        }
        auto list = record.find("mentions");
        if (list == record.end() || !list->is_array()) {
            fail(ErrorKind::Parse, where + ": missing array field 'mentions'");
        }
        for (const auto& item : *list) {
            if (!item.is_object()) {
                fail(ErrorKind::Parse, where + ": mention is not an object");
            }
            Mention m;
            m.doc = *doc;
            m.entity.surface = io::require_string(item, "surface", origin, line);
            auto label = io::require_string(item, "type", origin, line);
            auto type = parse_entity_type(label);
            if (!type) {
                fail(ErrorKind::Validation, where + ": unknown entity type '" + label + "'");
            }
            m.entity.type = *type;
            auto start = item.find("start");
            auto end = item.find("end");
            if (start == item.end() || end == item.end() || !start->is_number_unsigned() ||
                !end->is_number_unsigned()) {
                fail(ErrorKind::Parse, where + ": mention needs unsigned 'start' and 'end'");
            }
            m.start = start->get<std::size_t>();
            m.end = end->get<std::size_t>();
            mentions.push_back(std::move(m));
        }
    });
    return EntityInventory::build(corpus, std::move(mentions));
}

EntityInventory import_annotations(const Corpus& corpus, const std::filesystem::path& path) {
    return parse_annotations(corpus, io::read_file(path), path.string());
}

std::string serialize_annotations(const Corpus& corpus, const EntityInventory& inventory) {
    std::string out;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        nlohmann::ordered_json record;
        record["doc_id"] = corpus[d].id;
        auto mentions = nlohmann::ordered_json::array();
        for (const auto& m : inventory.document_mentions(d)) {
            nlohmann::ordered_json item;
            item["surface"] = m.entity.surface;
            item["type"] = to_string(m.entity.type);
            item["start"] = m.start;
            item["end"] = m.end;
            mentions.push_back(std::move(item));
        }
        record["mentions"] = std::move(mentions);
        out += record.dump();
        out += '\n';
    }
    return out;
}

std::vector<Mention> extract_document(std::size_t doc, std::string_view text,
                                      const Gazetteer& gazetteer, const ExtractorOptions& options) {
    std::vector<Mention> out;
    const auto tokens = tokenize(text);
    auto emit = [&](std::size_t start, std::size_t end, EntityType fallback) {
        auto surface = text.substr(start, end - start);
        auto hit = gazetteer.find(surface);
        out.push_back(Mention{doc, start, end,
                              TypedEntity{std::string(surface),
                                          hit != gazetteer.end() ? hit->second : fallback}});
    };

    std::size_t i = 0;
    while (i < tokens.size()) {
        const auto& tok = tokens[i];
        if (all_digits(tok.surface)) {
            if (i + 1 < tokens.size() && tokens[i + 1].surface == "%" &&
                tokens[i + 1].start == tok.end) {
                emit(tok.start, tokens[i + 1].end, EntityType::Percent);
                i += 2;
                continue;
            }
            emit(tok.start, tok.end,
                 looks_like_year(tok.surface) ? EntityType::Date : EntityType::Cardinal);
            ++i;
            continue;
        }
        if (!is_upper(tok.surface.front())) {
            ++i;
            continue;
        }
        std::size_t first = i;
        std::size_t last = i;
        while (last + 1 < tokens.size() && is_upper(tokens[last + 1].surface.front())) {
            ++last;
        }
        i = last + 1;
        if (options.trim_leading_function_words) {
            while (first <= last && kFunctionWords.contains(tokens[first].surface)) {
                ++first;
            }
            if (first > last) {
                continue;
            }
        }
        emit(tokens[first].start, tokens[last].end, options.capitalized_default);
    }
    return out;
}

EntityInventory extract_builtin(const Corpus& corpus, const Gazetteer& gazetteer,
                                const ExtractorOptions& options) {
    std::vector<std::vector<Mention>> per_doc(corpus.size());
    detail::parallel_for(corpus.size(), options.threads, [&](std::size_t d) {
        per_doc[d] = extract_document(d, corpus[d].text, gazetteer, options);
    });
    std::vector<Mention> all;
    for (auto& list : per_doc) {
        std::move(list.begin(), list.end(), std::back_inserter(all));
    }
    return EntityInventory::build(corpus, std::move(all));
}

Gazetteer parse_gazetteer(std::string_view json_text, const std::string& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::Parse, origin + ": malformed gazetteer: " + e.what());
    }
    if (!doc.is_object()) {
        fail(ErrorKind::Parse, origin + ": gazetteer must map surface to type label");
    }
    Gazetteer out;
    for (const auto& [surface, label] : doc.items()) {
        if (!label.is_string()) {
            fail(ErrorKind::Parse, origin + ": type for '" + surface + "' is not a string");
        }
        auto type = parse_entity_type(label.get<std::string>());
        if (!type) {
            fail(ErrorKind::Validation, origin + ": unknown entity type '" +
                                            label.get<std::string>() + "' for '" + surface + "'");
        }
        out.emplace(surface, *type);
    }
    return out;
}

Gazetteer load_gazetteer(const std::filesystem::path& path) {
    return parse_gazetteer(io::read_file(path), path.string());
}

std::string serialize_gazetteer(const Gazetteer& gazetteer) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto& [surface, type] : gazetteer) {
        doc[surface] = to_string(type);
    }
    return doc.dump(2) + "\n";
}

} // namespace typeswap
