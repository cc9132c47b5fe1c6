// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors
//
// Typed entity inventory: per-document mentions and corpus document
// frequency f(e, type), built from imported annotations or the offline
// heuristic extractor.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "typeswap/corpus.hpp"

namespace typeswap {

enum class EntityType : std::uint8_t {
    Person,
    Norp,
    Fac,
    Org,
    Gpe,
    Loc,
    Product,
    Event,
    WorkOfArt,
    Law,
    Language,
    Date,
    Time,
    Percent,
    Money,
    Quantity,
    Ordinal,
    Cardinal,
    Alias,
    Bridge,
};

inline constexpr std::array kAllEntityTypes = {
    EntityType::Person,   EntityType::Norp,     EntityType::Fac,      EntityType::Org,
    EntityType::Gpe,      EntityType::Loc,      EntityType::Product,  EntityType::Event,
    EntityType::WorkOfArt, EntityType::Law,     EntityType::Language, EntityType::Date,
    EntityType::Time,     EntityType::Percent,  EntityType::Money,    EntityType::Quantity,
    EntityType::Ordinal,  EntityType::Cardinal, EntityType::Alias,    EntityType::Bridge,
};

std::string_view to_string(EntityType type) noexcept;
std::optional<EntityType> parse_entity_type(std::string_view label) noexcept;

/// Entity identity is the exact (surface, type) pair; no case folding.
struct TypedEntity {
    std::string surface;
    EntityType type = EntityType::Person;

    auto operator<=>(const TypedEntity&) const = default;
    bool operator==(const TypedEntity&) const = default;
};

std::string describe(const TypedEntity& entity);

struct TypedEntityHash {
    std::size_t operator()(const TypedEntity& e) const noexcept {
        return std::hash<std::string>{}(e.surface) * 31u + static_cast<std::size_t>(e.type);
    }
};

struct Mention {
    std::size_t doc = 0;  // index into the owning corpus
    std::size_t start = 0;
    std::size_t end = 0;
    TypedEntity entity;

    auto operator<=>(const Mention&) const = default;
    bool operator==(const Mention&) const = default;
};

/// Immutable mention index plus document frequencies over one corpus.
class EntityInventory {
public:
    struct Record {
        std::size_t frequency = 0;       // distinct documents with >= 1 mention
        std::vector<Mention> mentions;   // every occurrence, corpus order
    };

    EntityInventory() = default;

    /// Checks every span against `corpus` (stale-annotation error on mismatch),
    /// drops exact duplicates and sorts mentions by position.
    static EntityInventory build(const Corpus& corpus, std::vector<Mention> mentions);

    std::size_t document_count() const noexcept { return per_document_.size(); }
    std::size_t entity_count() const noexcept { return records_.size(); }

    /// f(e, type); zero for entities with no mentions.
    std::size_t frequency(const TypedEntity& entity) const;
    const Record* find(const TypedEntity& entity) const;

    const std::map<TypedEntity, Record>& records() const noexcept { return records_; }
    std::vector<TypedEntity> entities_of_type(EntityType type) const;

    std::span<const Mention> document_mentions(std::size_t doc) const {
        return per_document_.at(doc);
    }
    /// E(d_i): distinct entities mentioned in one document, sorted.
    std::vector<TypedEntity> document_entities(std::size_t doc) const;

    bool operator==(const EntityInventory& other) const {
        return per_document_ == other.per_document_;
    }

private:
    std::vector<std::vector<Mention>> per_document_;
    std::map<TypedEntity, Record> records_;
};

inline std::size_t frequency(const EntityInventory& inventory, const TypedEntity& entity) {
    return inventory.frequency(entity);
}

// Annotation files: one JSON record per document,
// {"doc_id": ..., "mentions": [{"surface", "type", "start", "end"}, ...]}.
EntityInventory parse_annotations(const Corpus& corpus, std::string_view jsonl,
                                  const std::string& origin = "<memory>");
EntityInventory import_annotations(const Corpus& corpus, const std::filesystem::path& path);
std::string serialize_annotations(const Corpus& corpus, const EntityInventory& inventory);

using Gazetteer = std::map<std::string, EntityType, std::less<>>;

struct ExtractorOptions {
    EntityType capitalized_default = EntityType::Person;
    /// Drops sentence-initial function words ("The", "In", ...) from the front
    /// of a capitalized run.
    bool trim_leading_function_words = true;
    unsigned threads = 1;
};

/// Per-document mentions from the heuristic rules; pure and deterministic.
std::vector<Mention> extract_document(std::size_t doc, std::string_view text,
                                      const Gazetteer& gazetteer, const ExtractorOptions& options);

EntityInventory extract_builtin(const Corpus& corpus, const Gazetteer& gazetteer = {},
                                const ExtractorOptions& options = {});

Gazetteer parse_gazetteer(std::string_view json_text, const std::string& origin = "<memory>");
Gazetteer load_gazetteer(const std::filesystem::path& path);
std::string serialize_gazetteer(const Gazetteer& gazetteer);

} // namespace typeswap
