// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors
//
// Query-centric targets: reasoning-chain entities per query, kept only when
// the corpus inventory actually contains them, then pooled per type.

#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "typeswap/corpus.hpp"
#include "typeswap/entities.hpp"

namespace typeswap {

enum class ReasoningRole { Bridge, Target, Alias, Other };

std::string_view to_string(ReasoningRole role) noexcept;
std::optional<ReasoningRole> parse_reasoning_role(std::string_view label) noexcept;

struct QueryEntity {
    std::string query_id;
    int hop = 1;
    TypedEntity entity;
    ReasoningRole role = ReasoningRole::Target;

    bool operator==(const QueryEntity&) const = default;
};

struct QueryPool {
    std::map<EntityType, std::set<TypedEntity>> buckets;
    std::map<TypedEntity, std::vector<std::string>> provenance;  // entity -> query ids
    std::vector<QueryEntity> rejected;                           // f(e, type) == 0

    std::size_t size() const;
    bool contains(const TypedEntity& entity) const;
};

// Query-entities file: one record per query,
// {"query_id": ..., "entities": [{"hop", "entity", "type", "role"}, ...]}.
// A missing role defaults from the type: BRIDGE -> bridge, ALIAS -> alias,
// anything else -> target.
std::vector<QueryEntity> parse_query_entities(std::string_view jsonl,
                                              const std::string& origin = "<memory>");
std::vector<QueryEntity> import_query_entities(const std::filesystem::path& path);
std::string serialize_query_entities(const std::vector<QueryEntity>& entities);

QueryPool verify_against_corpus(const std::vector<QueryEntity>& entities,
                                const EntityInventory& inventory);

/// Offline stand-in for chain extraction: every indexed surface found in the
/// question on token boundaries (case-sensitive) becomes a hop-1 target.
std::vector<QueryEntity> fallback_query_entities(const std::vector<Query>& queries,
                                                 const EntityInventory& inventory);

} // namespace typeswap
