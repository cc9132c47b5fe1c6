// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#include "typeswap/query_pool.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "typeswap/error.hpp"
#include "typeswap/io.hpp"

namespace typeswap {

namespace {

constexpr std::array<std::string_view, 4> kRoleLabels = {"bridge", "target", "alias", "other"};

ReasoningRole default_role(EntityType type) {
    switch (type) {
    case EntityType::Bridge:
        return ReasoningRole::Bridge;
    case EntityType::Alias:
        return ReasoningRole::Alias;
    default:
        return ReasoningRole::Target;
    }
}

} // namespace

std::string_view to_string(ReasoningRole role) noexcept {
    return kRoleLabels[static_cast<std::size_t>(role)];
}

std::optional<ReasoningRole> parse_reasoning_role(std::string_view label) noexcept {
    for (std::size_t i = 0; i < kRoleLabels.size(); ++i) {
        if (kRoleLabels[i] == label) {
            return static_cast<ReasoningRole>(i);
        }
    }
    return std::nullopt;
}

std::size_t QueryPool::size() const {
    std::size_t total = 0;
    for (const auto& [type, members] : buckets) {
        total += members.size();
    }
    return total;
}

bool QueryPool::contains(const TypedEntity& entity) const {
    auto it = buckets.find(entity.type);
    return it != buckets.end() && it->second.contains(entity);
}

std::vector<QueryEntity> parse_query_entities(std::string_view jsonl, const std::string& origin) {
    std::vector<QueryEntity> out;
    io::for_each_jsonl_record(jsonl, origin, [&](std::size_t line, const nlohmann::json& record) {
        const auto where = origin + ":" + std::to_string(line);
        auto query_id = io::require_string(record, "query_id", origin, line);
        auto list = record.find("entities");
        if (list == record.end() || !list->is_array()) {
            fail(ErrorKind::Parse, where + ": missing array field 'entities'");
        }
        for (const auto& item : *list) {
            if (!item.is_object()) {
                fail(ErrorKind::Parse, where + ": entity entry is not an object");
            }
            QueryEntity qe;
            qe.query_id = query_id;
            auto hop = item.find("hop");
            if (hop == item.end() || !hop->is_number_integer()) {
                fail(ErrorKind::Parse, where + ": missing integer field 'hop'");
            }
            qe.hop = hop->get<int>();
            if (qe.hop < 1) {
                fail(ErrorKind::Validation, where + ": hop must be >= 1");
            }
            qe.entity.surface = io::require_string(item, "entity", origin, line);
            if (qe.entity.surface.empty()) {
                fail(ErrorKind::Validation, where + ": empty entity surface");
            }
            auto label = io::require_string(item, "type", origin, line);
            auto type = parse_entity_type(label);
            if (!type) {
                fail(ErrorKind::Validation, where + ": entity type '" + label +
                                                "' is not in the closed type set");
            }
            qe.entity.type = *type;
            if (auto role = item.find("role"); role != item.end()) {
                if (!role->is_string()) {
                    fail(ErrorKind::Parse, where + ": 'role' must be a string");
                }
                auto parsed = parse_reasoning_role(role->get<std::string>());
                if (!parsed) {
                    fail(ErrorKind::Validation,
                         where + ": unknown reasoning role '" + role->get<std::string>() + "'");
                }
                qe.role = *parsed;
            } else {
                qe.role = default_role(qe.entity.type);
            }
            out.push_back(std::move(qe));
        }
    });
    return out;
}

std::vector<QueryEntity> import_query_entities(const std::filesystem::path& path) {
    return parse_query_entities(io::read_file(path), path.string());
}

std::string serialize_query_entities(const std::vector<QueryEntity>& entities) {
    std::string out;
    std::size_t i = 0;
    while (i < entities.size()) {
        nlohmann::ordered_json record;
        record["query_id"] = entities[i].query_id;
        auto list = nlohmann::ordered_json::array();
        const auto& id = entities[i].query_id;
        for (; i < entities.size() && entities[i].query_id == id; ++i) {
            nlohmann::ordered_json item;
            item["hop"] = entities[i].hop;
            item["entity"] = entities[i].entity.surface;
            item["type"] = to_string(entities[i].entity.type);
            item["role"] = to_string(entities[i].role);
            list.push_back(std::move(item));
        }
        record["entities"] = std::move(list);
        out += record.dump();
        out += '\n';
    }
    return out;
}

QueryPool verify_against_corpus(const std::vector<QueryEntity>& entities,
                                const EntityInventory& inventory) {
    QueryPool pool;
    for (const auto& qe : entities) {
        if (inventory.frequency(qe.entity) == 0) {
            pool.rejected.push_back(qe);
            continue;
        }
        pool.buckets[qe.entity.type].insert(qe.entity);
        auto& ids = pool.provenance[qe.entity];
        if (std::find(ids.begin(), ids.end(), qe.query_id) == ids.end()) {
            ids.push_back(qe.query_id);
        }
    }
    return pool;
}

std::vector<QueryEntity> fallback_query_entities(const std::vector<Query>& queries,
                                                 const EntityInventory& inventory) {
    // Index surfaces by their first token so each question is scanned once.
    std::unordered_map<std::string, std::vector<const TypedEntity*>> by_first_token;
    for (const auto& [entity, record] : inventory.records()) {
        auto tokens = tokenize(entity.surface);
        if (!tokens.empty()) {
            by_first_token[std::string(tokens.front().surface)].push_back(&entity);
        }
    }

    std::vector<QueryEntity> out;
    for (const auto& q : queries) {
        const std::string_view text = q.question;
        auto tokens = tokenize(text);
        std::unordered_set<std::size_t> token_ends;
        for (const auto& t : tokens) {
            token_ends.insert(t.end);
        }
        std::vector<TypedEntity> found;
        for (const auto& t : tokens) {
            auto it = by_first_token.find(std::string(t.surface));
            if (it == by_first_token.end()) {
                continue;
            }
            for (const auto* entity : it->second) {
                const auto& s = entity->surface;
                if (text.compare(t.start, s.size(), s) == 0 && token_ends.contains(t.start + s.size())) {
                    found.push_back(*entity);
                }
            }
        }
        std::sort(found.begin(), found.end());
        found.erase(std::unique(found.begin(), found.end()), found.end());
        for (auto& e : found) {
            out.push_back(QueryEntity{q.id, 1, std::move(e), ReasoningRole::Target});
        }
    }
    return out;
}

} // namespace typeswap
