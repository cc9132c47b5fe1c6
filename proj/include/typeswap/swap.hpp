// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors
//
// Type-preserving entity swapping. Targets of one type are ordered by
// descending document frequency (ties: ascending surface) into a sequence
// S = [e1 .. em] and rotated by one position, so every target is rewritten to
// another entity of the same type and the mapping is a single m-cycle.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "typeswap/corpus.hpp"
#include "typeswap/entities.hpp"
#include "typeswap/global_pool.hpp"
#include "typeswap/query_pool.hpp"

namespace typeswap {

enum class Strategy { Global, Query, Full };
/// Backward: e_i -> e_{i-1}, e_1 -> e_m. Forward is the inverse rotation.
enum class Rotation { Backward, Forward };

std::string_view to_string(Strategy s) noexcept;
std::optional<Strategy> parse_strategy(std::string_view label) noexcept;
std::string_view to_string(Rotation r) noexcept;
std::optional<Rotation> parse_rotation(std::string_view label) noexcept;

using UnifiedPool = std::map<EntityType, std::set<TypedEntity>>;

UnifiedPool unify_pools(const GlobalPool& global, const QueryPool& query);

struct CycleEntry {
    TypedEntity entity;
    std::size_t frequency = 0;

    bool operator==(const CycleEntry&) const = default;
};

struct TypeCycle {
    EntityType type = EntityType::Person;
    std::vector<CycleEntry> sequence;                         // S, rank order
    std::vector<std::pair<TypedEntity, TypedEntity>> mapping;  // (e, pi(e)) in S order

    bool operator==(const TypeCycle&) const = default;
};

/// Orders `members` and rotates them. Returns nullopt for fewer than two
/// members (the rotation would be the identity). All members must share a type.
std::optional<TypeCycle> build_permutation(std::vector<CycleEntry> members,
                                           Rotation rotation = Rotation::Backward);
std::optional<TypeCycle> build_permutation(const std::set<TypedEntity>& members,
                                           const EntityInventory& inventory,
                                           Rotation rotation = Rotation::Backward);

class PoisonPlan {
public:
    double budget_percent = 0.0;
    Strategy strategy = Strategy::Full;
    Rotation rotation = Rotation::Backward;
    std::vector<TypeCycle> cycles;
    std::vector<std::string> warnings;
    // Audit trail of the pools the targets came from.
    std::vector<TypedEntity> global_targets;
    std::vector<TypedEntity> query_targets;

    /// pi(e), or nullptr when e is not a target.
    const TypedEntity* target_of(const TypedEntity& entity) const;
    /// pi^-1(e), or nullptr when e is not a target.
    const TypedEntity* source_of(const TypedEntity& entity) const;
    std::size_t target_count() const;
    std::vector<TypedEntity> targets() const;

    /// Rebuilds lookup tables after `cycles` changes.
    void reindex();

private:
    std::unordered_map<TypedEntity, TypedEntity, TypedEntityHash> forward_;
    std::unordered_map<TypedEntity, TypedEntity, TypedEntityHash> backward_;
};

PoisonPlan make_plan(const EntityInventory& inventory, const GlobalPool& global,
                     const QueryPool& query, Strategy strategy,
                     Rotation rotation = Rotation::Backward);

// Plan file: JSON object with budget_percent, strategy, rotation, a "types"
// array of {type, sequence: [{surface, type, frequency}], mapping: [[from, to]]},
// pool provenance and warnings.
std::string serialize_plan(const PoisonPlan& plan);
PoisonPlan parse_plan(std::string_view json_text, const std::string& origin = "<memory>");
PoisonPlan load_plan(const std::filesystem::path& path);

struct Substitution {
    std::size_t start = 0;  // byte offsets in the clean document
    std::size_t end = 0;
    std::string from;
    std::string to;
    EntityType type = EntityType::Person;

    bool operator==(const Substitution&) const = default;
};

struct DocumentRewrite {
    std::string doc_id;
    std::vector<Substitution> substitutions;  // ascending start
};

struct RewriteTotals {
    std::size_t documents = 0;
    std::size_t documents_modified = 0;
    std::size_t mentions_modified = 0;
    std::size_t overlaps_resolved = 0;
    long long net_token_delta = 0;
    std::size_t injected_tokens = 0;  // poisoned token forms absent from the clean corpus
};

/// Only documents with at least one substitution are listed.
struct RewriteLog {
    std::vector<DocumentRewrite> documents;
    RewriteTotals totals;
};

struct RewriteResult {
    Corpus poisoned;
    RewriteLog log;
    /// Mentions carried over to the poisoned text: swapped mentions under
    /// their new identity, untouched ones shifted, overlapped ones dropped.
    EntityInventory poisoned_inventory;
};

/// Replaces every indexed mention of a planned target with pi(target).
/// Within a document, longer spans win, then earlier starts.
RewriteResult rewrite_corpus(const Corpus& corpus, const EntityInventory& inventory,
                             const PoisonPlan& plan);

/// Applies the logged substitutions backwards, restoring the clean corpus.
Corpus invert_rewrite(const Corpus& poisoned, const RewriteLog& log);

std::set<std::string, std::less<>> token_vocabulary(const Corpus& corpus);
/// Count of distinct token forms in `poisoned` that never occur in `clean`.
std::size_t injected_token_count(const Corpus& clean, const Corpus& poisoned);

std::string serialize_rewrite_log(const RewriteLog& log);
RewriteLog parse_rewrite_log(std::string_view json_text, const std::string& origin = "<memory>");

} // namespace typeswap
