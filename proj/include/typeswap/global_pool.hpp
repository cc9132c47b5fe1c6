// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "typeswap/entities.hpp"

namespace typeswap {

/// Per-type hub targets: the top n% of each type by document frequency.
struct GlobalPool {
    double budget_percent = 0.0;
    std::map<EntityType, std::vector<TypedEntity>> buckets;  // rank order
    std::vector<std::string> warnings;

    std::size_t size() const;
    bool contains(const TypedEntity& entity) const;
};

/// Descending frequency, ties by ascending surface.
std::vector<TypedEntity> rank_by_frequency(const EntityInventory& inventory, EntityType type);

/// Number of targets for a type with `type_count` entities: ceil(m * n / 100),
/// or zero when fewer than two entities exist.
std::size_t bucket_quota(std::size_t type_count, double n_percent);

GlobalPool build_global_pool(const EntityInventory& inventory, double n_percent);

/// Control arm: for every type, draws as many entities uniformly at random
/// (seeded) as `reference` holds for that type.
GlobalPool build_random_pool(const EntityInventory& inventory, const GlobalPool& reference,
                             std::uint64_t seed);

} // namespace typeswap
