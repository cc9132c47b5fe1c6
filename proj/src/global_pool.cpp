// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#include "typeswap/global_pool.hpp"

#include <algorithm>
#include <cmath>

#include "typeswap/error.hpp"
#include "typeswap/rng.hpp"

namespace typeswap {

std::size_t GlobalPool::size() const {
    std::size_t total = 0;
    for (const auto& [type, members] : buckets) {
        total += members.size();
    }
    return total;
}

bool GlobalPool::contains(const TypedEntity& entity) const {
    auto it = buckets.find(entity.type);
    return it != buckets.end() &&
           std::find(it->second.begin(), it->second.end(), entity) != it->second.end();
}

std::vector<TypedEntity> rank_by_frequency(const EntityInventory& inventory, EntityType type) {
    std::vector<std::pair<std::size_t, TypedEntity>> ranked;
    for (const auto& [entity, record] : inventory.records()) {
        if (entity.type == type) {
            ranked.emplace_back(record.frequency, entity);
        }
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) {
            return a.first > b.first;
        }
        return a.second.surface < b.second.surface;
    });
    std::vector<TypedEntity> out;
    out.reserve(ranked.size());
    for (auto& [f, e] : ranked) {
        out.push_back(std::move(e));
    }
    return out;
}

std::size_t bucket_quota(std::size_t type_count, double n_percent) {
    if (type_count < 2 || n_percent <= 0.0) {
        return 0;
    }
    // Guard against 100 * k / 100 landing a hair above an integer.
    const double raw = static_cast<double>(type_count) * n_percent / 100.0;
    auto quota = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    return std::min(quota, type_count);
}

GlobalPool build_global_pool(const EntityInventory& inventory, double n_percent) {
    if (!(n_percent >= 0.0 && n_percent <= 100.0)) {
        fail(ErrorKind::Validation,
             "budget must lie in [0, 100], got " + std::to_string(n_percent));
    }
    GlobalPool pool;
    pool.budget_percent = n_percent;
    for (auto type : kAllEntityTypes) {
        auto ranked = rank_by_frequency(inventory, type);
        if (ranked.empty()) {
            continue;
        }
        if (ranked.size() < 2) {
            pool.warnings.push_back("type " + std::string(to_string(type)) +
                                    " has a single entity; skipped");
            pool.buckets[type];
            continue;
        }
        ranked.resize(bucket_quota(ranked.size(), n_percent));
        pool.buckets[type] = std::move(ranked);
    }
    return pool;
}

GlobalPool build_random_pool(const EntityInventory& inventory, const GlobalPool& reference,
                             std::uint64_t seed) {
    GlobalPool pool;
    pool.budget_percent = reference.budget_percent;
    Rng rng(seed);
    for (const auto& [type, members] : reference.buckets) {
        auto candidates = inventory.entities_of_type(type);
        shuffle(candidates, rng);
        candidates.resize(std::min(candidates.size(), members.size()));
        pool.buckets[type] = std::move(candidates);
    }
    return pool;
}

} // namespace typeswap
