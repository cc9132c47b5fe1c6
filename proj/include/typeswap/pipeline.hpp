// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors
//
// End-to-end poisoning run: inventory, global pool, query pool, plan, rewrite.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "typeswap/corpus.hpp"
#include "typeswap/entities.hpp"
#include "typeswap/evaluate.hpp"
#include "typeswap/global_pool.hpp"
#include "typeswap/query_pool.hpp"
#include "typeswap/swap.hpp"

namespace typeswap {

struct PoisonOptions {
    double budget_percent = 5.0;
    Strategy strategy = Strategy::Full;
    Rotation rotation = Rotation::Backward;
    unsigned threads = 1;
};

struct PoisonInputs {
    const Corpus* corpus = nullptr;
    const std::vector<Query>* queries = nullptr;  // only read by the query arms
    /// Precomputed inventory (e.g. imported annotations). When absent the
    /// built-in extractor runs with `gazetteer`.
    std::optional<EntityInventory> inventory;
    Gazetteer gazetteer;
    /// Reasoning-chain entities. When absent the question scan stands in.
    std::optional<std::vector<QueryEntity>> query_entities;
};

struct PoisonRun {
    EntityInventory inventory;
    GlobalPool global;
    QueryPool query;
    PoisonPlan plan;
    RewriteResult rewrite;
    std::vector<PhaseTiming> timings;  // wall clock, seconds
};

PoisonRun run_poison(PoisonInputs inputs, const PoisonOptions& options);

} // namespace typeswap
