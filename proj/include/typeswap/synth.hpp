// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors
//
// Seeded synthetic corpora with a heavy-tailed entity topology
// (preferential attachment), exact annotations, and 2-hop gold chains.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "typeswap/corpus.hpp"
#include "typeswap/entities.hpp"
#include "typeswap/graph.hpp"
#include "typeswap/query_pool.hpp"

namespace typeswap {

struct GoldChain {
    std::string query_id;
    std::vector<TypedEntity> entities;  // head, bridge, answer

    bool operator==(const GoldChain&) const = default;
};

struct SynthOptions {
    std::size_t nodes = 500;
    std::size_t attachment = 2;
    std::size_t docs = 500;
    std::uint64_t seed = 1;
    std::size_t chains = 0;  // 0: nodes / 5
};

struct SyntheticFixture {
    std::vector<TypedEntity> entities;     // node i of the generated topology
    std::vector<WeightedEdge> topology;    // preferential-attachment edges
    Corpus corpus;
    EntityInventory inventory;             // exact spans of every emitted mention
    Gazetteer gazetteer;
    std::vector<Query> queries;
    std::vector<GoldChain> chains;
    std::vector<QueryEntity> query_entities;  // head (hop 1) and bridge (hop 2) per query
};

/// Undirected preferential attachment: a clique on attachment + 1 seed nodes,
/// then each new node links to `attachment` distinct nodes drawn with
/// probability proportional to degree.
std::vector<WeightedEdge> preferential_attachment(std::size_t nodes, std::size_t attachment,
                                                  std::uint64_t seed);

SyntheticFixture synth_corpus(const SynthOptions& options);

// Chains file: one record per chain, {"query_id": ..., "chain": [{"surface", "type"}, ...]}.
std::string serialize_chains(const std::vector<GoldChain>& chains);
std::vector<GoldChain> parse_chains(std::string_view jsonl, const std::string& origin = "<memory>");
std::vector<GoldChain> load_chains(const std::filesystem::path& path);

} // namespace typeswap
