// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#include <catch_amalgamated.hpp>

#include "typeswap/synth.hpp"

using namespace typeswap;

TEST_CASE("preferential attachment shape", "[synth]") {
    auto edges = preferential_attachment(500, 2, 1);
    // Seed clique has 3 edges, then 2 per new node.
    CHECK(edges.size() == 3 + 2 * 497);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : edges) {
        CHECK(e.u != e.v);
        CHECK(seen.insert({std::min(e.u, e.v), std::max(e.u, e.v)}).second);
    }
    CHECK(preferential_attachment(500, 2, 1).size() == edges.size());
}

TEST_CASE("fixture is deterministic and self-consistent", "[synth]") {
    SynthOptions o;
    o.nodes = 200;
    o.docs = 100;
    o.seed = 7;
    auto a = synth_corpus(o);
    auto b = synth_corpus(o);
    CHECK(serialize_corpus(a.corpus) == serialize_corpus(b.corpus));
    CHECK(serialize_queries(a.queries) == serialize_queries(b.queries));
    CHECK(a.chains == b.chains);
    CHECK(a.corpus.size() == 100);
    CHECK(a.chains.size() == 40);
    CHECK(a.query_entities.size() == 2 * a.chains.size());

    // Every mention slices to its surface (build() would throw otherwise) and
    // every generated entity is indexed.
    for (const auto& e : a.entities) {
        CHECK(a.inventory.frequency(e) > 0);
        CHECK(a.gazetteer.at(e.surface) == e.type);
    }
    for (std::size_t i = 0; i < a.chains.size(); ++i) {
        CHECK(a.queries[i].gold_answer == a.chains[i].entities.back().surface);
        CHECK(a.queries[i].question.find(a.chains[i].entities.front().surface) != std::string::npos);
    }
    o.seed = 8;
    CHECK(serialize_corpus(synth_corpus(o).corpus) != serialize_corpus(a.corpus));
}

TEST_CASE("500-document corpus round-trips byte for byte", "[synth]") {
    auto fx = synth_corpus({});
    REQUIRE(fx.corpus.size() == 500);
    const auto text = serialize_corpus(fx.corpus);
    CHECK(serialize_corpus(parse_corpus(text)) == text);
}

TEST_CASE("chain files round-trip", "[synth]") {
    auto fx = synth_corpus({.nodes = 60, .attachment = 2, .docs = 20, .seed = 3, .chains = 0});
    CHECK(parse_chains(serialize_chains(fx.chains)) == fx.chains);
}
