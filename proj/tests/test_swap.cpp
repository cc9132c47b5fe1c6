// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#include <catch_amalgamated.hpp>

#include <map>

#include "typeswap/error.hpp"
#include "typeswap/rng.hpp"
#include "typeswap/swap.hpp"
#include "typeswap/synth.hpp"

using namespace typeswap;

namespace {

TypedEntity person(std::string s) { return {std::move(s), EntityType::Person}; }

std::map<TypedEntity, TypedEntity> as_map(const TypeCycle& c) {
    return {c.mapping.begin(), c.mapping.end()};
}

PoisonPlan plan_from(std::vector<TypeCycle> cycles) {
    PoisonPlan plan;
    plan.cycles = std::move(cycles);
    plan.reindex();
    return plan;
}

// Mentions located by a plain left-to-right search.
EntityInventory locate(const Corpus& c, const std::vector<TypedEntity>& entities) {
    std::vector<Mention> mentions;
    for (std::size_t d = 0; d < c.size(); ++d) {
        for (const auto& e : entities) {
            for (auto pos = c[d].text.find(e.surface); pos != std::string::npos;
                 pos = c[d].text.find(e.surface, pos + 1)) {
                mentions.push_back(Mention{d, pos, pos + e.surface.size(), e});
            }
        }
    }
    return EntityInventory::build(c, std::move(mentions));
}

} // namespace

TEST_CASE("three-member rotation", "[swap]") {
    std::vector<CycleEntry> s{{person("e1"), 9}, {person("e2"), 5}, {person("e3"), 1}};
    auto cycle = build_permutation(s);
    REQUIRE(cycle.has_value());
    auto pi = as_map(*cycle);
    CHECK(pi.at(person("e2")) == person("e1"));
    CHECK(pi.at(person("e3")) == person("e2"));
    CHECK(pi.at(person("e1")) == person("e3"));

    auto forward = as_map(*build_permutation(s, Rotation::Forward));
    for (const auto& [from, to] : pi) {
        CHECK(forward.at(to) == from);  // forward is the inverse rotation
    }
}

TEST_CASE("members are ordered by frequency before rotating", "[swap]") {
    // Input order is irrelevant: ranking is descending f, then surface.
    std::vector<CycleEntry> s{{person("c"), 1}, {person("b"), 7}, {person("a"), 7}};
    auto cycle = build_permutation(s);
    REQUIRE(cycle);
    CHECK(cycle->sequence[0].entity == person("a"));
    CHECK(cycle->sequence[1].entity == person("b"));
    CHECK(cycle->sequence[2].entity == person("c"));
    CHECK(as_map(*cycle).at(person("a")) == person("c"));
}

TEST_CASE("degenerate and invalid pools", "[swap]") {
    CHECK_FALSE(build_permutation(std::vector<CycleEntry>{{person("X"), 3}}).has_value());
    CHECK_FALSE(build_permutation(std::vector<CycleEntry>{}).has_value());
    CHECK_THROWS_AS(build_permutation(std::vector<CycleEntry>{{person("X"), 3}, {{"Y", EntityType::Gpe}, 1}}),
                    Error);
    CHECK_THROWS_AS(build_permutation(std::vector<CycleEntry>{{person("X"), 3}, {person("X"), 3}}), Error);
}

TEST_CASE("permutation laws against brute-force composition", "[swap]") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = 2 + rng.below(60);
        std::vector<CycleEntry> s;
        for (std::size_t i = 0; i < m; ++i) {
            s.push_back({person("p" + std::to_string(i)), rng.below(5)});
        }
        auto cycle = build_permutation(s);
        REQUIRE(cycle);
        auto pi = as_map(*cycle);
        REQUIRE(pi.size() == m);
        std::set<TypedEntity> images;
        for (const auto& [from, to] : pi) {
            CHECK(from != to);
            CHECK(from.type == to.type);
            images.insert(to);
        }
        CHECK(images.size() == m);
        // pi^k(x) != x for 0 < k < m and pi^m(x) == x: a single m-cycle.
        for (const auto& [start, unused] : pi) {
            auto x = start;
            for (std::size_t k = 1; k < m; ++k) {
                x = pi.at(x);
                REQUIRE(x != start);
            }
            CHECK(pi.at(x) == start);
        }
    }
}

TEST_CASE("single mention rewrite", "[swap]") {
    auto c = Corpus::from_documents({{"d", "A met B."}});
    auto inv = locate(c, {person("A"), person("B'")});
    TypeCycle cycle;
    cycle.type = EntityType::Person;
    cycle.mapping = {{person("A"), person("B'")}, {person("B'"), person("A")}};
    auto plan = plan_from({cycle});
    auto r = rewrite_corpus(c, inv, plan);
    CHECK(r.poisoned[0].text == "B' met B.");
    REQUIRE(r.log.documents.size() == 1);
    REQUIRE(r.log.documents[0].substitutions.size() == 1);
    CHECK(r.log.documents[0].substitutions[0] == Substitution{0, 1, "A", "B'", EntityType::Person});
    CHECK(r.log.totals.mentions_modified == 1);
}

TEST_CASE("empty plan is the identity", "[swap]") {
    auto fx = synth_corpus({.nodes = 60, .attachment = 2, .docs = 30, .seed = 4, .chains = 0});
    auto r = rewrite_corpus(fx.corpus, fx.inventory, PoisonPlan{});
    CHECK(r.poisoned == fx.corpus);
    CHECK(r.log.documents.empty());
    CHECK(r.log.totals.mentions_modified == 0);
    CHECK(r.log.totals.documents_modified == 0);
    CHECK(r.log.totals.net_token_delta == 0);
    CHECK(r.log.totals.injected_tokens == 0);
    CHECK(r.poisoned_inventory == fx.inventory);
}

TEST_CASE("overlapping mentions: the longer span wins", "[swap]") {
    auto c = Corpus::from_documents({{"d", "New York City is big. York is small."}});
    const TypedEntity nyc{"New York City", EntityType::Gpe};
    const TypedEntity york{"York", EntityType::Gpe};
    const TypedEntity la{"Los Angeles", EntityType::Gpe};
    const TypedEntity leeds{"Leeds", EntityType::Gpe};
    auto inv = locate(c, {nyc, york});
    TypeCycle cycle;
    cycle.type = EntityType::Gpe;
    cycle.mapping = {{nyc, la}, {la, nyc}, {york, leeds}, {leeds, york}};
    auto r = rewrite_corpus(c, inv, plan_from({cycle}));
    CHECK(r.poisoned[0].text == "Los Angeles is big. Leeds is small.");
    CHECK(r.log.totals.overlaps_resolved == 1);
    CHECK(invert_rewrite(r.poisoned, r.log) == c);
}

TEST_CASE("rewrite inverts on synthetic corpora and only logged bytes change", "[swap]") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto fx = synth_corpus({.nodes = 100, .attachment = 2, .docs = 50, .seed = seed, .chains = 0});
        auto global = build_global_pool(fx.inventory, 10);
        auto plan = make_plan(fx.inventory, global, QueryPool{}, Strategy::Global);
        auto r = rewrite_corpus(fx.corpus, fx.inventory, plan);
        CHECK(invert_rewrite(r.poisoned, r.log) == fx.corpus);
        CHECK(r.poisoned.size() == fx.corpus.size());
        CHECK(r.log.totals.injected_tokens == 0);

        // Oracle: recount substitutions from the log.
        std::size_t logged = 0;
        for (const auto& doc : r.log.documents) {
            logged += doc.substitutions.size();
            for (const auto& s : doc.substitutions) {
                CHECK(fx.corpus[*fx.corpus.find(doc.doc_id)].text.substr(s.start, s.end - s.start) == s.from);
                CHECK(*plan.target_of({s.from, s.type}) == TypedEntity{s.to, s.type});
            }
        }
        CHECK(r.log.totals.mentions_modified == logged);

        // Poisoned inventory spans slice correctly (build() checks this) and
        // frequencies of targets are permuted: f~(pi(e)) == f(e) when no overlaps.
        for (const auto& e : plan.targets()) {
            CHECK(r.poisoned_inventory.frequency(*plan.target_of(e)) == fx.inventory.frequency(e));
        }
    }
}

TEST_CASE("plan and log files round-trip", "[swap]") {
    auto fx = synth_corpus({.nodes = 80, .attachment = 2, .docs = 40, .seed = 2, .chains = 0});
    auto plan = make_plan(fx.inventory, build_global_pool(fx.inventory, 20),
                          verify_against_corpus(fx.query_entities, fx.inventory), Strategy::Full);
    auto parsed = parse_plan(serialize_plan(plan));
    CHECK(parsed.cycles == plan.cycles);
    CHECK(parsed.strategy == Strategy::Full);
    CHECK(parsed.budget_percent == 20);
    CHECK(serialize_plan(parsed) == serialize_plan(plan));
    for (const auto& e : plan.targets()) {
        CHECK(*parsed.source_of(*parsed.target_of(e)) == e);
    }

    auto r = rewrite_corpus(fx.corpus, fx.inventory, plan);
    auto log = parse_rewrite_log(serialize_rewrite_log(r.log));
    CHECK(serialize_rewrite_log(log) == serialize_rewrite_log(r.log));
    CHECK(invert_rewrite(r.poisoned, log) == fx.corpus);
}

TEST_CASE("strategy arms draw from the right pools", "[swap]") {
    auto fx = synth_corpus({.nodes = 200, .attachment = 2, .docs = 100, .seed = 3, .chains = 0});
    auto global = build_global_pool(fx.inventory, 5);
    auto query = verify_against_corpus(fx.query_entities, fx.inventory);
    auto g = make_plan(fx.inventory, global, query, Strategy::Global);
    auto q = make_plan(fx.inventory, global, query, Strategy::Query);
    auto f = make_plan(fx.inventory, global, query, Strategy::Full);
    for (const auto& e : g.targets()) {
        CHECK(global.contains(e));
    }
    for (const auto& e : q.targets()) {
        CHECK(query.contains(e));
    }
    std::set<TypedEntity> union_set;
    for (const auto& [t, members] : unify_pools(global, query)) {
        if (members.size() >= 2) {
            union_set.insert(members.begin(), members.end());
        }
    }
    auto full_targets = f.targets();
    CHECK(std::set<TypedEntity>(full_targets.begin(), full_targets.end()) == union_set);
}

TEST_CASE("injected token accounting", "[swap]") {
    auto clean = Corpus::from_documents({{"a", "Alpha met Beta."}});
    auto poisoned = Corpus::from_documents({{"a", "Gamma met Beta."}});
    CHECK(injected_token_count(clean, poisoned) == 1);
    CHECK(injected_token_count(clean, clean) == 0);
}
