// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#include <catch_amalgamated.hpp>

#include "typeswap/entities.hpp"
#include "typeswap/error.hpp"
#include "typeswap/synth.hpp"

using namespace typeswap;

namespace {

Corpus small_corpus() {
    return Corpus::from_documents({
        {"d1", "Marie Curie won in 1903. Paris celebrated."},
        {"d2", "Marie Curie moved to Paris with Pierre Curie."},
        {"d3", "Rates rose 12% in 1911 across 3 cities."},
    });
}

Mention at(const Corpus& c, std::size_t doc, std::string_view surface, EntityType type, std::size_t nth = 0) {
    const auto& text = c[doc].text;
    std::size_t pos = text.find(surface);
    while (nth-- > 0) {
        pos = text.find(surface, pos + 1);
    }
    REQUIRE(pos != std::string::npos);
    return Mention{doc, pos, pos + surface.size(), TypedEntity{std::string(surface), type}};
}

// Token-aligned occurrence test, independent of the mention index.
bool contains_tokens(std::string_view text, std::string_view surface) {
    auto hay = tokenize(text);
    auto needle = tokenize(surface);
    for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
        bool match = true;
        for (std::size_t k = 0; k < needle.size() && match; ++k) {
            match = hay[i + k].surface == needle[k].surface;
        }
        if (match) {
            return true;
        }
    }
    return false;
}

} // namespace

TEST_CASE("entity type labels round-trip", "[entities]") {
    for (auto t : kAllEntityTypes) {
        CHECK(parse_entity_type(to_string(t)) == t);
    }
    CHECK_FALSE(parse_entity_type("person").has_value());
    CHECK_FALSE(parse_entity_type("VEHICLE").has_value());
}

TEST_CASE("document frequency counts documents, not mentions", "[entities]") {
    auto c = small_corpus();
    const auto P = EntityType::Person;
    auto inv = EntityInventory::build(
        c, {at(c, 0, "Marie Curie", P), at(c, 1, "Marie Curie", P), at(c, 0, "Paris", EntityType::Gpe),
            at(c, 1, "Paris", EntityType::Gpe), at(c, 1, "Pierre Curie", P), at(c, 1, "Marie Curie", P)});
    CHECK(inv.frequency({"Marie Curie", P}) == 2);
    CHECK(inv.frequency({"Paris", EntityType::Gpe}) == 2);
    CHECK(inv.frequency({"Paris", EntityType::Loc}) == 0);  // identity includes the type
    CHECK(inv.frequency({"Pierre Curie", P}) == 1);
    CHECK(inv.find({"Marie Curie", P})->mentions.size() == 2);  // exact duplicate dropped
    CHECK(inv.document_entities(2).empty());
    CHECK(inv.entities_of_type(P) == std::vector<TypedEntity>{{"Marie Curie", P}, {"Pierre Curie", P}});
}

TEST_CASE("stale and dangling annotations fail loudly", "[entities]") {
    auto c = small_corpus();
    SECTION("span does not slice to surface") {
        Mention bad{0, 0, 5, {"Marie Curie", EntityType::Person}};
        CHECK_THROWS_MATCHES(EntityInventory::build(c, {bad}), Error,
                             Catch::Matchers::Predicate<Error>(
                                 [](const Error& e) { return e.kind() == ErrorKind::StaleAnnotation; }));
    }
    SECTION("span beyond the text") {
        Mention bad{0, 40, 400, {"x", EntityType::Person}};
        CHECK_THROWS_AS(EntityInventory::build(c, {bad}), Error);
    }
    SECTION("unknown document id in an annotation file") {
        const auto jsonl = R"({"doc_id":"d9","mentions":[]})";
        try {
            parse_annotations(c, jsonl);
            FAIL("no throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Reference);
        }
    }
    SECTION("type outside the closed set") {
        const auto jsonl = R"({"doc_id":"d1","mentions":[{"surface":"Paris","type":"CITY","start":25,"end":30}]})";
        CHECK_THROWS_AS(parse_annotations(c, jsonl), Error);
    }
}

TEST_CASE("annotation files round-trip", "[entities]") {
    auto c = small_corpus();
    auto inv = extract_builtin(c);
    CHECK(parse_annotations(c, serialize_annotations(c, inv)) == inv);
}

TEST_CASE("built-in extractor rules", "[entities]") {
    auto c = small_corpus();
    Gazetteer gaz{{"Paris", EntityType::Gpe}};
    auto inv = extract_builtin(c, gaz);
    CHECK(inv.frequency({"Marie Curie", EntityType::Person}) == 2);
    CHECK(inv.frequency({"Paris", EntityType::Gpe}) == 2);
    CHECK(inv.frequency({"Pierre Curie", EntityType::Person}) == 1);
    CHECK(inv.frequency({"1903", EntityType::Date}) == 1);
    CHECK(inv.frequency({"1911", EntityType::Date}) == 1);
    CHECK(inv.frequency({"12%", EntityType::Percent}) == 1);
    CHECK(inv.frequency({"3", EntityType::Cardinal}) == 1);
    // "Rates" opens a sentence but is not a function word, so it stays.
    CHECK(inv.frequency({"Rates", EntityType::Person}) == 1);

    auto trimmed = extract_document(0, "The Nobel Committee met.", {}, {});
    REQUIRE(trimmed.size() == 1);
    CHECK(trimmed[0].entity.surface == "Nobel Committee");
    ExtractorOptions keep;
    keep.trim_leading_function_words = false;
    auto untrimmed = extract_document(0, "The Nobel Committee met.", {}, keep);
    REQUIRE(untrimmed.size() == 1);
    CHECK(untrimmed[0].entity.surface == "The Nobel Committee");
}

TEST_CASE("extraction does not depend on the thread count", "[entities]") {
    SynthOptions o;
    o.nodes = 120;
    o.docs = 60;
    auto fx = synth_corpus(o);
    ExtractorOptions one;
    ExtractorOptions many;
    many.threads = 7;
    CHECK(extract_builtin(fx.corpus, fx.gazetteer, one) == extract_builtin(fx.corpus, fx.gazetteer, many));
}

TEST_CASE("frequencies on a synthetic corpus match a token-aligned recount", "[entities]") {
    SynthOptions o;
    o.nodes = 150;
    o.docs = 80;
    o.seed = 11;
    auto fx = synth_corpus(o);
    auto inv = extract_builtin(fx.corpus, fx.gazetteer);
    for (const auto& e : fx.entities) {
        std::size_t docs = 0;
        for (const auto& d : fx.corpus) {
            docs += contains_tokens(d.text, e.surface) ? 1 : 0;
        }
        INFO(e.surface);
        CHECK(inv.frequency(e) == docs);
        CHECK(fx.inventory.frequency(e) == docs);
    }
}

TEST_CASE("gazetteer parsing", "[entities]") {
    auto g = parse_gazetteer(R"({"Paris":"GPE","Curie":"PERSON"})");
    CHECK(g.at("Paris") == EntityType::Gpe);
    CHECK(parse_gazetteer(serialize_gazetteer(g)) == g);
    CHECK_THROWS_AS(parse_gazetteer(R"({"Paris":"TOWN"})"), Error);
    CHECK_THROWS_AS(parse_gazetteer("[1,2]"), Error);
}

TEST_CASE("extractor examples", "[entities]") {
    auto marie = extract_document(0, "Marie Curie won in 1903.", {}, {});
    REQUIRE(marie.size() == 2);
    CHECK(marie[0].entity == TypedEntity{"Marie Curie", EntityType::Person});
    CHECK(marie[0].start == 0);
    CHECK(marie[0].end == 11);
    CHECK(marie[1].entity == TypedEntity{"1903", EntityType::Date});
    CHECK(marie[1].start == 19);

    auto acme = extract_document(0, "Acme hired Bob.", Gazetteer{{"Acme", EntityType::Org}}, {});
    REQUIRE(acme.size() == 2);
    CHECK(acme[0].entity == TypedEntity{"Acme", EntityType::Org});
    CHECK(acme[1].entity == TypedEntity{"Bob", EntityType::Person});

    CHECK(extract_document(0, "all lowercase words here, nothing else.", {}, {}).empty());
}

TEST_CASE("saturation and absence", "[entities]") {
    std::vector<Document> docs;
    for (int i = 0; i < 10; ++i) {
        docs.push_back({"d" + std::to_string(i), "Paris again " + std::to_string(i + 100) + "x."});
    }
    auto c = Corpus::from_documents(docs);
    auto inv = extract_builtin(c, Gazetteer{{"Paris", EntityType::Gpe}});
    CHECK(inv.frequency({"Paris", EntityType::Gpe}) == 10);
    CHECK(inv.frequency({"London", EntityType::Gpe}) == 0);
    CHECK(inv.find({"London", EntityType::Gpe}) == nullptr);
}

TEST_CASE("twice in one document, once in another", "[entities]") {
    auto c = Corpus::from_documents({{"d1", "Paris and Paris."}, {"d2", "nothing."}, {"d3", "Paris."}});
    auto inv = extract_builtin(c, Gazetteer{{"Paris", EntityType::Gpe}});
    CHECK(inv.frequency({"Paris", EntityType::Gpe}) == 2);
    CHECK(inv.find({"Paris", EntityType::Gpe})->mentions.size() == 3);
}
