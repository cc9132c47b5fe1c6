// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#include <catch_amalgamated.hpp>

#include <filesystem>

#include "typeswap/corpus.hpp"
#include "typeswap/error.hpp"
#include "typeswap/io.hpp"

using namespace typeswap;

namespace {

std::vector<std::string> surfaces(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& t : tokenize(text)) {
        out.emplace_back(t.surface);
    }
    return out;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected a typeswap::Error");
    return ErrorKind::Convergence;
}

} // namespace

TEST_CASE("tokenize splits punctuation and keeps joined words", "[corpus]") {
    CHECK(surfaces("Marie Curie won in 1903.") == std::vector<std::string>{"Marie", "Curie", "won", "in", "1903", "."});
    CHECK(surfaces("O'Neil's well-known (test)") ==
          std::vector<std::string>{"O'Neil's", "well-known", "(", "test", ")"});
    CHECK(surfaces("a - b 'c'") == std::vector<std::string>{"a", "-", "b", "'", "c", "'"});
    CHECK(surfaces("  \t\n ").empty());
    CHECK(surfaces("Zürich!") == std::vector<std::string>{"Zürich", "!"});
}

TEST_CASE("token spans slice back to their surface", "[corpus]") {
    const std::string text = "The Nobel Prize, 1911: Curie's second.";
    for (const auto& t : tokenize(text)) {
        CHECK(text.substr(t.start, t.end - t.start) == t.surface);
    }
}

TEST_CASE("corpus validation", "[corpus]") {
    SECTION("duplicate ids") {
        CHECK(kind_of([] { Corpus::from_documents({{"a", "x"}, {"a", "y"}}); }) == ErrorKind::Validation);
    }
    SECTION("blank text") {
        CHECK(kind_of([] { Corpus::from_documents({{"a", "  \n"}}); }) == ErrorKind::Validation);
    }
    SECTION("empty id") {
        CHECK(kind_of([] { Corpus::from_documents({{"", "text"}}); }) == ErrorKind::Validation);
    }
    SECTION("bad JSON reports the line") {
        try {
            parse_corpus("{\"id\":\"a\",\"text\":\"x\"}\n{oops\n", "c.jsonl");
            FAIL("no throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Parse);
            CHECK(std::string(e.what()).find("c.jsonl:2") != std::string::npos);
        }
    }
    SECTION("missing field") {
        CHECK(kind_of([] { parse_corpus("{\"id\":\"a\"}\n"); }) == ErrorKind::Parse);
    }
}

TEST_CASE("corpus and query files round-trip", "[corpus]") {
    auto corpus = Corpus::from_documents({{"d1", "Alpha met \"Beta\".\nNew line."}, {"d2", "Gamma"}});
    auto parsed = parse_corpus(serialize_corpus(corpus));
    CHECK(parsed == corpus);
    REQUIRE(parsed.find("d2").has_value());
    CHECK(*parsed.find("d2") == 1);
    CHECK_FALSE(parsed.find("d3").has_value());

    std::vector<Query> queries{{"q1", "Who?", "Alpha"}, {"q2", "Where?", "Gamma"}};
    CHECK(parse_queries(serialize_queries(queries)) == queries);
    CHECK(kind_of([] { parse_queries("{\"id\":\"q\",\"question\":\"\",\"answer\":\"a\"}\n"); }) ==
          ErrorKind::Validation);
}

TEST_CASE("atomic writes and hashing", "[io]") {
    const auto dir = std::filesystem::temp_directory_path() / "typeswap_io_test";
    std::filesystem::create_directories(dir);
    const auto file = dir / "out.txt";
    io::write_file_atomic(file, "abc");
    CHECK(io::read_file(file) == "abc");
    // Known SHA-256 test vector.
    CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(io::sha256_file(file) == io::sha256_hex("abc"));
    CHECK(kind_of([&] { io::read_file(dir / "missing.txt"); }) == ErrorKind::Io);
    std::filesystem::remove_all(dir);
}

TEST_CASE("tokenize on the comma example and the partition property", "[corpus]") {
    CHECK(surfaces("Paris, France") == std::vector<std::string>{"Paris", ",", "France"});
    CHECK(surfaces("").empty());
    const std::string text = "  Dr. Who's  (tardis)-time, 42%\tend ";
    std::string rebuilt;
    std::size_t cursor = 0;
    for (const auto& t : tokenize(text)) {
        REQUIRE(t.start >= cursor);
        auto gap = text.substr(cursor, t.start - cursor);
        CHECK(gap.find_first_not_of(" \t\n\r\f\v") == std::string::npos);
        rebuilt += gap;
        rebuilt += t.surface;
        cursor = t.end;
    }
    rebuilt += text.substr(cursor);
    CHECK(rebuilt == text);
}

TEST_CASE("corpus files keep order and handle the empty case", "[corpus]") {
    auto c = parse_corpus("{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"b\",\"text\":\"y\"}\n{\"id\":\"c\",\"text\":\"z\"}\n");
    REQUIRE(c.size() == 3);
    CHECK(c[0].id == "a");
    CHECK(c[2].id == "c");

    auto empty = parse_corpus("");
    CHECK(empty.empty());
    CHECK(serialize_corpus(empty).empty());
    CHECK(parse_corpus(serialize_corpus(empty)).empty());
}
