// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors
//
// Drives the typeswap binary end to end.

#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <filesystem>
#include <map>
#include <string>

#include "typeswap/corpus.hpp"
#include "typeswap/io.hpp"

namespace fs = std::filesystem;
using namespace typeswap;

namespace {

const fs::path kData = TYPESWAP_TEST_DATA;

int run(const std::string& args) {
    const std::string cmd = std::string(TYPESWAP_CLI_PATH) + " " + args + " 2>/dev/null >/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("typeswap_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        out[entry.path().filename().string()] = io::read_file(entry.path());
    }
    return out;
}

std::string fixture(const char* name) { return (kData / "fixture" / name).string(); }

std::string poison_args(const fs::path& out) {
    return "poison --corpus " + fixture("corpus.jsonl") + " --queries " + fixture("queries.jsonl") +
           " --annotations " + fixture("annotations.jsonl") + " --out " + out.string();
}

} // namespace

TEST_CASE("poison on the bundled fixture matches the golden files", "[cli]") {
    auto out = scratch("golden");
    REQUIRE(run(poison_args(out)) == 0);
    for (const char* name : {"plan.json", "poisoned_corpus.jsonl", "rewrite_log.json"}) {
        INFO(name);
        CHECK(io::read_file(out / name) == io::read_file(kData / "golden" / name));
    }
    CHECK(fs::exists(out / "manifest.json"));
    CHECK_FALSE(fs::exists(out / ".typeswap.lock"));
    CHECK(load_corpus(out / "poisoned_corpus.jsonl").size() == load_corpus(fixture("corpus.jsonl")).size());
}

TEST_CASE("global arm needs no query inputs", "[cli]") {
    auto out = scratch("global");
    CHECK(run("poison --strategy global --corpus " + fixture("corpus.jsonl") + " --gazetteer " +
              fixture("gazetteer.json") + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "plan.json"));
    auto no_queries = scratch("no_queries");
    CHECK(run("poison --strategy full --corpus " + fixture("corpus.jsonl") + " --out " + no_queries.string()) == 1);
}

TEST_CASE("exit codes", "[cli]") {
    auto out = scratch("codes");
    CHECK(run(poison_args(out) + " --budget 150") == 1);
    CHECK_FALSE(fs::exists(out / "poisoned_corpus.jsonl"));
    CHECK(run(poison_args(out) + " --strategy sideways") == 1);
    CHECK(run("poison --corpus /nonexistent/c.jsonl --strategy global --out " + out.string()) == 3);
    CHECK(run("frobnicate") == 1);
    CHECK(run("--version") == 0);

    // A stale annotation aborts before anything is written.
    auto stale = scratch("stale");
    fs::create_directories(stale);
    io::write_file_atomic(stale / "ann.jsonl", "{\"doc_id\":\"doc00\",\"mentions\":[{\"surface\":\"Nope\","
                                                "\"type\":\"PERSON\",\"start\":0,\"end\":4}]}\n");
    CHECK(run("poison --strategy global --corpus " + fixture("corpus.jsonl") + " --annotations " +
              (stale / "ann.jsonl").string() + " --out " + stale.string()) == 1);
    CHECK_FALSE(fs::exists(stale / "poisoned_corpus.jsonl"));
    CHECK_FALSE(fs::exists(stale / "manifest.json"));
}

TEST_CASE("a held lock keeps a second run out", "[cli]") {
    auto out = scratch("lock");
    fs::create_directories(out);
    io::write_file_atomic(out / ".typeswap.lock", "");
    CHECK(run(poison_args(out)) != 0);
    CHECK_FALSE(fs::exists(out / "plan.json"));
}

TEST_CASE("config file with flag overrides", "[cli]") {
    auto out = scratch("config");
    fs::create_directories(out);
    nlohmann::json config = {{"corpus", fixture("corpus.jsonl")},
                             {"queries", fixture("queries.jsonl")},
                             {"annotations", fixture("annotations.jsonl")},
                             {"budget", 150},
                             {"strategy", "global"},
                             {"output", out.string()}};
    io::write_file_atomic(out / "config.json", config.dump());
    CHECK(run("poison --config " + (out / "config.json").string()) == 1);
    REQUIRE(run("poison --config " + (out / "config.json").string() + " --budget 20") == 0);
    auto manifest = nlohmann::json::parse(io::read_file(out / "manifest.json"));
    CHECK(manifest["config"]["budget"] == 20.0);
    CHECK(manifest["config"]["strategy"] == "global");
    CHECK(manifest["config_sha256"].get<std::string>().size() == 64);
    CHECK(manifest["outputs"].contains("plan.json"));
}

TEST_CASE("graph and eval stages", "[cli]") {
    auto p = scratch("stage_poison");
    REQUIRE(run(poison_args(p)) == 0);

    auto g = scratch("stage_graph");
    REQUIRE(run("graph --corpus " + fixture("corpus.jsonl") + " --annotations " + fixture("annotations.jsonl") +
                " --poisoned " + (p / "poisoned_corpus.jsonl").string() + " --poisoned-annotations " +
                (p / "poisoned_annotations.jsonl").string() + " --plan " + (p / "plan.json").string() +
                " --out " + g.string()) == 0);
    CHECK(fs::exists(g / "hub_attack_report.json"));
    CHECK(fs::exists(g / "graph_clean.tsv"));
    auto metrics = nlohmann::json::parse(io::read_file(g / "graph_metrics.json"));
    CHECK(metrics["clean"]["nodes"] == metrics["poisoned"]["nodes"]);

    auto e = scratch("stage_eval");
    REQUIRE(run("eval --queries " + fixture("queries.jsonl") + " --responses " + fixture("responses.jsonl") +
                " --corpus " + fixture("corpus.jsonl") + " --annotations " + fixture("annotations.jsonl") +
                " --poisoned " + (p / "poisoned_corpus.jsonl").string() + " --poisoned-annotations " +
                (p / "poisoned_annotations.jsonl").string() + " --chains " + fixture("chains.jsonl") +
                " --rewrite-log " + (p / "rewrite_log.json").string() + " --out " + e.string()) == 0);
    auto report = nlohmann::json::parse(io::read_file(e / "eval_report.json"));
    CHECK(report.contains("asr"));
    CHECK(report["asr"]["asr"].get<double>() >= 0.0);
    CHECK(report.contains("severance"));
    CHECK(report.contains("stealth"));
    CHECK(report["efficiency"]["injected_tokens"] == 0);
}

TEST_CASE("run-all is byte deterministic and leaves queries untouched", "[cli]") {
    const auto queries_hash = io::sha256_file(fixture("queries.jsonl"));
    auto out = scratch("determinism");
    const auto args = "run-all --corpus " + fixture("corpus.jsonl") + " --queries " + fixture("queries.jsonl") +
                      " --gazetteer " + fixture("gazetteer.json") + " --chains " + fixture("chains.jsonl") +
                      " --threads 3 --out " + out.string();
    REQUIRE(run(args) == 0);
    auto first = snapshot(out);
    REQUIRE(run(args) == 0);
    auto second = snapshot(out);
    CHECK(first.size() >= 10);
    CHECK(first == second);
    CHECK(io::sha256_file(fixture("queries.jsonl")) == queries_hash);
}

TEST_CASE("synth writes a usable fixture", "[cli]") {
    auto out = scratch("synth");
    REQUIRE(run("synth --nodes 50 --docs 20 --seed 4 --out " + out.string()) == 0);
    for (const char* name : {"corpus.jsonl", "queries.jsonl", "annotations.jsonl", "query_entities.jsonl",
                             "chains.jsonl", "gazetteer.json", "manifest.json"}) {
        CHECK(fs::exists(out / name));
    }
    auto poisoned = scratch("synth_poison");
    CHECK(run("poison --corpus " + (out / "corpus.jsonl").string() + " --annotations " +
              (out / "annotations.jsonl").string() + " --query-entities " +
              (out / "query_entities.jsonl").string() + " --out " + poisoned.string()) == 0);
}
