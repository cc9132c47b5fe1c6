// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors
//
// typeswap: poison a corpus, analyse the entity graph, score the result.
// Stages talk only through files; every run directory gets a manifest.

#include <fcntl.h>
#include <unistd.h>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "typeswap/corpus.hpp"
#include "typeswap/entities.hpp"
#include "typeswap/error.hpp"
#include "typeswap/evaluate.hpp"
#include "typeswap/graph.hpp"
#include "typeswap/io.hpp"
#include "typeswap/pipeline.hpp"
#include "typeswap/synth.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using namespace typeswap;

namespace {

constexpr const char* kVersion = TYPESWAP_VERSION;

// ---- configuration --------------------------------------------------------

// Raw flag values; unset means "not given on the command line".
struct Flags {
    std::optional<std::string> config;
    std::optional<std::string> corpus, queries, annotations, query_entities, gazetteer;
    std::optional<std::string> poisoned, poisoned_annotations, plan, rewrite_log;
    std::optional<std::string> responses, judgments, chains;
    std::optional<std::string> output;
    std::optional<double> budget;
    std::optional<std::string> strategy, rotation, window, missing_policy;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::size_t> hop_slack, ngram_order, holdout_stride;
    std::optional<std::size_t> nodes, attachment, docs, chain_count;
    bool timings = false;
};

struct RunConfig {
    std::optional<fs::path> corpus, queries, annotations, query_entities, gazetteer;
    std::optional<fs::path> poisoned, poisoned_annotations, plan, rewrite_log;
    std::optional<fs::path> responses, judgments, chains;
    fs::path output;
    double budget = 5.0;
    Strategy strategy = Strategy::Full;
    Rotation rotation = Rotation::Backward;
    Window window = Window::Document;
    MissingPolicy missing_policy = MissingPolicy::Strict;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::size_t hop_slack = 1;
    std::size_t ngram_order = 4;
    std::size_t holdout_stride = 2;
    SynthOptions synth;
    bool timings = false;
};

class Layered {
public:
    explicit Layered(nlohmann::json file) : file_(std::move(file)) {}

    template <typename T>
    T pick(const std::optional<T>& flag, const char* key, T fallback) const {
        if (flag) {
            return *flag;
        }
        auto it = file_.find(key);
        if (it == file_.end() || it->is_null()) {
            return fallback;
        }
        try {
            return it->get<T>();
        } catch (const nlohmann::json::exception&) {
            fail(ErrorKind::Validation, std::string("config field '") + key + "' has the wrong type");
        }
    }

    std::optional<fs::path> path(const std::optional<std::string>& flag, const char* key) const {
        auto value = pick<std::string>(flag, key, "");
        if (value.empty()) {
            return std::nullopt;
        }
        fs::path p(value);
        if (!flag && p.is_relative()) {
            p = base_ / p;  // file-relative paths resolve against the config's directory
        }
        return fs::absolute(p).lexically_normal();
    }

    void set_base(fs::path base) { base_ = std::move(base); }

private:
    nlohmann::json file_;
    fs::path base_;
};

RunConfig resolve(const Flags& flags) {
    nlohmann::json file = nlohmann::json::object();
    fs::path base = fs::current_path();
    if (flags.config) {
        const fs::path config_path(*flags.config);
        try {
            file = nlohmann::json::parse(io::read_file(config_path));
        } catch (const nlohmann::json::parse_error& e) {
            fail(ErrorKind::Parse, config_path.string() + ": " + e.what());
        }
        if (!file.is_object()) {
            fail(ErrorKind::Parse, config_path.string() + ": config must be a JSON object");
        }
        base = fs::absolute(config_path).parent_path();
    }
    Layered layers(file);
    layers.set_base(base);

    RunConfig c;
    c.corpus = layers.path(flags.corpus, "corpus");
    c.queries = layers.path(flags.queries, "queries");
    c.annotations = layers.path(flags.annotations, "annotations");
    c.query_entities = layers.path(flags.query_entities, "query_entities");
    c.gazetteer = layers.path(flags.gazetteer, "gazetteer");
    c.poisoned = layers.path(flags.poisoned, "poisoned");
    c.poisoned_annotations = layers.path(flags.poisoned_annotations, "poisoned_annotations");
    c.plan = layers.path(flags.plan, "plan");
    c.rewrite_log = layers.path(flags.rewrite_log, "rewrite_log");
    c.responses = layers.path(flags.responses, "responses");
    c.judgments = layers.path(flags.judgments, "judgments");
    c.chains = layers.path(flags.chains, "chains");
    auto output = layers.path(flags.output, "output");
    if (!output) {
        fail(ErrorKind::Validation, "an output directory is required (--out or \"output\")");
    }
    c.output = *output;

    c.budget = layers.pick(flags.budget, "budget", 5.0);
    if (!(c.budget >= 0.0 && c.budget <= 100.0)) {
        fail(ErrorKind::Validation, "budget must lie in [0, 100], got " + std::to_string(c.budget));
    }
    auto strategy = layers.pick<std::string>(flags.strategy, "strategy", "full");
    auto s = parse_strategy(strategy);
    if (!s) {
        fail(ErrorKind::Validation, "strategy must be global, query or full, got '" + strategy + "'");
    }
    c.strategy = *s;
    auto rotation = layers.pick<std::string>(flags.rotation, "rotation", "backward");
    auto r = parse_rotation(rotation);
    if (!r) {
        fail(ErrorKind::Validation, "rotation must be backward or forward, got '" + rotation + "'");
    }
    c.rotation = *r;
    auto window = layers.pick<std::string>(flags.window, "window", "document");
    auto w = parse_window(window);
    if (!w) {
        fail(ErrorKind::Validation, "window must be document or sentence, got '" + window + "'");
    }
    c.window = *w;
    auto policy = layers.pick<std::string>(flags.missing_policy, "missing_policy", "strict");
    if (policy == "strict") {
        c.missing_policy = MissingPolicy::Strict;
    } else if (policy == "lenient") {
        c.missing_policy = MissingPolicy::Lenient;
    } else {
        fail(ErrorKind::Validation, "missing_policy must be strict or lenient, got '" + policy + "'");
    }
    c.seed = layers.pick(flags.seed, "seed", std::uint64_t{1});
    c.threads = layers.pick(flags.threads, "threads", 1u);
    if (c.threads == 0) {
        fail(ErrorKind::Validation, "threads must be >= 1");
    }
    c.hop_slack = layers.pick(flags.hop_slack, "hop_slack", std::size_t{1});
    c.ngram_order = layers.pick(flags.ngram_order, "ngram_order", std::size_t{4});
    c.holdout_stride = layers.pick(flags.holdout_stride, "holdout_stride", std::size_t{2});
    c.synth.nodes = layers.pick(flags.nodes, "nodes", c.synth.nodes);
    c.synth.attachment = layers.pick(flags.attachment, "attachment", c.synth.attachment);
    c.synth.docs = layers.pick(flags.docs, "docs", c.synth.docs);
    c.synth.chains = layers.pick(flags.chain_count, "chain_count", c.synth.chains);
    c.synth.seed = c.seed;
    c.timings = flags.timings || layers.pick<bool>(std::nullopt, "timings", false);
    return c;
}

ojson effective_config(const RunConfig& c) {
    ojson j;
    auto put_path = [&](const char* key, const std::optional<fs::path>& p) {
        j[key] = p ? ojson(p->string()) : ojson(nullptr);
    };
    put_path("corpus", c.corpus);
    put_path("queries", c.queries);
    put_path("annotations", c.annotations);
    put_path("query_entities", c.query_entities);
    put_path("gazetteer", c.gazetteer);
    put_path("poisoned", c.poisoned);
    put_path("poisoned_annotations", c.poisoned_annotations);
    put_path("plan", c.plan);
    put_path("rewrite_log", c.rewrite_log);
    put_path("responses", c.responses);
    put_path("judgments", c.judgments);
    put_path("chains", c.chains);
    j["output"] = c.output.string();
    j["budget"] = c.budget;
    j["strategy"] = to_string(c.strategy);
    j["rotation"] = to_string(c.rotation);
    j["window"] = to_string(c.window);
    j["missing_policy"] = c.missing_policy == MissingPolicy::Strict ? "strict" : "lenient";
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["hop_slack"] = c.hop_slack;
    j["ngram_order"] = c.ngram_order;
    j["holdout_stride"] = c.holdout_stride;
    j["nodes"] = c.synth.nodes;
    j["attachment"] = c.synth.attachment;
    j["docs"] = c.synth.docs;
    j["chain_count"] = c.synth.chains;
    j["timings"] = c.timings;
    return j;
}

std::string config_hash(const RunConfig& c) {
    return io::sha256_hex(effective_config(c).dump());
}

const fs::path& require(const std::optional<fs::path>& p, const char* what) {
    if (!p) {
        fail(ErrorKind::Validation, std::string("missing required input: ") + what);
    }
    return *p;
}

// ---- run directory ---------------------------------------------------------

class RunLock {
public:
    explicit RunLock(const fs::path& dir) : path_(dir / ".typeswap.lock") {
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) {
            fail(ErrorKind::Io, "run directory '" + dir.string() + "' is locked by another run (" +
                                    path_.string() + ")");
        }
    }
    ~RunLock() {
        ::close(fd_);
        std::error_code ignored;
        fs::remove(path_, ignored);
    }
    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;

private:
    fs::path path_;
    int fd_ = -1;
};

// Outputs are staged here and only written once every stage has succeeded.
struct Staging {
    std::map<std::string, std::string> files;
    ojson inputs = ojson::object();

    void add(const std::string& name, std::string contents) { files[name] = std::move(contents); }
    void add_json(const std::string& name, const ojson& j) { files[name] = j.dump(2) + "\n"; }
    void note_input(const char* role, const fs::path& p) { inputs[role] = {{"path", p.string()}, {"sha256", io::sha256_file(p)}}; }
};

void commit(const RunConfig& c, const std::string& command, Staging& staged) {
    ojson manifest;
    manifest["tool"] = "typeswap";
    manifest["version"] = kVersion;
    manifest["command"] = command;
    manifest["config"] = effective_config(c);
    manifest["config_sha256"] = config_hash(c);
    manifest["inputs"] = staged.inputs;
    auto outputs = ojson::object();
    for (const auto& [name, contents] : staged.files) {
        outputs[name] = io::sha256_hex(contents);
    }
    manifest["outputs"] = std::move(outputs);
    staged.add_json("manifest.json", manifest);
    for (const auto& [name, contents] : staged.files) {
        io::write_file_atomic(c.output / name, contents);
    }
}

ojson run_metadata(const RunConfig& c) {
    ojson j;
    j["seed"] = c.seed;
    j["budget"] = c.budget;
    j["strategy"] = to_string(c.strategy);
    j["config_sha256"] = config_hash(c);
    return j;
}

// ---- stages --------------------------------------------------------------------

EntityInventory inventory_for(const Corpus& corpus, const std::optional<fs::path>& annotations,
                              const Gazetteer& gazetteer, unsigned threads) {
    if (annotations) {
        return import_annotations(corpus, *annotations);
    }
    ExtractorOptions options;
    options.threads = threads;
    return extract_builtin(corpus, gazetteer, options);
}

struct PoisonStage {
    Corpus corpus;
    PoisonRun run;
};

PoisonStage stage_poison(const RunConfig& c, Staging& staged) {
    const auto& corpus_path = require(c.corpus, "corpus");
    staged.note_input("corpus", corpus_path);
    PoisonStage out{load_corpus(corpus_path), {}};

    PoisonInputs inputs;
    inputs.corpus = &out.corpus;
    std::vector<Query> queries;
    std::optional<std::string> queries_hash;
    if (c.strategy != Strategy::Global) {
        if (c.query_entities) {
            staged.note_input("query_entities", *c.query_entities);
            inputs.query_entities = import_query_entities(*c.query_entities);
        } else {
            const auto& qpath = require(c.queries, "queries (or query_entities) for the query arms");
            queries_hash = io::sha256_file(qpath);
            staged.note_input("queries", qpath);
            queries = load_queries(qpath);
            inputs.queries = &queries;
        }
    }
    if (c.annotations) {
        staged.note_input("annotations", *c.annotations);
        inputs.inventory = import_annotations(out.corpus, *c.annotations);
    }
    if (c.gazetteer) {
        staged.note_input("gazetteer", *c.gazetteer);
        inputs.gazetteer = load_gazetteer(*c.gazetteer);
    }

    PoisonOptions options;
    options.budget_percent = c.budget;
    options.strategy = c.strategy;
    options.rotation = c.rotation;
    options.threads = c.threads;
    out.run = run_poison(std::move(inputs), options);

    if (queries_hash && io::sha256_file(*c.queries) != *queries_hash) {
        fail(ErrorKind::Io, "queries file changed while the run was in progress");
    }
    for (const auto& w : out.run.plan.warnings) {
        std::cerr << "warning: " << w << "\n";
    }

    staged.add("plan.json", serialize_plan(out.run.plan));
    staged.add("poisoned_corpus.jsonl", serialize_corpus(out.run.rewrite.poisoned));
    staged.add("rewrite_log.json", serialize_rewrite_log(out.run.rewrite.log));
    staged.add("clean_annotations.jsonl", serialize_annotations(out.corpus, out.run.inventory));
    staged.add("poisoned_annotations.jsonl",
               serialize_annotations(out.run.rewrite.poisoned, out.run.rewrite.poisoned_inventory));
    std::vector<PhaseTiming> timings;
    if (c.timings) {
        timings = out.run.timings;
    }
    auto efficiency = to_json(efficiency_report(out.run.rewrite.log, timings));
    efficiency["run"] = run_metadata(c);
    staged.add_json("efficiency.json", efficiency);
    return out;
}

ojson node_table(const EntityGraph& g, const EntityInventory& inventory, unsigned threads) {
    const auto centrality = compute_centrality(g, threads);
    std::optional<SpectralReport> spectral;
    if (g.edge_count() > 0) {
        spectral = compute_spectral(g);
    }
    auto nodes = ojson::array();
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        ojson n;
        n["surface"] = g.node(i).surface;
        n["type"] = to_string(g.node(i).type);
        n["frequency"] = frequency(inventory, g.node(i));
        n["degree"] = g.degree(i);
        n["degree_centrality"] = centrality.degree[i];
        n["betweenness"] = centrality.betweenness[i];
        n["closeness"] = centrality.closeness[i];
        n["closeness_component_restricted"] = static_cast<bool>(centrality.component_restricted[i]);
        n["eigenvector"] = spectral ? ojson(spectral->eigenvector[i]) : ojson(nullptr);
        nodes.push_back(std::move(n));
    }
    ojson j;
    j["lambda_max"] = spectral ? ojson(spectral->lambda_max) : ojson(nullptr);
    j["power_iterations"] = spectral ? ojson(spectral->iterations) : ojson(nullptr);
    j["nodes"] = std::move(nodes);
    return j;
}

ojson metrics_json(const EntityGraph& g, const EntityInventory& inventory, unsigned threads) {
    const auto m = compute_metrics(g);
    ojson j;
    j["nodes"] = g.node_count();
    j["edges"] = g.edge_count();
    j["mean_degree"] = m.mean_degree;
    j["second_moment"] = m.second_moment;
    j["kappa"] = m.kappa ? ojson(*m.kappa) : ojson(nullptr);
    j["giant_fraction"] = m.giant_fraction;
    j["components"] = m.component_count;
    j["average_path_length"] = m.average_path_length;
    j["powerlaw_gamma"] = m.powerlaw_gamma ? ojson(*m.powerlaw_gamma) : ojson(nullptr);
    j["degree_histogram"] = m.degree_histogram;
    j["frequency_degree_spearman"] = g.node_count() >= 2 ? ojson(frequency_degree_correlation(inventory, g))
                                                         : ojson(nullptr);
    auto table = node_table(g, inventory, threads);
    j["lambda_max"] = table["lambda_max"];
    j["power_iterations"] = table["power_iterations"];
    j["per_node"] = std::move(table["nodes"]);
    return j;
}

ojson hub_json(const HubAttackReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); };
    ojson j;
    j["giant_fraction_clean"] = r.giant_fraction_clean;
    j["giant_fraction_poisoned"] = r.giant_fraction_poisoned;
    j["kappa_clean"] = opt(r.kappa_clean);
    j["kappa_poisoned"] = opt(r.kappa_poisoned);
    j["lambda_max_clean"] = opt(r.lambda_clean);
    j["lambda_max_poisoned"] = opt(r.lambda_poisoned);
    j["average_path_length_clean"] = r.path_length_clean;
    j["average_path_length_poisoned"] = r.path_length_poisoned;
    j["target_edges_clean"] = r.target_edges_clean;
    j["target_edges_preserved"] = r.target_edges_preserved;
    j["edge_preservation"] = r.edge_preservation;
    return j;
}

struct Graphs {
    EntityGraph clean;
    EntityGraph poisoned;
};

Graphs stage_graph(const RunConfig& c, const Corpus& clean, const EntityInventory& clean_inv,
                   const Corpus& poisoned, const EntityInventory& poisoned_inv,
                   const std::vector<TypedEntity>& targets, Staging& staged) {
    Graphs g{build_graph(clean, clean_inv, c.window), build_graph(poisoned, poisoned_inv, c.window)};
    staged.add("graph_clean.tsv", serialize_edge_list(g.clean));
    staged.add("graph_poisoned.tsv", serialize_edge_list(g.poisoned));
    ojson metrics;
    metrics["run"] = run_metadata(c);
    metrics["window"] = to_string(c.window);
    metrics["clean"] = metrics_json(g.clean, clean_inv, c.threads);
    metrics["poisoned"] = metrics_json(g.poisoned, poisoned_inv, c.threads);
    staged.add_json("graph_metrics.json", metrics);

    const std::set<TypedEntity> target_set(targets.begin(), targets.end());
    auto hub = hub_json(hub_attack_report(g.clean, g.poisoned, target_set));
    hub["run"] = run_metadata(c);
    hub["targets"] = target_set.size();
    staged.add_json("hub_attack_report.json", hub);
    return g;
}

struct EvalInputs {
    const Corpus* clean = nullptr;
    const Corpus* poisoned = nullptr;
    const Graphs* graphs = nullptr;
    const RewriteLog* log = nullptr;
};

void stage_eval(const RunConfig& c, const EvalInputs& in, Staging& staged) {
    ojson report;
    report["run"] = run_metadata(c);
    if (c.responses) {
        const auto& qpath = require(c.queries, "queries (to score responses)");
        staged.note_input("queries", qpath);
        staged.note_input("responses", *c.responses);
        auto queries = load_queries(qpath);
        report["asr"] = to_json(asr(*c.responses, queries, c.missing_policy));
    }
    if (c.judgments) {
        staged.note_input("judgments", *c.judgments);
        auto judged = judged_asr(parse_judgments(io::read_file(*c.judgments), c.judgments->string()));
        report["judged_asr"] = {{"rate", judged.rate}, {"judged", judged.judged}, {"unjudged", judged.unjudged}};
    }
    if (c.chains && in.graphs != nullptr) {
        staged.note_input("chains", *c.chains);
        auto chains = load_chains(*c.chains);
        auto sev = to_json(chain_severance(chains, in.graphs->clean, in.graphs->poisoned, c.hop_slack));
        sev["hop_slack"] = c.hop_slack;
        report["severance"] = std::move(sev);
    }
    if (in.clean != nullptr && in.poisoned != nullptr) {
        StealthOptions options;
        options.ngram_order = c.ngram_order;
        options.holdout_stride = c.holdout_stride;
        auto st = to_json(stealth(*in.clean, *in.poisoned, options));
        st["ngram_order"] = c.ngram_order;
        report["stealth"] = std::move(st);
    }
    if (in.log != nullptr) {
        report["efficiency"] = to_json(efficiency_report(*in.log, {}));
    }
    staged.add_json("eval_report.json", report);
}

// ---- subcommands ---------------------------------------------------------------

void prepare_output(const RunConfig& c) {
    std::error_code ec;
    fs::create_directories(c.output, ec);
    if (ec) {
        fail(ErrorKind::Io, "cannot create output directory '" + c.output.string() + "': " + ec.message());
    }
}

void cmd_poison(const RunConfig& c) {
    prepare_output(c);
    RunLock lock(c.output);
    Staging staged;
    stage_poison(c, staged);
    commit(c, "poison", staged);
}

void cmd_graph(const RunConfig& c) {
    prepare_output(c);
    RunLock lock(c.output);
    Staging staged;
    const auto& corpus_path = require(c.corpus, "corpus");
    const auto& poisoned_path = require(c.poisoned, "poisoned corpus");
    staged.note_input("corpus", corpus_path);
    staged.note_input("poisoned", poisoned_path);
    Gazetteer gazetteer;
    if (c.gazetteer) {
        staged.note_input("gazetteer", *c.gazetteer);
        gazetteer = load_gazetteer(*c.gazetteer);
    }
    auto clean = load_corpus(corpus_path);
    auto poisoned = load_corpus(poisoned_path);
    if (c.annotations) {
        staged.note_input("annotations", *c.annotations);
    }
    if (c.poisoned_annotations) {
        staged.note_input("poisoned_annotations", *c.poisoned_annotations);
    }
    auto clean_inv = inventory_for(clean, c.annotations, gazetteer, c.threads);
    auto poisoned_inv = inventory_for(poisoned, c.poisoned_annotations, gazetteer, c.threads);
    std::vector<TypedEntity> targets;
    if (c.plan) {
        staged.note_input("plan", *c.plan);
        targets = load_plan(*c.plan).targets();
    }
    stage_graph(c, clean, clean_inv, poisoned, poisoned_inv, targets, staged);
    commit(c, "graph", staged);
}

void cmd_eval(const RunConfig& c) {
    prepare_output(c);
    RunLock lock(c.output);
    Staging staged;
    std::optional<Corpus> clean, poisoned;
    std::optional<Graphs> graphs;
    std::optional<RewriteLog> log;
    if (c.corpus && c.poisoned) {
        staged.note_input("corpus", *c.corpus);
        staged.note_input("poisoned", *c.poisoned);
        clean = load_corpus(*c.corpus);
        poisoned = load_corpus(*c.poisoned);
        if (c.chains) {
            Gazetteer gazetteer;
            if (c.gazetteer) {
                staged.note_input("gazetteer", *c.gazetteer);
                gazetteer = load_gazetteer(*c.gazetteer);
            }
            auto clean_inv = inventory_for(*clean, c.annotations, gazetteer, c.threads);
            auto poisoned_inv = inventory_for(*poisoned, c.poisoned_annotations, gazetteer, c.threads);
            graphs = Graphs{build_graph(*clean, clean_inv, c.window), build_graph(*poisoned, poisoned_inv, c.window)};
        }
    }
    if (c.rewrite_log) {
        staged.note_input("rewrite_log", *c.rewrite_log);
        log = parse_rewrite_log(io::read_file(*c.rewrite_log), c.rewrite_log->string());
    }
    EvalInputs in;
    in.clean = clean ? &*clean : nullptr;
    in.poisoned = poisoned ? &*poisoned : nullptr;
    in.graphs = graphs ? &*graphs : nullptr;
    in.log = log ? &*log : nullptr;
    stage_eval(c, in, staged);
    commit(c, "eval", staged);
}

void cmd_synth(const RunConfig& c) {
    prepare_output(c);
    RunLock lock(c.output);
    Staging staged;
    auto fx = synth_corpus(c.synth);
    staged.add("corpus.jsonl", serialize_corpus(fx.corpus));
    staged.add("queries.jsonl", serialize_queries(fx.queries));
    staged.add("annotations.jsonl", serialize_annotations(fx.corpus, fx.inventory));
    staged.add("query_entities.jsonl", serialize_query_entities(fx.query_entities));
    staged.add("chains.jsonl", serialize_chains(fx.chains));
    staged.add("gazetteer.json", serialize_gazetteer(fx.gazetteer));
    commit(c, "synth", staged);
}

void cmd_run_all(const RunConfig& c) {
    prepare_output(c);
    RunLock lock(c.output);
    Staging staged;
    auto poison = stage_poison(c, staged);
    const auto& rewrite = poison.run.rewrite;
    auto graphs = stage_graph(c, poison.corpus, poison.run.inventory, rewrite.poisoned, rewrite.poisoned_inventory,
                              poison.run.plan.targets(), staged);
    EvalInputs in;
    in.clean = &poison.corpus;
    in.poisoned = &rewrite.poisoned;
    in.graphs = &graphs;
    in.log = &rewrite.log;
    stage_eval(c, in, staged);
    commit(c, "run-all", staged);
}

void add_common(CLI::App& sub, Flags& f) {
    sub.add_option("--config", f.config, "JSON config file; flags override its values");
    sub.add_option("-o,--out", f.output, "Run output directory");
    sub.add_option("--threads", f.threads, "Worker threads inside stages");
    sub.add_option("--seed", f.seed, "Seed recorded with the run (drives synth)");
    sub.add_flag("--timings", f.timings, "Record wall-clock phase timings (makes outputs run-dependent)");
}

void add_inputs(CLI::App& sub, Flags& f) {
    sub.add_option("--corpus", f.corpus, "Clean corpus (JSONL {id, text})");
    sub.add_option("--queries", f.queries, "Queries (JSONL {id, question, answer})");
    sub.add_option("--annotations", f.annotations, "Mention annotations for the clean corpus");
    sub.add_option("--gazetteer", f.gazetteer, "Surface -> type map for the built-in extractor");
}

void add_poison_knobs(CLI::App& sub, Flags& f) {
    sub.add_option("--query-entities", f.query_entities, "Reasoning-chain entities per query");
    sub.add_option("--budget", f.budget, "Per-type hub budget n% (default 5)");
    sub.add_option("--strategy", f.strategy, "global | query | full (default full)");
    sub.add_option("--rotation", f.rotation, "backward | forward (default backward)");
}

void add_graph_knobs(CLI::App& sub, Flags& f) {
    sub.add_option("--window", f.window, "Co-occurrence window: document | sentence");
}

void add_eval_knobs(CLI::App& sub, Flags& f) {
    sub.add_option("--responses", f.responses, "Model responses (JSONL {query_id, prediction})");
    sub.add_option("--judgments", f.judgments, "External judgments (JSONL {query_id, judgment})");
    sub.add_option("--chains", f.chains, "Gold reasoning chains (JSONL)");
    sub.add_option("--missing-policy", f.missing_policy, "strict | lenient for absent responses");
    sub.add_option("--hop-slack", f.hop_slack, "Max hops between consecutive chain entities");
    sub.add_option("--ngram-order", f.ngram_order, "Order of the stealth n-gram model");
    sub.add_option("--holdout-stride", f.holdout_stride, "Every k-th document trains the stealth model");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"typeswap: type-preserving entity swap poisoning and graph analysis"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Flags f;

    auto* poison = app.add_subcommand("poison", "Build the swap plan and rewrite the corpus");
    add_common(*poison, f);
    add_inputs(*poison, f);
    add_poison_knobs(*poison, f);

    auto* graph = app.add_subcommand("graph", "Compare clean and poisoned co-occurrence graphs");
    add_common(*graph, f);
    add_inputs(*graph, f);
    add_graph_knobs(*graph, f);
    graph->add_option("--poisoned", f.poisoned, "Poisoned corpus");
    graph->add_option("--poisoned-annotations", f.poisoned_annotations, "Mention annotations for the poisoned corpus");
    graph->add_option("--plan", f.plan, "Plan file; its targets feed the hub report");

    auto* eval = app.add_subcommand("eval", "Score a poisoning run");
    add_common(*eval, f);
    add_inputs(*eval, f);
    add_graph_knobs(*eval, f);
    add_eval_knobs(*eval, f);
    eval->add_option("--poisoned", f.poisoned, "Poisoned corpus");
    eval->add_option("--poisoned-annotations", f.poisoned_annotations, "Mention annotations for the poisoned corpus");
    eval->add_option("--rewrite-log", f.rewrite_log, "Rewrite log for efficiency accounting");

    auto* synth = app.add_subcommand("synth", "Write a seeded synthetic fixture");
    add_common(*synth, f);
    synth->add_option("--nodes", f.nodes, "Entities in the topology");
    synth->add_option("--attachment", f.attachment, "Edges added per new entity");
    synth->add_option("--docs", f.docs, "Documents");
    synth->add_option("--chain-count", f.chain_count, "Gold chains (0: nodes / 5)");

    auto* all = app.add_subcommand("run-all", "poison, graph and eval in one run directory");
    add_common(*all, f);
    add_inputs(*all, f);
    add_poison_knobs(*all, f);
    add_graph_knobs(*all, f);
    add_eval_knobs(*all, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const auto config = resolve(f);
        if (poison->parsed()) {
            cmd_poison(config);
        } else if (graph->parsed()) {
            cmd_graph(config);
        } else if (eval->parsed()) {
            cmd_eval(config);
        } else if (synth->parsed()) {
            cmd_synth(config);
        } else {
            cmd_run_all(config);
        }
    } catch (const Error& e) {
        std::cerr << "typeswap: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "typeswap: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "typeswap: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
