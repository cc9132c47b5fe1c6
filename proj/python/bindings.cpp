// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "typeswap/corpus.hpp"
#include "typeswap/entities.hpp"
#include "typeswap/error.hpp"
#include "typeswap/evaluate.hpp"
#include "typeswap/graph.hpp"
#include "typeswap/pipeline.hpp"
#include "typeswap/query_pool.hpp"
#include "typeswap/swap.hpp"
#include "typeswap/synth.hpp"

namespace py = pybind11;
using namespace typeswap;

namespace {

// Entities cross the boundary as (surface, type-label) tuples.
using PyEntity = std::pair<std::string, std::string>;

EntityType type_of(const std::string& label) {
    auto t = parse_entity_type(label);
    if (!t) {
        fail(ErrorKind::Validation, "unknown entity type '" + label + "'");
    }
    return *t;
}

TypedEntity to_entity(const PyEntity& e) { return {e.first, type_of(e.second)}; }
PyEntity from_entity(const TypedEntity& e) { return {e.surface, std::string(to_string(e.type))}; }

py::object to_python(const nlohmann::ordered_json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

template <typename T, typename Parse>
T parse_label(const std::string& label, Parse parse, const char* what) {
    auto v = parse(label);
    if (!v) {
        fail(ErrorKind::Validation, std::string("unknown ") + what + " '" + label + "'");
    }
    return *v;
}

Gazetteer to_gazetteer(const std::map<std::string, std::string>& entries) {
    Gazetteer g;
    for (const auto& [surface, label] : entries) {
        g.emplace(surface, type_of(label));
    }
    return g;
}

std::map<std::string, std::string> from_gazetteer(const Gazetteer& g) {
    std::map<std::string, std::string> out;
    for (const auto& [surface, type] : g) {
        out.emplace(surface, std::string(to_string(type)));
    }
    return out;
}

std::vector<GoldChain> to_chains(const std::vector<std::pair<std::string, std::vector<PyEntity>>>& in) {
    std::vector<GoldChain> out;
    for (const auto& [id, entities] : in) {
        GoldChain c{id, {}};
        for (const auto& e : entities) {
            c.entities.push_back(to_entity(e));
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<std::pair<std::string, std::vector<PyEntity>>> from_chains(const std::vector<GoldChain>& in) {
    std::vector<std::pair<std::string, std::vector<PyEntity>>> out;
    for (const auto& c : in) {
        std::vector<PyEntity> entities;
        for (const auto& e : c.entities) {
            entities.push_back(from_entity(e));
        }
        out.emplace_back(c.query_id, std::move(entities));
    }
    return out;
}

py::dict metrics_dict(const GraphMetrics& m) {
    py::dict d;
    d["degree"] = m.degree;
    d["mean_degree"] = m.mean_degree;
    d["second_moment"] = m.second_moment;
    d["kappa"] = m.kappa;
    d["giant_fraction"] = m.giant_fraction;
    d["component_count"] = m.component_count;
    d["degree_histogram"] = m.degree_histogram;
    d["powerlaw_gamma"] = m.powerlaw_gamma;
    d["average_path_length"] = m.average_path_length;
    return d;
}

struct PoisonResult {
    Corpus poisoned;
    EntityInventory inventory;
    EntityInventory poisoned_inventory;
    std::vector<TypedEntity> targets;
    std::string plan_json;
    std::string rewrite_log_json;
    RewriteLog log;
    std::vector<PhaseTiming> timings;
};

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Entity-swap corpus poisoning and co-occurrence graph analysis";
    m.attr("__version__") = TYPESWAP_VERSION;

    static py::exception<Error> error(m, "TypeswapError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Io) {
                PyErr_SetString(PyExc_OSError, e.what());
            } else {
                py::set_error(error, e.what());
            }
        }
    });

    py::class_<Query>(m, "Query")
        .def(py::init([](std::string id, std::string question, std::string gold) {
                 return Query{std::move(id), std::move(question), std::move(gold)};
             }),
             py::arg("id"), py::arg("question"), py::arg("gold_answer"))
        .def_readonly("id", &Query::id)
        .def_readonly("question", &Query::question)
        .def_readonly("gold_answer", &Query::gold_answer)
        .def("__repr__", [](const Query& q) { return "Query(" + q.id + ")"; });

    py::class_<Corpus>(m, "Corpus")
        .def(py::init([](const std::vector<std::pair<std::string, std::string>>& docs) {
                 std::vector<Document> d;
                 for (const auto& [id, text] : docs) {
                     d.push_back({id, text});
                 }
                 return Corpus::from_documents(std::move(d));
             }),
             py::arg("documents"))
        .def_static("load", &load_corpus, py::arg("path"))
        .def_static("parse", [](const std::string& text) { return parse_corpus(text); }, py::arg("jsonl"))
        .def("serialize", &serialize_corpus)
        .def("save", &save_corpus, py::arg("path"))
        .def("__len__", &Corpus::size)
        .def("__eq__", &Corpus::operator==)
        .def("documents", [](const Corpus& c) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& d : c) {
                out.emplace_back(d.id, d.text);
            }
            return out;
        });

    py::class_<EntityInventory>(m, "EntityInventory")
        .def_static("extract",
                    [](const Corpus& c, const std::map<std::string, std::string>& gazetteer) {
                        return extract_builtin(c, to_gazetteer(gazetteer));
                    },
                    py::arg("corpus"), py::arg("gazetteer") = std::map<std::string, std::string>{})
        .def_static("load", &import_annotations, py::arg("corpus"), py::arg("path"))
        .def_static("parse",
                    [](const Corpus& c, const std::string& text) { return parse_annotations(c, text); },
                    py::arg("corpus"), py::arg("jsonl"))
        .def("serialize", [](const EntityInventory& inv, const Corpus& c) { return serialize_annotations(c, inv); },
             py::arg("corpus"))
        .def_property_readonly("entity_count", &EntityInventory::entity_count)
        .def_property_readonly("document_count", &EntityInventory::document_count)
        .def("frequency", [](const EntityInventory& inv, const PyEntity& e) { return inv.frequency(to_entity(e)); },
             py::arg("entity"))
        .def("entities", [](const EntityInventory& inv) {
            std::vector<PyEntity> out;
            for (const auto& [e, record] : inv.records()) {
                out.push_back(from_entity(e));
            }
            return out;
        });

    py::class_<EntityGraph>(m, "EntityGraph")
        .def_static("from_edges",
                    [](std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
                        std::vector<WeightedEdge> e;
                        for (const auto& [u, v, w] : edges) {
                            e.push_back({u, v, w});
                        }
                        return EntityGraph::from_edges(n, e);
                    },
                    py::arg("node_count"), py::arg("edges"))
        .def_property_readonly("node_count", &EntityGraph::node_count)
        .def_property_readonly("edge_count", &EntityGraph::edge_count)
        .def("nodes", [](const EntityGraph& g) {
            std::vector<PyEntity> out;
            for (const auto& n : g.nodes()) {
                out.push_back(from_entity(n));
            }
            return out;
        })
        .def("edges", [](const EntityGraph& g) {
            std::vector<std::tuple<std::size_t, std::size_t, double>> out;
            for (const auto& e : g.edges()) {
                out.emplace_back(e.u, e.v, e.weight);
            }
            return out;
        })
        .def("find", [](const EntityGraph& g, const PyEntity& e) { return g.find(to_entity(e)); })
        .def("degree", &EntityGraph::degree)
        .def("weight", &EntityGraph::weight)
        .def("edge_list", &serialize_edge_list);

    py::class_<SyntheticFixture>(m, "SyntheticFixture")
        .def_readonly("corpus", &SyntheticFixture::corpus)
        .def_readonly("inventory", &SyntheticFixture::inventory)
        .def_readonly("queries", &SyntheticFixture::queries)
        .def_property_readonly("gazetteer", [](const SyntheticFixture& f) { return from_gazetteer(f.gazetteer); })
        .def_property_readonly("chains", [](const SyntheticFixture& f) { return from_chains(f.chains); })
        .def_property_readonly("query_entities_jsonl",
                               [](const SyntheticFixture& f) { return serialize_query_entities(f.query_entities); });

    m.def("synth",
          [](std::size_t nodes, std::size_t attachment, std::size_t docs, std::uint64_t seed, std::size_t chains) {
              return synth_corpus({nodes, attachment, docs, seed, chains});
          },
          py::arg("nodes") = 500, py::arg("attachment") = 2, py::arg("docs") = 500, py::arg("seed") = 1,
          py::arg("chains") = 0);

    m.def("load_queries", &load_queries, py::arg("path"));
    m.def("parse_queries", [](const std::string& text) { return parse_queries(text); }, py::arg("jsonl"));

    py::class_<PoisonResult>(m, "PoisonResult")
        .def_readonly("poisoned", &PoisonResult::poisoned)
        .def_readonly("inventory", &PoisonResult::inventory)
        .def_readonly("poisoned_inventory", &PoisonResult::poisoned_inventory)
        .def_readonly("plan_json", &PoisonResult::plan_json)
        .def_readonly("rewrite_log_json", &PoisonResult::rewrite_log_json)
        .def_property_readonly("targets",
                               [](const PoisonResult& r) {
                                   std::vector<PyEntity> out;
                                   for (const auto& t : r.targets) {
                                       out.push_back(from_entity(t));
                                   }
                                   return out;
                               })
        .def_property_readonly("timings",
                               [](const PoisonResult& r) {
                                   std::vector<std::pair<std::string, double>> out;
                                   for (const auto& t : r.timings) {
                                       out.emplace_back(t.phase, t.seconds);
                                   }
                                   return out;
                               })
        .def("efficiency", [](const PoisonResult& r) { return to_python(to_json(efficiency_report(r.log, r.timings))); });

    m.def(
        "poison",
        [](const Corpus& corpus, std::optional<std::vector<Query>> queries, std::optional<EntityInventory> inventory,
           std::map<std::string, std::string> gazetteer, std::optional<std::string> query_entities_jsonl,
           double budget, const std::string& strategy, const std::string& rotation, unsigned threads) {
            PoisonInputs in;
            in.corpus = &corpus;
            in.queries = queries ? &*queries : nullptr;
            in.inventory = std::move(inventory);
            in.gazetteer = to_gazetteer(gazetteer);
            if (query_entities_jsonl) {
                in.query_entities = parse_query_entities(*query_entities_jsonl);
            }
            PoisonOptions options;
            options.budget_percent = budget;
            options.strategy = parse_label<Strategy>(strategy, parse_strategy, "strategy");
            options.rotation = parse_label<Rotation>(rotation, parse_rotation, "rotation");
            options.threads = threads;
            PoisonRun run;
            {
                py::gil_scoped_release release;
                run = run_poison(std::move(in), options);
            }
            return PoisonResult{std::move(run.rewrite.poisoned),
                                std::move(run.inventory),
                                std::move(run.rewrite.poisoned_inventory),
                                run.plan.targets(),
                                serialize_plan(run.plan),
                                serialize_rewrite_log(run.rewrite.log),
                                std::move(run.rewrite.log),
                                std::move(run.timings)};
        },
        py::arg("corpus"), py::arg("queries") = py::none(), py::arg("inventory") = py::none(),
        py::arg("gazetteer") = std::map<std::string, std::string>{}, py::arg("query_entities_jsonl") = py::none(),
        py::arg("budget") = 5.0, py::arg("strategy") = "full", py::arg("rotation") = "backward",
        py::arg("threads") = 1);

    m.def(
        "invert",
        [](const Corpus& poisoned, const std::string& rewrite_log_json) {
            return invert_rewrite(poisoned, parse_rewrite_log(rewrite_log_json));
        },
        py::arg("poisoned"), py::arg("rewrite_log_json"));

    m.def(
        "build_graph",
        [](const Corpus& c, const EntityInventory& inv, const std::string& window) {
            return build_graph(c, inv, parse_label<Window>(window, parse_window, "window"));
        },
        py::arg("corpus"), py::arg("inventory"), py::arg("window") = "document");

    m.def("metrics", [](const EntityGraph& g) { return metrics_dict(compute_metrics(g)); }, py::arg("graph"));
    m.def("giant_fraction", &giant_fraction, py::arg("graph"), py::arg("removed") = std::set<std::size_t>{});
    m.def("top_degree_nodes", &top_degree_nodes, py::arg("graph"), py::arg("percent"));

    m.def(
        "centrality",
        [](const EntityGraph& g, unsigned threads) {
            CentralityReport r;
            {
                py::gil_scoped_release release;
                r = compute_centrality(g, threads);
            }
            py::dict d;
            d["degree"] = r.degree;
            d["betweenness"] = r.betweenness;
            d["closeness"] = r.closeness;
            d["component_restricted"] = r.component_restricted;
            return d;
        },
        py::arg("graph"), py::arg("threads") = 1);

    m.def(
        "spectral",
        [](const EntityGraph& g, double tolerance, std::size_t max_iterations) {
            auto r = compute_spectral(g, {tolerance, max_iterations});
            py::dict d;
            d["lambda_max"] = r.lambda_max;
            d["eigenvector"] = r.eigenvector;
            d["iterations"] = r.iterations;
            d["residual"] = r.residual;
            return d;
        },
        py::arg("graph"), py::arg("tolerance") = 1e-10, py::arg("max_iterations") = 200000);

    m.def(
        "hub_attack_report",
        [](const EntityGraph& clean, const EntityGraph& poisoned, const std::vector<PyEntity>& targets) {
            std::set<TypedEntity> t;
            for (const auto& e : targets) {
                t.insert(to_entity(e));
            }
            auto r = hub_attack_report(clean, poisoned, t);
            py::dict d;
            d["giant_fraction_clean"] = r.giant_fraction_clean;
            d["giant_fraction_poisoned"] = r.giant_fraction_poisoned;
            d["kappa_clean"] = r.kappa_clean;
            d["kappa_poisoned"] = r.kappa_poisoned;
            d["lambda_clean"] = r.lambda_clean;
            d["lambda_poisoned"] = r.lambda_poisoned;
            d["path_length_clean"] = r.path_length_clean;
            d["path_length_poisoned"] = r.path_length_poisoned;
            d["target_edges_clean"] = r.target_edges_clean;
            d["target_edges_preserved"] = r.target_edges_preserved;
            d["edge_preservation"] = r.edge_preservation;
            return d;
        },
        py::arg("clean"), py::arg("poisoned"), py::arg("targets"));

    m.def("frequency_degree_correlation", &frequency_degree_correlation, py::arg("inventory"), py::arg("graph"));

    m.def("normalize_answer", &normalize_answer, py::arg("text"));
    m.def("attack_succeeded", &attack_succeeded, py::arg("prediction"), py::arg("gold"));

    m.def(
        "asr",
        [](const std::vector<std::pair<std::string, std::string>>& responses, const std::vector<Query>& queries,
           bool lenient) {
            std::vector<Response> r;
            for (const auto& [id, prediction] : responses) {
                r.push_back({id, prediction});
            }
            return to_python(to_json(asr(r, queries, lenient ? MissingPolicy::Lenient : MissingPolicy::Strict)));
        },
        py::arg("responses"), py::arg("queries"), py::arg("lenient") = false);

    m.def(
        "severance",
        [](const std::vector<std::pair<std::string, std::vector<PyEntity>>>& chains, const EntityGraph& clean,
           const EntityGraph& poisoned, std::size_t hop_slack) {
            return to_python(to_json(chain_severance(to_chains(chains), clean, poisoned, hop_slack)));
        },
        py::arg("chains"), py::arg("clean"), py::arg("poisoned"), py::arg("hop_slack") = 1);

    m.def(
        "stealth",
        [](const Corpus& clean, const Corpus& poisoned, std::size_t ngram_order, std::size_t holdout_stride) {
            StealthReport r;
            {
                py::gil_scoped_release release;
                r = stealth(clean, poisoned, {ngram_order, holdout_stride});
            }
            return to_python(to_json(r));
        },
        py::arg("clean"), py::arg("poisoned"), py::arg("ngram_order") = 4, py::arg("holdout_stride") = 2);
}
