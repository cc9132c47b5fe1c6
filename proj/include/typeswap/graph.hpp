// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors
//
// Entity co-occurrence graphs and the structural measures used to quantify
// what a poisoning run did to them.

#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "typeswap/corpus.hpp"
#include "typeswap/entities.hpp"

namespace typeswap {

enum class Window { Document, Sentence };

std::string_view to_string(Window w) noexcept;
std::optional<Window> parse_window(std::string_view label) noexcept;

struct WeightedEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 1.0;
};

struct Neighbor {
    std::size_t node = 0;
    double weight = 0.0;
};

/// Undirected, weighted, no self-loops. Node order is fixed at construction.
class EntityGraph {
public:
    EntityGraph() = default;

    /// Parallel edges are merged by summing weights. Self-loops and
    /// non-positive weights are rejected.
    static EntityGraph from_edges(std::vector<TypedEntity> nodes, std::span<const WeightedEdge> edges);
    /// Nodes named "n0", "n1", ... typed PERSON; convenient for analysis of raw topologies.
    static EntityGraph from_edges(std::size_t node_count, std::span<const WeightedEdge> edges);

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }

    const TypedEntity& node(std::size_t i) const { return nodes_.at(i); }
    const std::vector<TypedEntity>& nodes() const noexcept { return nodes_; }
    std::optional<std::size_t> find(const TypedEntity& entity) const;

    std::span<const Neighbor> neighbors(std::size_t i) const { return adjacency_.at(i); }
    std::size_t degree(std::size_t i) const { return adjacency_.at(i).size(); }
    /// A(i, j); zero when not adjacent.
    double weight(std::size_t i, std::size_t j) const;
    bool adjacent(std::size_t i, std::size_t j) const { return weight(i, j) > 0.0; }

    /// Each edge once with u < v, ascending.
    std::vector<WeightedEdge> edges() const;

    /// Same node set with every edge touching `removed` deleted.
    EntityGraph without_nodes(const std::set<std::size_t>& removed) const;

private:
    std::vector<TypedEntity> nodes_;
    std::unordered_map<TypedEntity, std::size_t, TypedEntityHash> index_;
    std::vector<std::vector<Neighbor>> adjacency_;  // sorted by node
    std::size_t edge_count_ = 0;
};

/// Co-occurrence graph: an edge's weight counts the windows in which both
/// entities have a mention. Every inventory entity becomes a node, ordered
/// by (surface, type).
EntityGraph build_graph(const Corpus& corpus, const EntityInventory& inventory,
                        Window window = Window::Document);

/// Sentence windows as [start, end) byte ranges; a sentence ends after
/// '.', '!' or '?' followed by whitespace or end of text.
std::vector<std::pair<std::size_t, std::size_t>> sentence_windows(std::string_view text);

std::string serialize_edge_list(const EntityGraph& graph);

struct GraphMetrics {
    std::vector<std::size_t> degree;
    double mean_degree = 0.0;            // <k>
    double second_moment = 0.0;          // <k^2>
    std::optional<double> kappa;         // <k^2>/<k>; absent without edges
    double giant_fraction = 0.0;         // largest component / all nodes
    std::size_t component_count = 0;
    std::vector<std::size_t> degree_histogram;  // index = degree
    std::optional<double> powerlaw_gamma;       // informational fit only
    double average_path_length = 0.0;    // over ordered pairs in the giant component
};

GraphMetrics compute_metrics(const EntityGraph& graph);

/// Connected-component label per node; labels are assigned in node order.
std::vector<std::size_t> connected_components(const EntityGraph& graph);

/// Largest component among non-removed nodes, as a fraction of all nodes.
double giant_fraction(const EntityGraph& graph, const std::set<std::size_t>& removed = {});

/// Log-log least-squares slope over degree histogram bins with k >= k_min
/// and non-zero counts, negated. nullopt with fewer than two usable bins.
std::optional<double> fit_powerlaw_gamma(const std::vector<std::size_t>& histogram,
                                         std::size_t k_min = 2);

struct CentralityReport {
    std::vector<double> degree;       // C_D
    std::vector<double> betweenness;  // C_B, unordered pairs
    std::vector<double> closeness;    // C_C = 1 / sum of hop distances within the component
    std::vector<bool> component_restricted;  // closeness computed on a proper component
};

/// Hop distances (edge weights ignored); Brandes accumulation.
CentralityReport compute_centrality(const EntityGraph& graph, unsigned threads = 1);

struct SpectralOptions {
    double tolerance = 1e-10;  // on ||A u - lambda u||
    std::size_t max_iterations = 200000;
};

struct SpectralReport {
    double lambda_max = 0.0;
    std::vector<double> eigenvector;  // unit norm, sum >= 0
    std::size_t iterations = 0;
    double residual = 0.0;
};

/// Power iteration on A + cI (c = mean weighted degree) from the uniform
/// vector; the shift keeps -lambda_max from competing on bipartite graphs.
/// Throws a convergence error carrying the last residual.
SpectralReport compute_spectral(const EntityGraph& graph, const SpectralOptions& options = {});

struct EdgeChange {
    std::size_t u = 0;
    std::size_t v = 0;
    double delta = 0.0;  // added to both A(u,v) and A(v,u)
};

struct PerturbationReport {
    std::vector<EdgeChange> delta;
    double first_order = 0.0;  // u^T dA u
    double exact = 0.0;        // lambda_max(A + dA) - lambda_max(A)
};

EntityGraph apply_perturbation(const EntityGraph& graph, std::span<const EdgeChange> delta);
PerturbationReport compute_perturbation(const EntityGraph& graph, std::span<const EdgeChange> delta,
                                        const SpectralOptions& options = {});

struct HubAttackReport {
    double giant_fraction_clean = 0.0;
    double giant_fraction_poisoned = 0.0;
    std::optional<double> kappa_clean;
    std::optional<double> kappa_poisoned;
    std::optional<double> lambda_clean;
    std::optional<double> lambda_poisoned;
    double path_length_clean = 0.0;
    double path_length_poisoned = 0.0;
    std::size_t target_edges_clean = 0;      // clean edges touching a target
    std::size_t target_edges_preserved = 0;  // of those, still present after poisoning
    double edge_preservation = 1.0;
};

/// Nodes are matched across the two graphs by (surface, type).
HubAttackReport hub_attack_report(const EntityGraph& clean, const EntityGraph& poisoned,
                                  const std::set<TypedEntity>& targets,
                                  const SpectralOptions& options = {});

/// Top ceil(n * percent / 100) nodes by degree (ties: lower index).
std::vector<std::size_t> top_degree_nodes(const EntityGraph& graph, double percent);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

/// rho between f(e, type) and co-occurrence degree over the graph's nodes.
double frequency_degree_correlation(const EntityInventory& inventory, const EntityGraph& graph);

/// Hop distance between two nodes, or nullopt when farther than `limit`.
std::optional<std::size_t> bounded_distance(const EntityGraph& graph, std::size_t from,
                                            std::size_t to, std::size_t limit);

} // namespace typeswap
