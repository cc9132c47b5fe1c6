// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors
//
// Brute-force reference implementations used to check the graph library.
// They share no code with it beyond the EntityGraph container.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "typeswap/graph.hpp"
#include "typeswap/rng.hpp"

namespace oracle {

inline constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 4;

inline Eigen::MatrixXd dense(const typeswap::EntityGraph& g) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : g.edges()) {
        a(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)) = e.weight;
        a(static_cast<Eigen::Index>(e.v), static_cast<Eigen::Index>(e.u)) = e.weight;
    }
    return a;
}

inline double lambda_max(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    return solver.eigenvalues().maxCoeff();
}

inline double lambda_max(const typeswap::EntityGraph& g) { return lambda_max(dense(g)); }

/// All-pairs hop distances by Floyd-Warshall.
inline std::vector<std::vector<std::size_t>> hops(const typeswap::EntityGraph& g) {
    const auto n = g.node_count();
    std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, kInf));
    for (std::size_t i = 0; i < n; ++i) {
        d[i][i] = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && g.adjacent(i, j)) {
                d[i][j] = 1;
            }
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
            }
        }
    }
    return d;
}

/// Number of shortest paths between every pair, by dynamic programming over
/// the Floyd-Warshall distances.
inline std::vector<std::vector<double>> path_counts(const typeswap::EntityGraph& g,
                                                    const std::vector<std::vector<std::size_t>>& d) {
    const auto n = g.node_count();
    std::vector<std::vector<double>> sigma(n, std::vector<double>(n, 0.0));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[s][a] < d[s][b]; });
        sigma[s][s] = 1.0;
        for (auto v : order) {
            if (v == s || d[s][v] >= kInf) {
                continue;
            }
            for (std::size_t u = 0; u < n; ++u) {
                if (g.adjacent(u, v) && d[s][u] + 1 == d[s][v]) {
                    sigma[s][v] += sigma[s][u];
                }
            }
        }
    }
    return sigma;
}

/// C_B(v) = sum over unordered pairs {s,t} not containing v of
/// sigma_st(v) / sigma_st, with sigma_st(v) = sigma_sv * sigma_vt when v lies
/// on a shortest s-t path.
inline std::vector<double> betweenness(const typeswap::EntityGraph& g) {
    const auto n = g.node_count();
    auto d = hops(g);
    auto sigma = path_counts(g, d);
    std::vector<double> cb(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t t = s + 1; t < n; ++t) {
                if (s == v || t == v || d[s][t] >= kInf) {
                    continue;
                }
                if (d[s][v] + d[v][t] == d[s][t]) {
                    cb[v] += sigma[s][v] * sigma[v][t] / sigma[s][t];
                }
            }
        }
    }
    return cb;
}

inline std::vector<double> closeness(const typeswap::EntityGraph& g) {
    auto d = hops(g);
    std::vector<double> out(g.node_count(), 0.0);
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        std::size_t sum = 0;
        for (auto x : d[v]) {
            if (x < kInf) {
                sum += x;
            }
        }
        out[v] = sum == 0 ? 0.0 : 1.0 / static_cast<double>(sum);
    }
    return out;
}

inline double kappa(const typeswap::EntityGraph& g) {
    double k1 = 0.0;
    double k2 = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const double k = static_cast<double>(g.degree(i));
        k1 += k;
        k2 += k * k;
    }
    return k2 / k1;
}

/// Largest connected set among the kept nodes, via repeated flood fill over
/// the distance matrix, divided by all nodes.
inline double giant_fraction(const typeswap::EntityGraph& g, const std::set<std::size_t>& removed = {}) {
    const auto n = g.node_count();
    auto kept = g.without_nodes(removed);
    auto d = hops(kept);
    std::size_t best = 0;
    for (std::size_t v = 0; v < n; ++v) {
        if (removed.contains(v)) {
            continue;
        }
        std::size_t size = 0;
        for (std::size_t u = 0; u < n; ++u) {
            size += (!removed.contains(u) && d[v][u] < kInf) ? 1 : 0;
        }
        best = std::max(best, size);
    }
    return static_cast<double>(best) / static_cast<double>(n);
}

inline bool connected(const typeswap::EntityGraph& g) {
    auto d = hops(g);
    for (auto x : d[0]) {
        if (x >= kInf) {
            return false;
        }
    }
    return true;
}

/// Erdos-Renyi G(n, p) with unit weights.
inline typeswap::EntityGraph random_graph(std::size_t n, double p, typeswap::Rng& rng) {
    std::vector<typeswap::WeightedEdge> edges;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            if (rng.unit() < p) {
                edges.push_back({u, v, 1.0});
            }
        }
    }
    return typeswap::EntityGraph::from_edges(n, edges);
}

/// Connected G(n, p): rejection sampling.
inline typeswap::EntityGraph random_connected_graph(std::size_t n, double p, typeswap::Rng& rng) {
    for (;;) {
        auto g = random_graph(n, p, rng);
        if (n == 1 || connected(g)) {
            return g;
        }
    }
}

} // namespace oracle
