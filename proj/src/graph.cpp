// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#include "typeswap/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>

#include "typeswap/detail/parallel.hpp"
#include "typeswap/error.hpp"

namespace typeswap {

namespace {

constexpr std::size_t kUnreached = static_cast<std::size_t>(-1);

// Hop distances from `source`, skipping nodes flagged in `removed` (may be empty).
std::vector<std::size_t> bfs_distances(const EntityGraph& g, std::size_t source,
                                       const std::vector<char>& removed = {}) {
    std::vector<std::size_t> dist(g.node_count(), kUnreached);
    std::deque<std::size_t> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (const auto& nb : g.neighbors(v)) {
            if (dist[nb.node] == kUnreached && (removed.empty() || !removed[nb.node])) {
                dist[nb.node] = dist[v] + 1;
                queue.push_back(nb.node);
            }
        }
    }
    return dist;
}

std::vector<double> multiply(const EntityGraph& g, const std::vector<double>& x) {
    std::vector<double> y(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        double sum = 0.0;
        for (const auto& nb : g.neighbors(i)) {
            sum += nb.weight * x[nb.node];
        }
        y[i] = sum;
    }
    return y;
}

double norm2(const std::vector<double>& x) {
    return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
}

} // namespace

std::string_view to_string(Window w) noexcept {
    return w == Window::Document ? "document" : "sentence";
}

std::optional<Window> parse_window(std::string_view label) noexcept {
    if (label == "document") {
        return Window::Document;
    }
    if (label == "sentence") {
        return Window::Sentence;
    }
    return std::nullopt;
}

EntityGraph EntityGraph::from_edges(std::vector<TypedEntity> nodes, std::span<const WeightedEdge> edges) {
    EntityGraph g;
    g.nodes_ = std::move(nodes);
    for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
        if (!g.index_.emplace(g.nodes_[i], i).second) {
            fail(ErrorKind::Validation, "duplicate graph node " + describe(g.nodes_[i]));
        }
    }
    std::map<std::pair<std::size_t, std::size_t>, double> merged;
    for (const auto& e : edges) {
        if (e.u >= g.nodes_.size() || e.v >= g.nodes_.size()) {
            fail(ErrorKind::Validation, "edge endpoint out of range");
        }
        if (e.u == e.v) {
            fail(ErrorKind::Validation, "self-loop on node " + std::to_string(e.u));
        }
        if (!(e.weight > 0.0)) {
            fail(ErrorKind::Validation, "edge weight must be positive");
        }
        merged[{std::min(e.u, e.v), std::max(e.u, e.v)}] += e.weight;
    }
    g.adjacency_.assign(g.nodes_.size(), {});
    for (const auto& [key, w] : merged) {
        g.adjacency_[key.first].push_back(Neighbor{key.second, w});
        g.adjacency_[key.second].push_back(Neighbor{key.first, w});
    }
    for (auto& list : g.adjacency_) {
        std::sort(list.begin(), list.end(),
                  [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    }
    g.edge_count_ = merged.size();
    return g;
}

EntityGraph EntityGraph::from_edges(std::size_t node_count, std::span<const WeightedEdge> edges) {
    std::vector<TypedEntity> nodes;
    nodes.reserve(node_count);
    for (std::size_t i = 0; i < node_count; ++i) {
        nodes.push_back(TypedEntity{"n" + std::to_string(i), EntityType::Person});
    }
    return from_edges(std::move(nodes), edges);
}

std::optional<std::size_t> EntityGraph::find(const TypedEntity& entity) const {
    auto it = index_.find(entity);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

double EntityGraph::weight(std::size_t i, std::size_t j) const {
    const auto& list = adjacency_.at(i);
    auto it = std::lower_bound(list.begin(), list.end(), j,
                               [](const Neighbor& n, std::size_t key) { return n.node < key; });
    return it != list.end() && it->node == j ? it->weight : 0.0;
}

std::vector<WeightedEdge> EntityGraph::edges() const {
    std::vector<WeightedEdge> out;
    out.reserve(edge_count_);
    for (std::size_t i = 0; i < adjacency_.size(); ++i) {
        for (const auto& nb : adjacency_[i]) {
            if (i < nb.node) {
                out.push_back(WeightedEdge{i, nb.node, nb.weight});
            }
        }
    }
    return out;
}

EntityGraph EntityGraph::without_nodes(const std::set<std::size_t>& removed) const {
    std::vector<WeightedEdge> kept;
    for (const auto& e : edges()) {
        if (!removed.contains(e.u) && !removed.contains(e.v)) {
            kept.push_back(e);
        }
    }
    return from_edges(nodes_, kept);
}

std::vector<std::pair<std::size_t, std::size_t>> sentence_windows(std::string_view text) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if ((c == '.' || c == '!' || c == '?') &&
            (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])))) {
            out.emplace_back(start, i + 1);
            start = i + 1;
        }
    }
    if (start < text.size()) {
        out.emplace_back(start, text.size());
    }
    return out;
}

EntityGraph build_graph(const Corpus& corpus, const EntityInventory& inventory, Window window) {
    std::vector<TypedEntity> nodes;
    nodes.reserve(inventory.entity_count());
    for (const auto& [entity, record] : inventory.records()) {
        nodes.push_back(entity);
    }
    std::unordered_map<TypedEntity, std::size_t, TypedEntityHash> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        index.emplace(nodes[i], i);
    }

    std::map<std::pair<std::size_t, std::size_t>, double> counts;
    auto add_window = [&](std::vector<std::size_t>& members) {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                counts[{members[a], members[b]}] += 1.0;
            }
        }
    };

    for (std::size_t d = 0; d < corpus.size() && d < inventory.document_count(); ++d) {
        auto mentions = inventory.document_mentions(d);
        if (window == Window::Document) {
            std::vector<std::size_t> members;
            for (const auto& m : mentions) {
                members.push_back(index.at(m.entity));
            }
            add_window(members);
            continue;
        }
        auto windows = sentence_windows(corpus[d].text);
        std::vector<std::vector<std::size_t>> grouped(windows.size());
        for (const auto& m : mentions) {
            auto it = std::upper_bound(windows.begin(), windows.end(), m.start,
                                       [](std::size_t pos, const auto& w) { return pos < w.second; });
            if (it != windows.end()) {
                grouped[static_cast<std::size_t>(it - windows.begin())].push_back(index.at(m.entity));
            }
        }
        for (auto& members : grouped) {
            add_window(members);
        }
    }

    std::vector<WeightedEdge> edges;
    edges.reserve(counts.size());
    for (const auto& [key, w] : counts) {
        edges.push_back(WeightedEdge{key.first, key.second, w});
    }
    return EntityGraph::from_edges(std::move(nodes), edges);
}

std::string serialize_edge_list(const EntityGraph& graph) {
    std::ostringstream out;
    out << "u_surface\tu_type\tv_surface\tv_type\tweight\n";
    for (const auto& e : graph.edges()) {
        const auto& u = graph.node(e.u);
        const auto& v = graph.node(e.v);
        out << u.surface << '\t' << to_string(u.type) << '\t' << v.surface << '\t'
            << to_string(v.type) << '\t' << e.weight << '\n';
    }
    return out.str();
}

std::vector<std::size_t> connected_components(const EntityGraph& graph) {
    std::vector<std::size_t> label(graph.node_count(), kUnreached);
    std::size_t next = 0;
    for (std::size_t s = 0; s < graph.node_count(); ++s) {
        if (label[s] != kUnreached) {
            continue;
        }
        std::deque<std::size_t> queue{s};
        label[s] = next;
        while (!queue.empty()) {
            auto v = queue.front();
            queue.pop_front();
            for (const auto& nb : graph.neighbors(v)) {
                if (label[nb.node] == kUnreached) {
                    label[nb.node] = next;
                    queue.push_back(nb.node);
                }
            }
        }
        ++next;
    }
    return label;
}

double giant_fraction(const EntityGraph& graph, const std::set<std::size_t>& removed) {
    const auto n = graph.node_count();
    if (n == 0) {
        return 0.0;
    }
    std::vector<char> gone(n, 0);
    for (auto r : removed) {
        if (r < n) {
            gone[r] = 1;
        }
    }
    std::vector<char> seen(n, 0);
    std::size_t best = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (gone[s] || seen[s]) {
            continue;
        }
        auto dist = bfs_distances(graph, s, gone);
        std::size_t size = 0;
        for (std::size_t v = 0; v < n; ++v) {
            if (dist[v] != kUnreached) {
                seen[v] = 1;
                ++size;
            }
        }
        best = std::max(best, size);
    }
    return static_cast<double>(best) / static_cast<double>(n);
}

std::optional<double> fit_powerlaw_gamma(const std::vector<std::size_t>& histogram, std::size_t k_min) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t k = std::max<std::size_t>(k_min, 1); k < histogram.size(); ++k) {
        if (histogram[k] > 0) {
            xs.push_back(std::log(static_cast<double>(k)));
            ys.push_back(std::log(static_cast<double>(histogram[k])));
        }
    }
    if (xs.size() < 2) {
        return std::nullopt;
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) {
        return std::nullopt;
    }
    return -sxy / sxx;
}

GraphMetrics compute_metrics(const EntityGraph& graph) {
    const auto n = graph.node_count();
    if (n == 0) {
        fail(ErrorKind::Validation, "graph metrics need at least one node");
    }
    GraphMetrics m;
    m.degree.resize(n);
    std::size_t k_max = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = graph.degree(i);
        m.degree[i] = k;
        k_max = std::max(k_max, k);
        sum += static_cast<double>(k);
        sum_sq += static_cast<double>(k) * static_cast<double>(k);
    }
    m.mean_degree = sum / static_cast<double>(n);
    m.second_moment = sum_sq / static_cast<double>(n);
    if (sum > 0.0) {
        m.kappa = sum_sq / sum;
    }
    m.degree_histogram.assign(k_max + 1, 0);
    for (auto k : m.degree) {
        ++m.degree_histogram[k];
    }
    m.powerlaw_gamma = fit_powerlaw_gamma(m.degree_histogram);

    const auto labels = connected_components(graph);
    m.component_count = n == 0 ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::size_t> sizes(m.component_count, 0);
    for (auto l : labels) {
        ++sizes[l];
    }
    const auto giant = static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    m.giant_fraction = static_cast<double>(sizes[giant]) / static_cast<double>(n);

    if (sizes[giant] > 1) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] == giant) {
                members.push_back(i);
            }
        }
        std::vector<double> per_source(members.size(), 0.0);
        for (std::size_t idx = 0; idx < members.size(); ++idx) {
            auto dist = bfs_distances(graph, members[idx]);
            double total = 0.0;
            for (auto v : members) {
                total += static_cast<double>(dist[v]);
            }
            per_source[idx] = total;
        }
        const double pairs = static_cast<double>(members.size()) * static_cast<double>(members.size() - 1);
        m.average_path_length = std::accumulate(per_source.begin(), per_source.end(), 0.0) / pairs;
    }
    return m;
}

CentralityReport compute_centrality(const EntityGraph& graph, unsigned threads) {
    const auto n = graph.node_count();
    CentralityReport report;
    report.degree.resize(n);
    report.closeness.assign(n, 0.0);
    report.component_restricted.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        report.degree[i] = static_cast<double>(graph.degree(i));
    }

    // Sources are processed in fixed blocks and block partials summed in
    // order, so the result does not depend on the thread count.
    constexpr std::size_t kBlock = 64;
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<std::vector<double>> partial(blocks);

    detail::parallel_for(blocks, threads, [&](std::size_t b) {
        std::vector<double> acc(n, 0.0);
        std::vector<std::size_t> dist(n);
        std::vector<double> sigma(n);
        std::vector<double> delta(n);
        std::vector<std::vector<std::size_t>> preds(n);
        std::vector<std::size_t> order;
        order.reserve(n);
        for (std::size_t s = b * kBlock; s < std::min(n, (b + 1) * kBlock); ++s) {
            std::fill(dist.begin(), dist.end(), kUnreached);
            std::fill(sigma.begin(), sigma.end(), 0.0);
            std::fill(delta.begin(), delta.end(), 0.0);
            for (auto& p : preds) {
                p.clear();
            }
            order.clear();
            dist[s] = 0;
            sigma[s] = 1.0;
            std::deque<std::size_t> queue{s};
            while (!queue.empty()) {
                auto v = queue.front();
                queue.pop_front();
                order.push_back(v);
                for (const auto& nb : graph.neighbors(v)) {
                    auto w = nb.node;
                    if (dist[w] == kUnreached) {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                    if (dist[w] == dist[v] + 1) {
                        sigma[w] += sigma[v];
                        preds[w].push_back(v);
                    }
                }
            }
            double distance_sum = 0.0;
            for (auto v : order) {
                distance_sum += static_cast<double>(dist[v]);
            }
            report.closeness[s] = distance_sum > 0.0 ? 1.0 / distance_sum : 0.0;
            report.component_restricted[s] = order.size() < n;
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                auto w = *it;
                for (auto v : preds[w]) {
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
                if (w != s) {
                    acc[w] += delta[w];
                }
            }
        }
        partial[b] = std::move(acc);
    });

    report.betweenness.assign(n, 0.0);
    for (const auto& acc : partial) {
        for (std::size_t i = 0; i < n; ++i) {
            report.betweenness[i] += acc[i];
        }
    }
    for (auto& c : report.betweenness) {
        c /= 2.0;
    }
    return report;
}

SpectralReport compute_spectral(const EntityGraph& graph, const SpectralOptions& options) {
    const auto n = graph.node_count();
    if (graph.edge_count() == 0) {
        fail(ErrorKind::Validation, "spectral analysis needs at least one edge");
    }
    double total_weight = 0.0;
    for (const auto& e : graph.edges()) {
        total_weight += 2.0 * e.weight;
    }
    const double shift = total_weight / static_cast<double>(n);

    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double residual = 0.0;
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        auto y = multiply(graph, x);
        const double lambda = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = y[i] - lambda * x[i];
            r2 += d * d;
        }
        residual = std::sqrt(r2);
        if (residual <= options.tolerance) {
            if (std::accumulate(x.begin(), x.end(), 0.0) < 0.0) {
                for (auto& v : x) {
                    v = -v;
                }
            }
            return SpectralReport{lambda, std::move(x), it, residual};
        }
        for (std::size_t i = 0; i < n; ++i) {
            y[i] += shift * x[i];
        }
        const double scale = norm2(y);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = y[i] / scale;
        }
    }
    std::ostringstream msg;
    msg << "power iteration did not converge in " << options.max_iterations
        << " iterations (last residual " << residual << ", tolerance " << options.tolerance << ")";
    fail(ErrorKind::Convergence, msg.str());
}

EntityGraph apply_perturbation(const EntityGraph& graph, std::span<const EdgeChange> delta) {
    std::map<std::pair<std::size_t, std::size_t>, double> weights;
    for (const auto& e : graph.edges()) {
        weights[{e.u, e.v}] = e.weight;
    }
    for (const auto& change : delta) {
        if (change.u == change.v) {
            fail(ErrorKind::Validation, "perturbation touches the diagonal at node " + std::to_string(change.u));
        }
        if (change.u >= graph.node_count() || change.v >= graph.node_count()) {
            fail(ErrorKind::Validation, "perturbation endpoint out of range");
        }
        weights[{std::min(change.u, change.v), std::max(change.u, change.v)}] += change.delta;
    }
    std::vector<WeightedEdge> edges;
    for (const auto& [key, w] : weights) {
        if (w < -1e-12) {
            fail(ErrorKind::Validation, "perturbation drives edge (" + std::to_string(key.first) + ", " +
                                            std::to_string(key.second) + ") negative");
        }
        if (w > 1e-12) {
            edges.push_back(WeightedEdge{key.first, key.second, w});
        }
    }
    return EntityGraph::from_edges(graph.nodes(), edges);
}

PerturbationReport compute_perturbation(const EntityGraph& graph, std::span<const EdgeChange> delta,
                                        const SpectralOptions& options) {
    auto perturbed = apply_perturbation(graph, delta);
    const auto before = compute_spectral(graph, options);
    PerturbationReport report;
    report.delta.assign(delta.begin(), delta.end());
    for (const auto& change : delta) {
        report.first_order += 2.0 * before.eigenvector[change.u] * before.eigenvector[change.v] * change.delta;
    }
    bool null_change = std::all_of(delta.begin(), delta.end(), [](const EdgeChange& c) { return c.delta == 0.0; });
    if (null_change) {
        report.exact = 0.0;
        return report;
    }
    const auto after = compute_spectral(perturbed, options);
    report.exact = after.lambda_max - before.lambda_max;
    return report;
}

HubAttackReport hub_attack_report(const EntityGraph& clean, const EntityGraph& poisoned,
                                  const std::set<TypedEntity>& targets, const SpectralOptions& options) {
    HubAttackReport r;
    auto mc = compute_metrics(clean);
    auto mp = compute_metrics(poisoned);
    r.giant_fraction_clean = mc.giant_fraction;
    r.giant_fraction_poisoned = mp.giant_fraction;
    r.kappa_clean = mc.kappa;
    r.kappa_poisoned = mp.kappa;
    r.path_length_clean = mc.average_path_length;
    r.path_length_poisoned = mp.average_path_length;
    if (clean.edge_count() > 0) {
        r.lambda_clean = compute_spectral(clean, options).lambda_max;
    }
    if (poisoned.edge_count() > 0) {
        r.lambda_poisoned = compute_spectral(poisoned, options).lambda_max;
    }
    for (const auto& e : clean.edges()) {
        const auto& a = clean.node(e.u);
        const auto& b = clean.node(e.v);
        if (!targets.contains(a) && !targets.contains(b)) {
            continue;
        }
        ++r.target_edges_clean;
        auto pa = poisoned.find(a);
        auto pb = poisoned.find(b);
        if (pa && pb && poisoned.adjacent(*pa, *pb)) {
            ++r.target_edges_preserved;
        }
    }
    r.edge_preservation = r.target_edges_clean == 0
                              ? 1.0
                              : static_cast<double>(r.target_edges_preserved) /
                                    static_cast<double>(r.target_edges_clean);
    return r;
}

std::vector<std::size_t> top_degree_nodes(const EntityGraph& graph, double percent) {
    const auto n = graph.node_count();
    auto count = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * percent / 100.0 - 1e-9));
    count = std::min(count, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return graph.degree(a) > graph.degree(b); });
    order.resize(count);
    return order;
}

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = rank;
        }
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        fail(ErrorKind::Validation, "spearman inputs differ in length");
    }
    if (x.size() < 2) {
        return 0.0;
    }
    auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

double frequency_degree_correlation(const EntityInventory& inventory, const EntityGraph& graph) {
    std::vector<double> f;
    std::vector<double> k;
    for (std::size_t i = 0; i < graph.node_count(); ++i) {
        f.push_back(static_cast<double>(inventory.frequency(graph.node(i))));
        k.push_back(static_cast<double>(graph.degree(i)));
    }
    return spearman(f, k);
}

std::optional<std::size_t> bounded_distance(const EntityGraph& graph, std::size_t from, std::size_t to,
                                            std::size_t limit) {
    if (from == to) {
        return 0;
    }
    std::vector<std::size_t> dist(graph.node_count(), kUnreached);
    std::deque<std::size_t> queue{from};
    dist[from] = 0;
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        if (dist[v] >= limit) {
            continue;
        }
        for (const auto& nb : graph.neighbors(v)) {
            if (dist[nb.node] == kUnreached) {
                dist[nb.node] = dist[v] + 1;
                if (nb.node == to) {
                    return dist[nb.node];
                }
                queue.push_back(nb.node);
            }
        }
    }
    return std::nullopt;
}

} // namespace typeswap
