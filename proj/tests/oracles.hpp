#pragma once
// Independent reference implementations and random fixture generators for
// the traversal tests. Nothing here calls into the labeler.

#include "wikicat/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <vector>

namespace wikicat::testing {

// Plain edge-list description of a small graph: categories 0..cats-1,
// pages cats..cats+pages-1 (the same numbering the builder produces).
struct SmallGraph {
    int cats = 0;
    int pages = 0;
    std::vector<std::pair<int, int>> edges;  // parent category -> child
    std::vector<int> sources;                // categories of the root under test
    std::vector<int> competitors;            // categories of a competing root

    CategoryGraph build() const {
        GraphBuilder b;
        for (int c = 0; c < cats; ++c) b.add_category(c, "c" + std::to_string(c));
        for (int p = 0; p < pages; ++p) b.add_page(p, "p" + std::to_string(p));
        for (auto [u, v] : edges) {
            if (v < cats)
                b.add_edge(u, v, EdgeKind::Subcat);
            else
                b.add_edge(u, v - cats, EdgeKind::Member);
        }
        return std::move(b).build();
    }

    std::map<int, std::vector<int>> adjacency() const {
        std::map<int, std::vector<int>> adj;
        for (auto [u, v] : edges) adj[u].push_back(v);
        return adj;
    }
};

// Every simple path from any source to `target`, by plain recursion, never
// entering a blocked node; returns the multiset of lengths up to `cap`.
inline std::multiset<int> brute_force_path_lengths(const SmallGraph& g, int target, int cap,
                                                   const std::vector<int>& blocked) {
    auto adj = g.adjacency();
    std::multiset<int> out;
    std::vector<bool> used(static_cast<std::size_t>(g.cats + g.pages), false);
    for (int b : blocked) used[static_cast<std::size_t>(b)] = true;
    std::function<void(int, int)> walk = [&](int node, int len) {
        if (node == target) {
            out.insert(len);
            return;
        }
        if (len == cap) return;
        for (int next : adj[node]) {
            if (used[static_cast<std::size_t>(next)]) continue;
            used[static_cast<std::size_t>(next)] = true;
            walk(next, len + 1);
            used[static_cast<std::size_t>(next)] = false;
        }
    };
    for (int s : g.sources) {
        if (used[static_cast<std::size_t>(s)]) continue;
        used[static_cast<std::size_t>(s)] = true;
        walk(s, 0);
        used[static_cast<std::size_t>(s)] = false;
    }
    return out;
}

inline double weight_of(const std::multiset<int>& lengths) {
    double w = 0.0;
    for (int l : lengths) w += std::pow(2.0, -l);
    return w;
}

// Single-source BFS distances over the edge list (-1 when unreachable).
inline std::vector<int> bfs_distances(const SmallGraph& g, int source, const std::vector<int>& blocked) {
    auto adj = g.adjacency();
    std::vector<int> dist(static_cast<std::size_t>(g.cats + g.pages), -1);
    std::set<int> stop(blocked.begin(), blocked.end());
    std::queue<int> q;
    dist[static_cast<std::size_t>(source)] = 0;
    q.push(source);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        if (u >= g.cats) continue;
        for (int v : adj[u]) {
            if (stop.count(v) || dist[static_cast<std::size_t>(v)] >= 0) continue;
            dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
            q.push(v);
        }
    }
    return dist;
}

// Layered DAG in which every edge joins consecutive layers, so every path
// from layer 0 is a shortest path. At most `max_nodes` nodes.
inline SmallGraph random_level_dag(std::mt19937_64& rng, int max_nodes = 50) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    SmallGraph g;
    const int layers = pick(2, 7);
    std::vector<std::vector<int>> layer(static_cast<std::size_t>(layers));
    int budget_cats = max_nodes - 12;
    for (int l = 0; l < layers && budget_cats > 0; ++l) {
        const int width = std::min(budget_cats, l == 0 ? pick(1, 3) : pick(1, 5));
        for (int i = 0; i < width; ++i) layer[static_cast<std::size_t>(l)].push_back(g.cats++);
        budget_cats -= width;
    }
    g.sources = layer[0];
    for (std::size_t l = 1; l < layer.size(); ++l) {
        const auto& above = layer[l - 1];
        if (above.empty()) break;
        for (int c : layer[l]) {
            std::set<int> parents;
            const int k = pick(1, std::min<int>(3, static_cast<int>(above.size())));
            while (static_cast<int>(parents.size()) < k) parents.insert(above[static_cast<std::size_t>(pick(0, static_cast<int>(above.size()) - 1))]);
            for (int p : parents) g.edges.push_back({p, c});
        }
    }
    g.pages = pick(1, 12);
    for (int p = 0; p < g.pages; ++p) {
        std::size_t l = static_cast<std::size_t>(pick(0, layers - 1));
        while (layer[l].empty()) --l;
        const auto& from = layer[l];
        std::set<int> parents;
        const int k = pick(1, std::min<int>(3, static_cast<int>(from.size())));
        while (static_cast<int>(parents.size()) < k) parents.insert(from[static_cast<std::size_t>(pick(0, static_cast<int>(from.size()) - 1))]);
        for (int q : parents) g.edges.push_back({q, g.cats + p});
    }
    return g;
}

// Sparse random graph over categories with cycles, self-loop free.
inline SmallGraph random_cyclic_graph(std::mt19937_64& rng, int cats = 20, int pages = 10) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    SmallGraph g;
    g.cats = cats;
    g.pages = pages;
    std::set<std::pair<int, int>> seen;
    const int cat_edges = pick(cats, cats * 2);
    while (static_cast<int>(seen.size()) < cat_edges) {
        int u = pick(0, cats - 1), v = pick(0, cats - 1);
        if (u != v) seen.insert({u, v});
    }
    for (int p = 0; p < pages; ++p) {
        const int k = pick(1, 3);
        for (int i = 0; i < k; ++i) seen.insert({pick(0, cats - 1), cats + p});
    }
    g.edges.assign(seen.begin(), seen.end());
    g.sources = {0};
    if (pick(0, 1)) g.sources.push_back(1);
    return g;
}

}  // namespace wikicat::testing
