#pragma once
// Competition-based page labeling over the category graph.
//
// For every taxonomy label ("root") a multi-source BFS starts at all of the
// label's mapped categories at depth 0. Categories mapped by a competing label
// are never entered. A candidate page is dropped for a root when less than the
// coverage threshold of its parent categories are reachable from that root.
// Surviving pages get the path weight
//
//     w = sum over root->page paths i of 2^-len(i)
//
// and the weights of all competing roots are normalized per page; every
// label whose share is strictly above the assignment threshold is returned.
//
// Path counting: in `dag` mode only the depth-increasing BFS edges (the level
// DAG) are used, so every counted path has length depth(page) and
// w = paths / 2^depth, computed in the BFS pass itself. `exact` mode
// enumerates every simple path up to a depth cap; it is exponential and
// meant for small graphs and as a cross-check.

#include "wikicat/error.hpp"
#include "wikicat/graph.hpp"
#include "wikicat/json.hpp"
#include "wikicat/parallel.hpp"
#include "wikicat/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace wikicat {

enum class LabelingMode { Full, ChildOnly, AllDescendants, MinDist, NoPruning };
enum class PathMode { Dag, Exact };

inline constexpr LabelingMode kAllModes[] = {LabelingMode::Full, LabelingMode::ChildOnly,
                                             LabelingMode::AllDescendants, LabelingMode::MinDist,
                                             LabelingMode::NoPruning};

inline std::string_view to_string(LabelingMode m) {
    switch (m) {
        case LabelingMode::Full: return "full";
        case LabelingMode::ChildOnly: return "child_only";
        case LabelingMode::AllDescendants: return "all_descendants";
        case LabelingMode::MinDist: return "min_dist";
        case LabelingMode::NoPruning: return "no_pruning";
    }
    return "?";
}

inline LabelingMode labeling_mode_from_string(std::string_view s) {
    for (auto m : kAllModes)
        if (to_string(m) == s) return m;
    throw InputError("unknown labeling mode '" + std::string(s) + "'");
}

inline std::string_view to_string(PathMode m) { return m == PathMode::Dag ? "dag" : "exact"; }

inline PathMode path_mode_from_string(std::string_view s) {
    if (s == "dag") return PathMode::Dag;
    if (s == "exact") return PathMode::Exact;
    throw InputError("unknown path mode '" + std::string(s) + "'");
}

struct LabelingConfig {
    LabelingMode mode = LabelingMode::Full;
    double coverage_threshold = 0.3;
    double assignment_threshold = 0.3;
    std::optional<unsigned> max_depth;
    PathMode path_mode = PathMode::Dag;
    unsigned exact_path_cap = 8;

    bool blocks_competitors() const { return mode != LabelingMode::NoPruning; }
    bool prunes_by_coverage() const { return mode == LabelingMode::Full; }

    void validate() const {
        auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (!in_unit(coverage_threshold) || !in_unit(assignment_threshold))
            throw ConfigError("labeling thresholds must lie in [0, 1]");
        if (path_mode == PathMode::Exact && exact_path_cap == 0)
            throw ConfigError("exact path mode needs a positive exact_path_cap");
    }

    Json to_json() const {
        return {{"mode", to_string(mode)},
                {"coverage_threshold", coverage_threshold},
                {"assignment_threshold", assignment_threshold},
                {"max_depth", max_depth ? Json(*max_depth) : Json()},
                {"path_mode", to_string(path_mode)},
                {"exact_path_cap", exact_path_cap}};
    }

    // Missing keys keep their defaults.
    static LabelingConfig from_json(const Json& j) {
        LabelingConfig c;
        try {
            if (j.contains("mode")) c.mode = labeling_mode_from_string(j.at("mode").get<std::string>());
            c.coverage_threshold = j.value("coverage_threshold", c.coverage_threshold);
            c.assignment_threshold = j.value("assignment_threshold", c.assignment_threshold);
            if (j.contains("max_depth") && !j.at("max_depth").is_null())
                c.max_depth = j.at("max_depth").get<unsigned>();
            if (j.contains("path_mode"))
                c.path_mode = path_mode_from_string(j.at("path_mode").get<std::string>());
            c.exact_path_cap = j.value("exact_path_cap", c.exact_path_cap);
        } catch (const Json::exception& e) {
            throw InputError(std::string("malformed labeling config: ") + e.what());
        }
        c.validate();
        return c;
    }
};

struct RootSpec {
    std::string label;
    std::vector<NodeId> nodes;  // mapped root category nodes
};

// Labels that compete for the same pages, e.g. the children of one coarse label.
struct CompetitionSet {
    std::optional<std::string> parent;  // grouping label, none for the top level
    std::vector<RootSpec> roots;

    const RootSpec* find(std::string_view label) const {
        for (const auto& r : roots)
            if (r.label == label) return &r;
        return nullptr;
    }

    void validate(const CategoryGraph& graph) const {
        std::set<std::string> labels;
        std::map<NodeId, std::string> owner;
        for (const auto& r : roots) {
            if (!labels.insert(r.label).second)
                throw ConfigError("label '" + r.label + "' appears twice in a competition set");
            if (r.nodes.empty()) throw ConfigError("label '" + r.label + "' has no mapped categories");
            for (NodeId n : r.nodes) {
                if (!graph.valid(n) || !graph.is_category(n))
                    throw ConfigError("label '" + r.label + "' maps to non-category node " +
                                      std::to_string(n));
                auto [it, inserted] = owner.emplace(n, r.label);
                if (!inserted && it->second != r.label)
                    throw ConfigError("category '" + graph.name(n) + "' is mapped by both '" +
                                      it->second + "' and '" + r.label + "'");
            }
        }
    }

    // Mapped nodes of every root except `label`.
    std::vector<NodeId> competitor_nodes(std::string_view label) const {
        std::vector<NodeId> out;
        for (const auto& r : roots)
            if (r.label != label) out.insert(out.end(), r.nodes.begin(), r.nodes.end());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

struct ReachedNode {
    NodeId node = 0;
    std::uint32_t depth = 0;
    double paths = 0.0;  // number of level-DAG paths from depth 0
    bool operator==(const ReachedNode&) const = default;
};

struct ReachableSet {
    std::string label;
    std::vector<NodeId> sources;            // mapped nodes, depth 0
    std::vector<NodeId> blocked;            // competitor nodes never entered
    std::vector<ReachedNode> categories;    // ascending node id
    std::vector<ReachedNode> pages;         // ascending node id
    std::vector<std::pair<NodeId, NodeId>> level_edges;  // sorted; depth(v) == depth(u) + 1

    const ReachedNode* find_category(NodeId n) const { return find_in(categories, n); }
    const ReachedNode* find_page(NodeId n) const { return find_in(pages, n); }
    bool reaches_category(NodeId n) const { return find_category(n) != nullptr; }
    bool is_blocked(NodeId n) const { return std::binary_search(blocked.begin(), blocked.end(), n); }
    std::uint32_t max_depth() const {
        std::uint32_t d = 0;
        for (const auto& r : categories) d = std::max(d, r.depth);
        for (const auto& r : pages) d = std::max(d, r.depth);
        return d;
    }

private:
    static const ReachedNode* find_in(const std::vector<ReachedNode>& v, NodeId n) {
        auto it = std::lower_bound(v.begin(), v.end(), n,
                                   [](const ReachedNode& r, NodeId id) { return r.node < id; });
        return (it != v.end() && it->node == n) ? &*it : nullptr;
    }
};

// Multi-source BFS from the root's mapped nodes. With blocks_competitors()
// the mapped nodes of every other root in `competitors` are neither entered
// nor recorded. Pages hang one level below the category that reaches them.
inline ReachableSet traverse(const CategoryGraph& graph, const RootSpec& root,
                             const CompetitionSet& competitors, const LabelingConfig& cfg,
                             bool record_edges = true) {
    if (!competitors.find(root.label))
        throw UsageError("root '" + root.label + "' is not part of its competition set");
    competitors.validate(graph);

    ReachableSet out;
    out.label = root.label;
    out.sources = root.nodes;
    std::sort(out.sources.begin(), out.sources.end());
    out.sources.erase(std::unique(out.sources.begin(), out.sources.end()), out.sources.end());
    if (cfg.blocks_competitors()) out.blocked = competitors.competitor_nodes(root.label);

    constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> depth(graph.num_nodes(), kUnseen);
    std::vector<double> paths(graph.num_nodes(), 0.0);
    for (NodeId b : out.blocked) depth[b] = kUnseen - 1;  // sentinel: never enter

    std::vector<NodeId> frontier;
    std::vector<NodeId> reached_pages;
    for (NodeId s : out.sources) {
        depth[s] = 0;
        paths[s] = 1.0;
        frontier.push_back(s);
    }
    std::vector<NodeId> order(frontier);  // categories in BFS order
    std::vector<NodeId> next;
    for (std::uint32_t d = 0; !frontier.empty(); ++d) {
        if (cfg.max_depth && d >= *cfg.max_depth) break;
        next.clear();
        for (NodeId u : frontier) {
            for (NodeId v : graph.children(u)) {
                if (depth[v] == kUnseen) {
                    depth[v] = d + 1;
                    paths[v] = paths[u];
                    if (graph.is_category(v))
                        next.push_back(v);
                    else
                        reached_pages.push_back(v);
                } else if (depth[v] == d + 1) {
                    paths[v] += paths[u];
                } else {
                    continue;
                }
                if (record_edges) out.level_edges.emplace_back(u, v);
            }
        }
        order.insert(order.end(), next.begin(), next.end());
        std::swap(frontier, next);
    }

    std::sort(order.begin(), order.end());
    out.categories.reserve(order.size());
    for (NodeId n : order) out.categories.push_back({n, depth[n], paths[n]});
    std::sort(reached_pages.begin(), reached_pages.end());
    out.pages.reserve(reached_pages.size());
    for (NodeId n : reached_pages) out.pages.push_back({n, depth[n], paths[n]});
    std::sort(out.level_edges.begin(), out.level_edges.end());
    return out;
}

// Share of the page's parent categories that the root reaches. A page with
// no parents has coverage 0.
inline double parent_coverage(const CategoryGraph& graph, NodeId page, const ReachableSet& reach) {
    if (!reach.find_page(page))
        throw UsageError("page " + std::to_string(page) + " is not a candidate of '" + reach.label + "'");
    auto parents = graph.parents(page);
    if (parents.empty()) return 0.0;
    std::size_t hit = 0;
    for (NodeId p : parents)
        if (reach.reaches_category(p)) ++hit;
    return static_cast<double>(hit) / static_cast<double>(parents.size());
}

// Lengths of all simple paths from any source to `target` of length <= cap,
// never entering a blocked node. Sorted ascending.
inline std::vector<unsigned> enumerate_paths(const CategoryGraph& graph, const ReachableSet& reach,
                                             NodeId target, unsigned cap) {
    std::vector<unsigned> lengths;
    std::vector<char> on_path(graph.num_nodes(), 0);
    for (NodeId b : reach.blocked) on_path[b] = 1;
    struct Frame {
        NodeId node;
        std::size_t next_child;
    };
    std::vector<Frame> stack;
    for (NodeId s : reach.sources) {
        if (s == target) {
            lengths.push_back(0);
            continue;
        }
        stack.push_back({s, 0});
        on_path[s] = 1;
        while (!stack.empty()) {
            auto& top = stack.back();
            const unsigned len = static_cast<unsigned>(stack.size() - 1);
            auto kids = graph.is_category(top.node) ? graph.children(top.node) : std::span<const NodeId>{};
            if (len >= cap || top.next_child >= kids.size()) {
                on_path[top.node] = 0;
                stack.pop_back();
                continue;
            }
            NodeId v = kids[top.next_child++];
            if (on_path[v]) continue;
            if (v == target) {
                lengths.push_back(len + 1);
                continue;
            }
            if (graph.is_category(v)) {
                on_path[v] = 1;
                stack.push_back({v, 0});
            }
        }
    }
    std::sort(lengths.begin(), lengths.end());
    return lengths;
}

// Sum over paths of 2^-length.
inline double weight_from_lengths(const std::vector<unsigned>& lengths) {
    double w = 0.0;
    for (unsigned len : lengths) w += std::ldexp(1.0, -static_cast<int>(len));
    return w;
}

// Raw weight of a surviving candidate page. Throws for pages the root does
// not reach and, when coverage pruning is on, for pages that were pruned.
inline double page_weight(const CategoryGraph& graph, const ReachableSet& reach, NodeId page,
                          const LabelingConfig& cfg) {
    const auto* r = reach.find_page(page);
    if (!r) throw UsageError("page " + std::to_string(page) + " is not reached by '" + reach.label + "'");
    if (cfg.prunes_by_coverage() && parent_coverage(graph, page, reach) < cfg.coverage_threshold)
        throw UsageError("page " + std::to_string(page) + " was pruned for '" + reach.label + "'");
    if (cfg.path_mode == PathMode::Dag) return std::ldexp(r->paths, -static_cast<int>(r->depth));
    return weight_from_lengths(enumerate_paths(graph, reach, page, cfg.exact_path_cap));
}

struct WeightedCandidate {
    std::string label;
    double weight = 0.0;
    bool operator==(const WeightedCandidate&) const = default;
};

struct AssignmentResult {
    std::vector<WeightedCandidate> normalized;  // input order
    std::vector<WeightedCandidate> assigned;    // descending weight, then label
};

// Normalizes raw weights to sum 1 and keeps labels strictly above threshold.
inline AssignmentResult normalize_and_assign(const std::vector<WeightedCandidate>& candidates,
                                             double threshold = 0.3) {
    if (candidates.empty()) throw UsageError("normalize_and_assign needs at least one candidate");
    double total = 0.0;
    for (const auto& c : candidates) {
        if (!(c.weight > 0.0)) throw UsageError("raw weight of '" + c.label + "' is not positive");
        total += c.weight;
    }
    AssignmentResult out;
    for (const auto& c : candidates) {
        out.normalized.push_back({c.label, c.weight / total});
        if (c.weight / total > threshold) out.assigned.push_back(out.normalized.back());
    }
    std::sort(out.assigned.begin(), out.assigned.end(), [](const auto& a, const auto& b) {
        return a.weight != b.weight ? a.weight > b.weight : a.label < b.label;
    });
    return out;
}

struct PageAssignment {
    std::string label;
    double w_raw = 0.0;
    double w_norm = 0.0;
    std::uint32_t depth = 0;
    bool operator==(const PageAssignment&) const = default;
};

struct LabeledPage {
    NodeId node = 0;
    ExternalId page = 0;
    std::vector<PageAssignment> assignments;  // may be empty
    bool operator==(const LabeledPage&) const = default;
};

struct LabeledCorpus {
    LabelingConfig config;
    std::vector<LabeledPage> pages;  // ascending external page id

    // Pages carrying each label.
    std::map<std::string, std::size_t> label_counts() const {
        std::map<std::string, std::size_t> counts;
        for (const auto& p : pages)
            for (const auto& a : p.assignments) ++counts[a.label];
        return counts;
    }
};

enum class CompetitionScheme { Coarse, Fine };

inline std::string_view to_string(CompetitionScheme s) { return s == CompetitionScheme::Coarse ? "coarse" : "fine"; }

inline CompetitionScheme scheme_from_string(std::string_view s) {
    if (s == "coarse") return CompetitionScheme::Coarse;
    if (s == "fine") return CompetitionScheme::Fine;
    throw InputError("unknown competition scheme '" + std::string(s) + "'");
}

// Coarse: all top-level labels compete in one set. Fine: the children of each
// top-level label compete among themselves, one set per parent.
inline std::vector<CompetitionSet> competition_sets(const Taxonomy& taxonomy, const CategoryMapping& mapping,
                                                    CompetitionScheme scheme) {
    auto make_root = [&](const std::string& label) {
        const auto* m = mapping.find(label);
        if (!m) throw InputError("label '" + label + "' is not mapped to any category");
        return RootSpec{label, m->nodes()};
    };
    std::vector<CompetitionSet> sets;
    if (scheme == CompetitionScheme::Coarse) {
        CompetitionSet s;
        for (const auto& l : taxonomy.top_level()) s.roots.push_back(make_root(l));
        sets.push_back(std::move(s));
    } else {
        for (const auto& parent : taxonomy.top_level()) {
            auto kids = taxonomy.children_of(parent);
            if (kids.empty()) continue;
            CompetitionSet s;
            s.parent = parent;
            for (const auto& k : kids) s.roots.push_back(make_root(k));
            sets.push_back(std::move(s));
        }
    }
    return sets;
}

namespace detail {

struct Candidate {
    std::string label;
    double w_raw = 0.0;
    std::uint32_t depth = 0;
};

// Per-root candidates for one competition set, keyed by page node.
inline std::vector<std::pair<NodeId, Candidate>> root_candidates(const CategoryGraph& graph,
                                                                 const CompetitionSet& set,
                                                                 const RootSpec& root,
                                                                 const LabelingConfig& cfg) {
    std::vector<std::pair<NodeId, Candidate>> out;
    if (cfg.mode == LabelingMode::ChildOnly) {
        std::set<NodeId> pages;
        for (NodeId n : root.nodes)
            for (NodeId c : graph.children(n))
                if (graph.is_page(c)) pages.insert(c);
        for (NodeId p : pages) out.push_back({p, {root.label, 1.0, 1}});
        return out;
    }
    auto reach = traverse(graph, root, set, cfg, /*record_edges=*/false);
    for (const auto& r : reach.pages) {
        if (cfg.prunes_by_coverage() && parent_coverage(graph, r.node, reach) < cfg.coverage_threshold)
            continue;
        double w = 1.0;
        if (cfg.mode == LabelingMode::Full || cfg.mode == LabelingMode::NoPruning) {
            w = cfg.path_mode == PathMode::Dag
                    ? std::ldexp(r.paths, -static_cast<int>(r.depth))
                    : weight_from_lengths(enumerate_paths(graph, reach, r.node, cfg.exact_path_cap));
            if (!(w > 0.0)) continue;  // no path within the exact-mode cap
        }
        out.push_back({r.node, {root.label, w, r.depth}});
    }
    return out;
}

// Turns one page's candidates from one competition set into assignments.
inline std::vector<PageAssignment> decide(const std::vector<Candidate>& cands, const LabelingConfig& cfg) {
    std::vector<PageAssignment> out;
    switch (cfg.mode) {
        case LabelingMode::Full:
        case LabelingMode::NoPruning: {
            std::vector<WeightedCandidate> raw;
            for (const auto& c : cands) raw.push_back({c.label, c.w_raw});
            auto result = normalize_and_assign(raw, cfg.assignment_threshold);
            for (const auto& a : result.assigned) {
                const auto& c = *std::find_if(cands.begin(), cands.end(),
                                              [&](const Candidate& x) { return x.label == a.label; });
                out.push_back({a.label, c.w_raw, a.weight, c.depth});
            }
            return out;
        }
        case LabelingMode::MinDist: {
            std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
            for (const auto& c : cands) best = std::min(best, c.depth);
            for (const auto& c : cands)
                if (c.depth == best) out.push_back({c.label, 1.0, 0.0, c.depth});
            break;
        }
        case LabelingMode::ChildOnly:
        case LabelingMode::AllDescendants:
            for (const auto& c : cands) out.push_back({c.label, 1.0, 0.0, c.depth});
            break;
    }
    // Unweighted modes split the unit mass evenly over the assigned labels.
    for (auto& a : out) a.w_norm = 1.0 / static_cast<double>(out.size());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
    return out;
}

}  // namespace detail

// Labels pages for every competition set under the configured mode. Roots
// are traversed independently on up to `workers` threads; the merge is
// ordered, so the result does not depend on the worker count.
inline LabeledCorpus label_corpus(const CategoryGraph& graph, const std::vector<CompetitionSet>& sets,
                                  const LabelingConfig& cfg, unsigned workers = 1) {
    cfg.validate();
    for (const auto& s : sets) s.validate(graph);

    struct Job {
        std::size_t set;
        std::size_t root;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < sets.size(); ++s)
        for (std::size_t r = 0; r < sets[s].roots.size(); ++r) jobs.push_back({s, r});
    std::vector<std::vector<std::pair<NodeId, detail::Candidate>>> results(jobs.size());
    parallel_for(jobs.size(), workers, [&](std::size_t i) {
        const auto& set = sets[jobs[i].set];
        results[i] = detail::root_candidates(graph, set, set.roots[jobs[i].root], cfg);
    });

    // page -> (set index -> candidates in root order)
    std::map<NodeId, std::map<std::size_t, std::vector<detail::Candidate>>> by_page;
    for (std::size_t i = 0; i < jobs.size(); ++i)
        for (auto& [page, cand] : results[i]) by_page[page][jobs[i].set].push_back(std::move(cand));

    LabeledCorpus corpus;
    corpus.config = cfg;
    corpus.pages.reserve(by_page.size());
    for (auto& [page, per_set] : by_page) {
        LabeledPage lp;
        lp.node = page;
        lp.page = graph.external_id(page);
        for (auto& [_, cands] : per_set) {
            auto a = detail::decide(cands, cfg);
            lp.assignments.insert(lp.assignments.end(), a.begin(), a.end());
        }
        corpus.pages.push_back(std::move(lp));
    }
    std::sort(corpus.pages.begin(), corpus.pages.end(),
              [](const LabeledPage& a, const LabeledPage& b) { return a.page < b.page; });
    return corpus;
}

inline Json labeled_page_to_json(const LabeledPage& p, LabelingMode mode) {
    Json assignments = Json::array();
    for (const auto& a : p.assignments) {
        assignments.push_back(
            {{"label", a.label}, {"w_raw", a.w_raw}, {"w_norm", a.w_norm}, {"depth", a.depth}});
    }
    return {{"page", p.page}, {"assignments", std::move(assignments)}, {"mode", to_string(mode)}};
}

inline void write_labels_jsonl(const LabeledCorpus& corpus, std::ostream& out) {
    for (const auto& p : corpus.pages) out << labeled_page_to_json(p, corpus.config.mode).dump() << '\n';
}

// Reads labels.jsonl back; node ids are not restored (set to 0).
inline std::vector<LabeledPage> read_labels_jsonl(const std::string& path) {
    std::vector<LabeledPage> out;
    for_each_jsonl(path, [&](const Json& j, std::size_t) {
        LabeledPage p;
        p.page = j.at("page").get<ExternalId>();
        for (const auto& a : j.at("assignments")) {
            p.assignments.push_back({a.at("label").get<std::string>(), a.at("w_raw").get<double>(),
                                     a.at("w_norm").get<double>(), a.at("depth").get<std::uint32_t>()});
        }
        out.push_back(std::move(p));
    });
    return out;
}

}  // namespace wikicat
