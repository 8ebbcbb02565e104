#pragma once
// Taxonomy loading and taxonomy-to-category mapping.
//
// Each taxonomy label is queried against an inverted token index over
// normalized category names and redirect aliases. A query is the full label
// name plus, for conjunction names, every conjunct. Exact normalized matches
// win outright; otherwise the best Jaro-Winkler candidate is accepted when it
// clears the threshold and reported as a near miss when it does not.

#include "wikicat/error.hpp"
#include "wikicat/graph.hpp"
#include "wikicat/textproc.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wikicat/json.hpp"

namespace wikicat {

struct TaxonomyLabel {
    std::string id;
    std::string name;
    std::optional<std::string> parent;
    bool operator==(const TaxonomyLabel&) const = default;
};

class Taxonomy {
public:
    Taxonomy() = default;

    // Validates: ids and display names unique, parents exist, no cycles.
    explicit Taxonomy(std::vector<TaxonomyLabel> labels) : labels_(std::move(labels)) {
        std::unordered_set<std::string> names;
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i].id.empty()) throw InputError("taxonomy label with empty id");
            if (!by_id_.emplace(labels_[i].id, i).second)
                throw InputError("duplicate taxonomy label id '" + labels_[i].id + "'");
            if (!names.insert(labels_[i].name).second)
                throw InputError("duplicate taxonomy label name '" + labels_[i].name + "'");
        }
        for (const auto& l : labels_) {
            if (l.parent && !by_id_.count(*l.parent))
                throw InputError("label '" + l.id + "' has unknown parent '" + *l.parent + "'");
        }
        for (const auto& l : labels_) {
            std::size_t steps = 0;
            for (auto p = l.parent; p; p = labels_[by_id_.at(*p)].parent) {
                if (*p == l.id || ++steps > labels_.size())
                    throw InputError("taxonomy label '" + l.id + "' is its own ancestor");
            }
        }
    }

    const std::vector<TaxonomyLabel>& labels() const { return labels_; }
    std::size_t size() const { return labels_.size(); }

    const TaxonomyLabel* find(std::string_view id) const {
        auto it = by_id_.find(std::string(id));
        return it == by_id_.end() ? nullptr : &labels_[it->second];
    }
    const TaxonomyLabel& at(std::string_view id) const {
        if (auto* l = find(id)) return *l;
        throw InputError("unknown taxonomy label '" + std::string(id) + "'");
    }
    const TaxonomyLabel* find_by_name(std::string_view name) const {
        for (const auto& l : labels_)
            if (l.name == name) return &l;
        return nullptr;
    }

    // Labels without a parent, in file order.
    std::vector<std::string> top_level() const {
        std::vector<std::string> out;
        for (const auto& l : labels_)
            if (!l.parent) out.push_back(l.id);
        return out;
    }
    std::vector<std::string> children_of(std::string_view id) const {
        std::vector<std::string> out;
        for (const auto& l : labels_)
            if (l.parent && *l.parent == id) out.push_back(l.id);
        return out;
    }

    static Taxonomy from_json(const Json& j) {
        std::vector<TaxonomyLabel> labels;
        try {
            for (const auto& row : j.at("labels")) {
                TaxonomyLabel l;
                l.id = row.at("id").get<std::string>();
                l.name = row.at("name").get<std::string>();
                if (row.contains("parent") && !row.at("parent").is_null())
                    l.parent = row.at("parent").get<std::string>();
                labels.push_back(std::move(l));
            }
        } catch (const Json::exception& e) {
            throw InputError(std::string("malformed taxonomy: ") + e.what());
        }
        return Taxonomy(std::move(labels));
    }

    Json to_json() const {
        Json rows = Json::array();
        for (const auto& l : labels_) {
            rows.push_back({{"id", l.id},
                            {"name", l.name},
                            {"parent", l.parent ? Json(*l.parent) : Json()}});
        }
        return {{"labels", std::move(rows)}};
    }

private:
    std::vector<TaxonomyLabel> labels_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

// Lowercase, punctuation to spaces, per-token plural stripping, single spaces.
inline std::string normalize_name(std::string_view name) {
    std::string out;
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        if (!out.empty()) out.push_back(' ');
        out += strip_plural(std::move(token));
        token.clear();
    };
    for (char c : name) {
        if (detail::is_word_byte(static_cast<unsigned char>(c)))
            token.push_back(detail::ascii_lower(c));
        else
            flush();
    }
    flush();
    return out;
}

// Jaro-Winkler similarity: match window floor(max(|a|,|b|)/2) - 1, half the
// out-of-order matches as transpositions, prefix boost 0.1 per shared leading
// byte up to four. Operands are put in canonical order first so the score is
// symmetric even where greedy matching is not.
inline double jaro_winkler(std::string_view a, std::string_view b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    if (b < a) std::swap(a, b);
    if (a == b) return 1.0;

    const std::size_t la = a.size(), lb = b.size();
    const std::size_t window = std::max(la, lb) / 2 == 0 ? 0 : std::max(la, lb) / 2 - 1;
    std::vector<char> a_matched(la, 0), b_matched(lb, 0);
    std::size_t matches = 0;
    for (std::size_t i = 0; i < la; ++i) {
        const std::size_t lo = i > window ? i - window : 0;
        const std::size_t hi = std::min(i + window + 1, lb);
        for (std::size_t j = lo; j < hi; ++j) {
            if (!b_matched[j] && a[i] == b[j]) {
                a_matched[i] = b_matched[j] = 1;
                ++matches;
                break;
            }
        }
    }
    if (matches == 0) return 0.0;

    std::size_t half_transpositions = 0;
    for (std::size_t i = 0, j = 0; i < la; ++i) {
        if (!a_matched[i]) continue;
        while (!b_matched[j]) ++j;
        if (a[i] != b[j]) ++half_transpositions;
        ++j;
    }
    const double m = static_cast<double>(matches);
    const double t = static_cast<double>(half_transpositions) / 2.0;
    const double jaro = (m / static_cast<double>(la) + m / static_cast<double>(lb) + (m - t) / m) / 3.0;

    std::size_t prefix = 0;
    while (prefix < 4 && prefix < la && prefix < lb && a[prefix] == b[prefix]) ++prefix;
    return jaro + static_cast<double>(prefix) * 0.1 * (1.0 - jaro);
}

// The full name always comes first; conjuncts split on '&', '/', ',' and the
// standalone word "and" follow when there is more than one.
inline std::vector<std::string> split_conjunctions(std::string_view name) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    std::vector<std::string> parts;
    auto push_segment = [&](std::string_view seg) {
        // Split a delimiter-free segment on whitespace-bounded "and".
        std::string current;
        std::size_t i = 0;
        while (i < seg.size()) {
            std::size_t j = i;
            while (j < seg.size() && !std::isspace(static_cast<unsigned char>(seg[j]))) ++j;
            std::string_view word = seg.substr(i, j - i);
            std::string lower(word);
            for (auto& c : lower) c = detail::ascii_lower(c);
            if (lower == "and") {
                if (auto t = trim(current); !t.empty()) parts.emplace_back(t);
                current.clear();
            } else {
                current.append(seg.substr(i, j - i));
            }
            while (j < seg.size() && std::isspace(static_cast<unsigned char>(seg[j]))) {
                current.push_back(seg[j]);
                ++j;
            }
            i = j;
        }
        if (auto t = trim(current); !t.empty()) parts.emplace_back(t);
    };
    std::size_t start = 0;
    for (std::size_t i = 0; i <= name.size(); ++i) {
        if (i == name.size() || name[i] == '&' || name[i] == '/' || name[i] == ',') {
            push_segment(name.substr(start, i - start));
            start = i + 1;
        }
    }
    std::vector<std::string> out{std::string(name)};
    if (parts.size() <= 1) return out;
    for (auto& p : parts) {
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
    }
    return out;
}

enum class MatchKind { Exact, Fuzzy, Override };

inline std::string_view to_string(MatchKind k) {
    switch (k) {
        case MatchKind::Exact: return "exact";
        case MatchKind::Fuzzy: return "fuzzy";
        case MatchKind::Override: return "override";
    }
    return "?";
}

inline MatchKind match_kind_from_string(std::string_view s) {
    if (s == "exact") return MatchKind::Exact;
    if (s == "fuzzy") return MatchKind::Fuzzy;
    if (s == "override") return MatchKind::Override;
    throw InputError("unknown match kind '" + std::string(s) + "'");
}

struct CategoryMatch {
    NodeId node = 0;
    MatchKind kind = MatchKind::Exact;
    double score = 1.0;
    std::string query;  // the query part that produced the match
    bool operator==(const CategoryMatch&) const = default;
};

struct LabelMapping {
    std::string label;
    std::vector<CategoryMatch> matches;  // ascending node id, one per node
    MatchKind kind = MatchKind::Exact;   // override > fuzzy > exact
    double score = 1.0;                  // lowest accepted score

    std::vector<NodeId> nodes() const {
        std::vector<NodeId> out;
        for (const auto& m : matches) out.push_back(m.node);
        return out;
    }
    bool operator==(const LabelMapping&) const = default;
};

// A query part whose best candidate fell below the threshold.
struct NearMiss {
    std::string label;
    std::string query;
    NodeId candidate = 0;
    double score = 0.0;
    bool operator==(const NearMiss&) const = default;
};

struct CategoryMapping {
    double threshold = 0.9;
    std::vector<LabelMapping> mapped;   // taxonomy order
    std::vector<std::string> unmapped;  // taxonomy order
    std::vector<NearMiss> near_misses;

    const LabelMapping* find(std::string_view label) const {
        for (const auto& m : mapped)
            if (m.label == label) return &m;
        return nullptr;
    }
    bool operator==(const CategoryMapping&) const = default;
};

using Overrides = std::map<std::string, std::vector<NodeId>>;

// Inverted token index over normalized category names and redirect aliases.
class CategoryIndex {
public:
    explicit CategoryIndex(const CategoryGraph& graph) {
        std::set<std::pair<std::string, NodeId>> seen;
        auto add = [&](const std::string& raw, NodeId node) {
            auto norm = normalize_name(raw);
            if (norm.empty() || !seen.emplace(norm, node).second) return;
            const auto entry = static_cast<std::uint32_t>(entries_.size());
            entries_.push_back({norm, node, graph.external_id(node)});
            exact_[norm].push_back(node);
            std::string_view rest = entries_.back().normalized;
            std::set<std::string> tokens;
            for (std::size_t i = 0; i <= rest.size();) {
                auto sp = rest.find(' ', i);
                if (sp == std::string_view::npos) sp = rest.size();
                tokens.emplace(rest.substr(i, sp - i));
                i = sp + 1;
            }
            for (const auto& t : tokens) postings_[t].push_back(entry);
        };
        for (NodeId c = 0; c < graph.num_categories(); ++c) add(graph.name(c), c);
        for (const auto& [alias, target] : graph.aliases()) add(alias, target);
        for (auto& [_, nodes] : exact_) {
            std::sort(nodes.begin(), nodes.end());
            nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        }
    }

    // Category ids whose normalized name or alias equals `normalized`.
    std::vector<NodeId> exact(const std::string& normalized) const {
        auto it = exact_.find(normalized);
        return it == exact_.end() ? std::vector<NodeId>{} : it->second;
    }

    struct Candidate {
        NodeId node = 0;
        double score = 0.0;
    };

    // Best-scoring entry sharing at least one token; ties -> ascending external id.
    std::optional<Candidate> best_fuzzy(const std::string& normalized) const {
        std::set<std::uint32_t> pool;
        std::string_view q = normalized;
        for (std::size_t i = 0; i <= q.size();) {
            auto sp = q.find(' ', i);
            if (sp == std::string_view::npos) sp = q.size();
            if (auto it = postings_.find(std::string(q.substr(i, sp - i))); it != postings_.end())
                pool.insert(it->second.begin(), it->second.end());
            i = sp + 1;
        }
        std::optional<Candidate> best;
        ExternalId best_ext = 0;
        for (auto e : pool) {
            double s = jaro_winkler(normalized, entries_[e].normalized);
            const auto ext = entries_[e].external;
            if (!best || s > best->score || (s == best->score && ext < best_ext)) {
                best = Candidate{entries_[e].node, s};
                best_ext = ext;
            }
        }
        return best;
    }

private:
    struct Entry {
        std::string normalized;
        NodeId node;
        ExternalId external;
    };
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::vector<NodeId>> exact_;
    std::unordered_map<std::string, std::vector<std::uint32_t>> postings_;
};

inline LabelMapping map_label(const CategoryIndex& index, const TaxonomyLabel& label, double threshold,
                              std::vector<NearMiss>* near_misses = nullptr) {
    LabelMapping out;
    out.label = label.id;
    std::map<NodeId, CategoryMatch> accepted;
    auto accept = [&](NodeId node, MatchKind kind, double score, const std::string& query) {
        auto [it, inserted] = accepted.try_emplace(node, CategoryMatch{node, kind, score, query});
        if (!inserted && score > it->second.score) it->second = CategoryMatch{node, kind, score, query};
    };
    for (const auto& part : split_conjunctions(label.name)) {
        const auto norm = normalize_name(part);
        if (norm.empty()) continue;
        if (auto hits = index.exact(norm); !hits.empty()) {
            for (NodeId n : hits) accept(n, MatchKind::Exact, 1.0, part);
            continue;
        }
        auto best = index.best_fuzzy(norm);
        if (!best) continue;
        if (best->score >= threshold)
            accept(best->node, MatchKind::Fuzzy, best->score, part);
        else if (near_misses)
            near_misses->push_back({label.id, part, best->node, best->score});
    }
    for (auto& [_, m] : accepted) out.matches.push_back(std::move(m));
    out.kind = MatchKind::Exact;
    for (const auto& m : out.matches) {
        out.score = std::min(out.score, m.score);
        if (m.kind == MatchKind::Fuzzy) out.kind = MatchKind::Fuzzy;
    }
    return out;
}

// Overrides replace the automatic result for their labels entirely.
inline CategoryMapping map_taxonomy(const Taxonomy& taxonomy, const CategoryGraph& graph,
                                    const Overrides& overrides = {}, double threshold = 0.9) {
    for (const auto& [label, nodes] : overrides) {
        if (!taxonomy.find(label)) throw InputError("override for unknown label '" + label + "'");
        if (nodes.empty()) throw InputError("override for '" + label + "' lists no categories");
        for (NodeId n : nodes) {
            if (!graph.valid(n) || !graph.is_category(n))
                throw InputError("override for '" + label + "' references non-category node " +
                                 std::to_string(n));
        }
    }
    CategoryIndex index(graph);
    CategoryMapping result;
    result.threshold = threshold;
    for (const auto& label : taxonomy.labels()) {
        if (auto it = overrides.find(label.id); it != overrides.end()) {
            LabelMapping m;
            m.label = label.id;
            m.kind = MatchKind::Override;
            std::set<NodeId> nodes(it->second.begin(), it->second.end());
            for (NodeId n : nodes) m.matches.push_back({n, MatchKind::Override, 1.0, label.name});
            result.mapped.push_back(std::move(m));
            continue;
        }
        std::vector<NearMiss> misses;
        auto m = map_label(index, label, threshold, &misses);
        result.near_misses.insert(result.near_misses.end(), misses.begin(), misses.end());
        if (m.matches.empty())
            result.unmapped.push_back(label.id);
        else
            result.mapped.push_back(std::move(m));
    }
    return result;
}

inline Overrides overrides_from_json(const Json& j, const CategoryGraph& graph) {
    Overrides out;
    if (!j.is_object()) throw InputError("overrides must be a JSON object");
    for (const auto& [label, names] : j.items()) {
        if (!names.is_array()) throw InputError("override for '" + label + "' must be a list");
        auto& nodes = out[label];
        for (const auto& n : names) {
            if (!n.is_string()) throw InputError("override for '" + label + "' must list names");
            auto id = graph.resolve_category(n.get<std::string>());
            if (!id)
                throw InputError("override for '" + label + "' names unknown category '" +
                                 n.get<std::string>() + "'");
            nodes.push_back(*id);
        }
    }
    return out;
}

inline Json mapping_to_json(const CategoryMapping& mapping, const CategoryGraph& graph,
                                      const Taxonomy& taxonomy) {
    Json labels = Json::array();
    for (const auto& m : mapping.mapped) {
        auto matches = m.matches;
        std::sort(matches.begin(), matches.end(), [&](const auto& a, const auto& b) {
            return graph.external_id(a.node) < graph.external_id(b.node);
        });
        Json cats = Json::array();
        for (const auto& c : matches) {
            cats.push_back({{"id", graph.external_id(c.node)},
                            {"name", graph.name(c.node)},
                            {"kind", to_string(c.kind)},
                            {"score", c.score},
                            {"query", c.query}});
        }
        labels.push_back({{"id", m.label},
                          {"name", taxonomy.at(m.label).name},
                          {"kind", to_string(m.kind)},
                          {"score", m.score},
                          {"categories", std::move(cats)}});
    }
    Json misses = Json::array();
    for (const auto& n : mapping.near_misses) {
        misses.push_back({{"label", n.label},
                          {"query", n.query},
                          {"candidate_id", graph.external_id(n.candidate)},
                          {"candidate", graph.name(n.candidate)},
                          {"score", n.score}});
    }
    return {{"threshold", mapping.threshold},
            {"labels", std::move(labels)},
            {"unmapped", mapping.unmapped},
            {"near_misses", std::move(misses)}};
}

inline CategoryMapping mapping_from_json(const Json& j, const CategoryGraph& graph) {
    CategoryMapping out;
    try {
        out.threshold = j.value("threshold", 0.9);
        for (const auto& row : j.at("labels")) {
            LabelMapping m;
            m.label = row.at("id").get<std::string>();
            m.kind = match_kind_from_string(row.at("kind").get<std::string>());
            m.score = row.at("score").get<double>();
            for (const auto& c : row.at("categories")) {
                auto ext = c.at("id").get<ExternalId>();
                auto node = graph.category_by_external(ext);
                if (!node) throw InputError("mapping references unknown category " + std::to_string(ext));
                m.matches.push_back({*node, match_kind_from_string(c.at("kind").get<std::string>()),
                                     c.at("score").get<double>(), c.value("query", std::string())});
            }
            std::sort(m.matches.begin(), m.matches.end(),
                      [](const auto& a, const auto& b) { return a.node < b.node; });
            out.mapped.push_back(std::move(m));
        }
        out.unmapped = j.value("unmapped", std::vector<std::string>{});
        for (const auto& n : j.value("near_misses", Json::array())) {
            auto node = graph.category_by_external(n.at("candidate_id").get<ExternalId>());
            if (!node) continue;
            out.near_misses.push_back({n.at("label").get<std::string>(), n.at("query").get<std::string>(),
                                       *node, n.at("score").get<double>()});
        }
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed mapping: ") + e.what());
    }
    return out;
}

}  // namespace wikicat
