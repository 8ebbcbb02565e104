#pragma once
// Category graph: category nodes connected by subcategory edges, page nodes
// attached to categories by membership edges, plus redirect aliases.
//
// Node handles are dense: categories occupy [0, num_categories) in file
// order, pages follow in [num_categories, num_nodes). Category and page
// external ids live in separate namespaces; the edge kind tells them apart.
// The graph is immutable once built and safe to share between threads.

#include "wikicat/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wikicat {

using NodeId = std::uint32_t;
using ExternalId = std::int64_t;

enum class NodeKind : std::uint8_t { Category, Page };
enum class EdgeKind : std::uint8_t { Subcat, Member };

inline std::string_view to_string(EdgeKind kind) {
    return kind == EdgeKind::Subcat ? "subcat" : "member";
}

struct GraphStats {
    std::size_t categories = 0;
    std::size_t pages = 0;
    std::size_t subcat_edges = 0;
    std::size_t member_edges = 0;
    std::size_t aliases = 0;
    std::size_t dropped_edges = 0;

    std::size_t nodes() const { return categories + pages; }
    std::size_t edges() const { return subcat_edges + member_edges; }
    bool operator==(const GraphStats&) const = default;
};

// Edge in external-id space, the form written back to edges.tsv.
struct ExternalEdge {
    ExternalId parent = 0;
    ExternalId child = 0;
    EdgeKind kind = EdgeKind::Subcat;
    auto operator<=>(const ExternalEdge&) const = default;
};

class GraphBuilder;
class CategoryGraph;
CategoryGraph read_snapshot(std::istream& in);

class CategoryGraph {
public:
    CategoryGraph() : child_offsets_{0}, parent_offsets_{0} {}

    std::size_t num_nodes() const { return node_ext_.size(); }
    std::size_t num_categories() const { return num_categories_; }
    std::size_t num_pages() const { return num_nodes() - num_categories_; }
    std::size_t num_edges() const { return child_ids_.size(); }

    bool valid(NodeId node) const { return node < num_nodes(); }
    bool is_category(NodeId node) const { return node < num_categories_; }
    bool is_page(NodeId node) const { return valid(node) && node >= num_categories_; }
    NodeKind kind(NodeId node) const {
        check(node);
        return is_category(node) ? NodeKind::Category : NodeKind::Page;
    }

    // Canonical category name or page title.
    const std::string& name(NodeId node) const {
        check(node);
        return node_names_[node];
    }
    ExternalId external_id(NodeId node) const {
        check(node);
        return node_ext_[node];
    }

    // Children of a category in ascending id order.
    std::span<const NodeId> children(NodeId category) const {
        check(category);
        if (!is_category(category))
            throw UsageError("children(): node " + std::to_string(category) + " is a page");
        return {child_ids_.data() + child_offsets_[category],
                child_ids_.data() + child_offsets_[category + 1]};
    }

    // Parent categories of any node in ascending id order.
    std::span<const NodeId> parents(NodeId node) const {
        check(node);
        return {parent_ids_.data() + parent_offsets_[node],
                parent_ids_.data() + parent_offsets_[node + 1]};
    }

    std::optional<NodeId> find_category(std::string_view name) const {
        auto it = category_by_name_.find(std::string(name));
        if (it == category_by_name_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<NodeId> find_alias(std::string_view alias) const {
        auto it = alias_index_.find(std::string(alias));
        if (it == alias_index_.end()) return std::nullopt;
        return it->second;
    }
    // Canonical name first, then redirect aliases.
    std::optional<NodeId> resolve_category(std::string_view name) const {
        if (auto id = find_category(name)) return id;
        return find_alias(name);
    }
    std::optional<NodeId> category_by_external(ExternalId ext) const {
        auto it = category_by_ext_.find(ext);
        if (it == category_by_ext_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<NodeId> page_by_external(ExternalId ext) const {
        auto it = page_by_ext_.find(ext);
        if (it == page_by_ext_.end()) return std::nullopt;
        return it->second;
    }

    // (alias, canonical category) sorted by alias.
    const std::vector<std::pair<std::string, NodeId>>& aliases() const { return aliases_; }

    GraphStats stats() const {
        GraphStats s;
        s.categories = num_categories_;
        s.pages = num_pages();
        for (NodeId child : child_ids_) {
            if (is_category(child))
                ++s.subcat_edges;
            else
                ++s.member_edges;
        }
        s.aliases = aliases_.size();
        s.dropped_edges = dropped_edges_;
        return s;
    }

    // Sorted, deduplicated edge list in external-id space.
    std::vector<ExternalEdge> edge_list() const {
        std::vector<ExternalEdge> out;
        out.reserve(num_edges());
        for (NodeId parent = 0; parent < num_categories_; ++parent) {
            for (NodeId child : children(parent)) {
                out.push_back({node_ext_[parent], node_ext_[child],
                               is_category(child) ? EdgeKind::Subcat : EdgeKind::Member});
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    bool operator==(const CategoryGraph& other) const {
        return num_categories_ == other.num_categories_ && node_ext_ == other.node_ext_ &&
               node_names_ == other.node_names_ && child_offsets_ == other.child_offsets_ &&
               child_ids_ == other.child_ids_ && parent_offsets_ == other.parent_offsets_ &&
               parent_ids_ == other.parent_ids_ && aliases_ == other.aliases_ &&
               dropped_edges_ == other.dropped_edges_;
    }

private:
    friend class GraphBuilder;
    friend CategoryGraph read_snapshot(std::istream& in);
    friend void write_snapshot(const CategoryGraph& graph, std::ostream& out);

    void check(NodeId node) const {
        if (!valid(node)) throw UsageError("invalid node id " + std::to_string(node));
    }

    // Derives the reverse adjacency and lookup indexes from the forward CSR.
    void finalize() {
        const std::size_t n = num_nodes();
        parent_offsets_.assign(n + 1, 0);
        for (NodeId child : child_ids_) ++parent_offsets_[child + 1];
        for (std::size_t i = 0; i < n; ++i) parent_offsets_[i + 1] += parent_offsets_[i];
        parent_ids_.assign(child_ids_.size(), 0);
        std::vector<std::uint64_t> cursor(parent_offsets_.begin(), parent_offsets_.end() - 1);
        // Parents come out ascending because the outer loop is ascending.
        for (NodeId parent = 0; parent < num_categories_; ++parent) {
            for (auto e = child_offsets_[parent]; e < child_offsets_[parent + 1]; ++e)
                parent_ids_[cursor[child_ids_[e]]++] = parent;
        }
        category_by_name_.clear();
        category_by_ext_.clear();
        page_by_ext_.clear();
        alias_index_.clear();
        for (NodeId id = 0; id < n; ++id) {
            if (is_category(id)) {
                category_by_name_.emplace(node_names_[id], id);
                category_by_ext_.emplace(node_ext_[id], id);
            } else {
                page_by_ext_.emplace(node_ext_[id], id);
            }
        }
        for (const auto& [alias, target] : aliases_) alias_index_.emplace(alias, target);
    }

    std::size_t num_categories_ = 0;
    std::vector<ExternalId> node_ext_;
    std::vector<std::string> node_names_;
    std::vector<std::uint64_t> child_offsets_;
    std::vector<NodeId> child_ids_;
    std::vector<std::uint64_t> parent_offsets_;
    std::vector<NodeId> parent_ids_;
    std::vector<std::pair<std::string, NodeId>> aliases_;
    std::size_t dropped_edges_ = 0;

    std::unordered_map<std::string, NodeId> category_by_name_;
    std::unordered_map<ExternalId, NodeId> category_by_ext_;
    std::unordered_map<ExternalId, NodeId> page_by_ext_;
    std::unordered_map<std::string, NodeId> alias_index_;
};

// Accumulates nodes and edges in external-id space. All categories must be
// added before the first page; edges and redirects may come in any order
// after both node tables are complete.
class GraphBuilder {
public:
    explicit GraphBuilder(bool strict = true) : strict_(strict) {}

    void add_category(ExternalId ext, std::string name) {
        if (!pages_.empty()) throw UsageError("categories must be added before pages");
        if (ext < 0) throw InputError("negative category id " + std::to_string(ext));
        if (!category_ext_.emplace(ext, static_cast<NodeId>(categories_.size())).second)
            throw InputError("duplicate category id " + std::to_string(ext));
        if (!category_names_.emplace(name, static_cast<NodeId>(categories_.size())).second)
            throw InputError("duplicate category name '" + name + "'");
        categories_.emplace_back(ext, std::move(name));
    }

    void add_page(ExternalId ext, std::string title) {
        if (ext < 0) throw InputError("negative page id " + std::to_string(ext));
        if (!page_ext_.emplace(ext, static_cast<NodeId>(pages_.size())).second)
            throw InputError("duplicate page id " + std::to_string(ext));
        pages_.emplace_back(ext, std::move(title));
    }

    // Returns false when a dangling edge was dropped in lenient mode.
    bool add_edge(ExternalId parent, ExternalId child, EdgeKind kind) {
        auto p = category_ext_.find(parent);
        std::optional<NodeId> c;
        if (kind == EdgeKind::Subcat) {
            if (auto it = category_ext_.find(child); it != category_ext_.end()) c = it->second;
        } else {
            if (auto it = page_ext_.find(child); it != page_ext_.end())
                c = static_cast<NodeId>(categories_.size()) + it->second;
        }
        if (p == category_ext_.end() || !c) {
            if (strict_) {
                throw InputError("dangling " + std::string(to_string(kind)) + " edge " +
                                 std::to_string(parent) + " -> " + std::to_string(child));
            }
            ++dropped_;
            return false;
        }
        edges_.emplace_back(p->second, *c);
        return true;
    }

    bool add_redirect(std::string alias, ExternalId target) {
        auto it = category_ext_.find(target);
        if (it == category_ext_.end()) {
            if (strict_)
                throw InputError("redirect '" + alias + "' targets unknown category " +
                                 std::to_string(target));
            ++dropped_;
            return false;
        }
        auto [pos, inserted] = redirects_.emplace(std::move(alias), it->second);
        if (!inserted && pos->second != it->second)
            throw InputError("redirect '" + pos->first + "' has conflicting targets");
        return true;
    }

    std::size_t dropped() const { return dropped_; }

    CategoryGraph build() && {
        CategoryGraph g;
        g.num_categories_ = categories_.size();
        const std::size_t n = categories_.size() + pages_.size();
        g.node_ext_.reserve(n);
        g.node_names_.reserve(n);
        for (auto& [ext, name] : categories_) {
            g.node_ext_.push_back(ext);
            g.node_names_.push_back(std::move(name));
        }
        for (auto& [ext, title] : pages_) {
            g.node_ext_.push_back(ext);
            g.node_names_.push_back(std::move(title));
        }
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
        g.child_offsets_.assign(n + 1, 0);
        g.child_ids_.reserve(edges_.size());
        for (const auto& [parent, child] : edges_) {
            ++g.child_offsets_[parent + 1];
            g.child_ids_.push_back(child);
        }
        for (std::size_t i = 0; i < n; ++i) g.child_offsets_[i + 1] += g.child_offsets_[i];
        g.aliases_.assign(redirects_.begin(), redirects_.end());
        std::sort(g.aliases_.begin(), g.aliases_.end());
        g.dropped_edges_ = dropped_;
        g.finalize();
        return g;
    }

private:
    bool strict_;
    std::vector<std::pair<ExternalId, std::string>> categories_;
    std::vector<std::pair<ExternalId, std::string>> pages_;
    std::unordered_map<ExternalId, NodeId> category_ext_;
    std::unordered_map<std::string, NodeId> category_names_;
    std::unordered_map<ExternalId, NodeId> page_ext_;
    std::vector<std::pair<NodeId, NodeId>> edges_;
    std::unordered_map<std::string, NodeId> redirects_;
    std::size_t dropped_ = 0;
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        auto tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

inline std::optional<ExternalId> parse_id(std::string_view text) {
    ExternalId value = 0;
    if (text.empty()) return std::nullopt;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value < 0) return std::nullopt;
    return value;
}

// Calls fn(fields, line_number) for every non-blank line; wraps any
// InputError with the file and line.
template <typename Fn>
void for_each_tsv_line(const std::string& path, std::size_t expected_fields, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        try {
            if (fields.size() != expected_fields)
                throw InputError("expected " + std::to_string(expected_fields) + " fields, got " +
                                 std::to_string(fields.size()));
            fn(fields);
        } catch (const InputError& e) {
            throw InputError(where(path, line_no) + ": " + e.what());
        }
    }
}

inline ExternalId require_id(std::string_view text) {
    auto id = parse_id(text);
    if (!id) throw InputError("bad id '" + std::string(text) + "'");
    return *id;
}

}  // namespace detail

struct GraphFiles {
    std::string categories;
    std::string pages;
    std::string edges;
    std::string redirects;  // empty when absent
};

// Loads and validates the TSV ingestion format. Strict mode rejects
// dangling edges and redirects; lenient mode drops and counts them.
inline CategoryGraph load_graph(const GraphFiles& files, bool strict = true) {
    GraphBuilder builder(strict);
    detail::for_each_tsv_line(files.categories, 2, [&](const auto& f) {
        builder.add_category(detail::require_id(f[0]), std::string(f[1]));
    });
    detail::for_each_tsv_line(files.pages, 2, [&](const auto& f) {
        builder.add_page(detail::require_id(f[0]), std::string(f[1]));
    });
    detail::for_each_tsv_line(files.edges, 3, [&](const auto& f) {
        EdgeKind kind;
        if (f[2] == "subcat")
            kind = EdgeKind::Subcat;
        else if (f[2] == "member")
            kind = EdgeKind::Member;
        else
            throw InputError("unknown edge kind '" + std::string(f[2]) + "'");
        builder.add_edge(detail::require_id(f[0]), detail::require_id(f[1]), kind);
    });
    if (!files.redirects.empty()) {
        detail::for_each_tsv_line(files.redirects, 2, [&](const auto& f) {
            builder.add_redirect(std::string(f[0]), detail::require_id(f[1]));
        });
    }
    return std::move(builder).build();
}

inline void write_edges_tsv(const CategoryGraph& graph, std::ostream& out) {
    for (const auto& e : graph.edge_list())
        out << e.parent << '\t' << e.child << '\t' << to_string(e.kind) << '\n';
}

// Binary snapshot, all integers little-endian:
//   magic "WKCGRAPH" | u32 version (1) | u32 reserved (0)
//   u64 categories | u64 pages | u64 edges | u64 aliases | u64 dropped_edges
//   nodes (categories then pages): i64 external id, u32 byte length, UTF-8 name
//   u64 child_offsets[nodes + 1] | u32 child_ids[edges]
//   aliases: u32 byte length, alias bytes, u32 category node id
// The reverse adjacency and lookup indexes are rebuilt on load.
inline constexpr std::array<char, 8> kSnapshotMagic{'W', 'K', 'C', 'G', 'R', 'A', 'P', 'H'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

namespace detail {

template <typename T>
void put_le(std::ostream& out, T value) {
    using U = std::make_unsigned_t<T>;
    U bits = static_cast<U>(value);
    std::array<char, sizeof(T)> bytes;
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
    out.write(bytes.data(), bytes.size());
}

inline void put_string(std::ostream& out, const std::string& s) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

class ByteReader {
public:
    explicit ByteReader(std::istream& in) : in_(in) {}

    template <typename T>
    T get() {
        std::array<unsigned char, sizeof(T)> bytes;
        read(reinterpret_cast<char*>(bytes.data()), bytes.size());
        std::make_unsigned_t<T> bits = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            bits |= static_cast<std::make_unsigned_t<T>>(bytes[i]) << (8 * i);
        return static_cast<T>(bits);
    }
    std::string get_string() {
        auto len = get<std::uint32_t>();
        std::string s(len, '\0');
        read(s.data(), len);
        return s;
    }
    void read(char* dst, std::size_t n) {
        if (!in_.read(dst, static_cast<std::streamsize>(n)))
            throw InputError("truncated graph snapshot");
    }

private:
    std::istream& in_;
};

}  // namespace detail

inline void write_snapshot(const CategoryGraph& g, std::ostream& out) {
    out.write(kSnapshotMagic.data(), kSnapshotMagic.size());
    detail::put_le<std::uint32_t>(out, kSnapshotVersion);
    detail::put_le<std::uint32_t>(out, 0);
    detail::put_le<std::uint64_t>(out, g.num_categories());
    detail::put_le<std::uint64_t>(out, g.num_pages());
    detail::put_le<std::uint64_t>(out, g.num_edges());
    detail::put_le<std::uint64_t>(out, g.aliases_.size());
    detail::put_le<std::uint64_t>(out, g.dropped_edges_);
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        detail::put_le<std::int64_t>(out, g.node_ext_[i]);
        detail::put_string(out, g.node_names_[i]);
    }
    for (auto off : g.child_offsets_) detail::put_le<std::uint64_t>(out, off);
    for (auto id : g.child_ids_) detail::put_le<std::uint32_t>(out, id);
    for (const auto& [alias, target] : g.aliases_) {
        detail::put_string(out, alias);
        detail::put_le<std::uint32_t>(out, target);
    }
}

inline CategoryGraph read_snapshot(std::istream& in) {
    detail::ByteReader r(in);
    std::array<char, 8> magic{};
    r.read(magic.data(), magic.size());
    if (magic != kSnapshotMagic) throw InputError("not a graph snapshot (bad magic)");
    if (auto version = r.get<std::uint32_t>(); version != kSnapshotVersion)
        throw InputError("unsupported snapshot version " + std::to_string(version));
    r.get<std::uint32_t>();
    CategoryGraph g;
    g.num_categories_ = r.get<std::uint64_t>();
    const auto pages = r.get<std::uint64_t>();
    const auto edges = r.get<std::uint64_t>();
    const auto aliases = r.get<std::uint64_t>();
    g.dropped_edges_ = r.get<std::uint64_t>();
    const std::size_t n = g.num_categories_ + pages;
    g.node_ext_.resize(n);
    g.node_names_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.node_ext_[i] = r.get<std::int64_t>();
        g.node_names_[i] = r.get_string();
    }
    g.child_offsets_.resize(n + 1);
    for (auto& off : g.child_offsets_) off = r.get<std::uint64_t>();
    g.child_ids_.resize(edges);
    for (auto& id : g.child_ids_) {
        id = r.get<std::uint32_t>();
        if (id >= n) throw InputError("snapshot edge endpoint out of range");
    }
    if (g.child_offsets_.front() != 0 || g.child_offsets_.back() != edges ||
        !std::is_sorted(g.child_offsets_.begin(), g.child_offsets_.end()))
        throw InputError("snapshot adjacency offsets are inconsistent");
    for (std::size_t i = g.num_categories_; i < n; ++i) {
        if (g.child_offsets_[i] != g.child_offsets_[i + 1])
            throw InputError("snapshot page node has children");
    }
    g.aliases_.resize(aliases);
    for (auto& [alias, target] : g.aliases_) {
        alias = r.get_string();
        target = r.get<std::uint32_t>();
        if (target >= g.num_categories_) throw InputError("snapshot alias target is not a category");
    }
    g.finalize();
    return g;
}

inline void save_snapshot(const CategoryGraph& graph, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    write_snapshot(graph, out);
}

inline CategoryGraph load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    return read_snapshot(in);
}

}  // namespace wikicat
