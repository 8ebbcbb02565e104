#pragma once
// Deterministic synthetic data sets: a large random category graph for
// throughput checks, a small three-topic wiki with weakly attached distractor
// pages for labeling-mode comparisons, and a separable text corpus.

#include "wikicat/error.hpp"
#include "wikicat/json.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

namespace wikicat::synthetic {

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

inline std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace detail

struct ScaleSpec {
    std::size_t categories = 50'000;
    std::size_t pages = 100'000;
    std::size_t edges = 1'000'000;
    std::size_t roots = 20;
    double back_edge_fraction = 0.02;  // subcat edges pointing "upwards", creating cycles
    std::uint64_t seed = 1;
};

// Writes categories.tsv, pages.tsv, edges.tsv and taxonomy.json (one
// top-level label per root category) into `dir`.
//
// Categories [0, roots) are roots; every other category gets one to three
// parents among lower-numbered categories, so everything is reachable, plus
// a small share of upward edges that close cycles. The remaining edge budget
// goes to page memberships.
inline void write_scale_graph(const ScaleSpec& spec, const std::filesystem::path& dir) {
    if (spec.roots == 0 || spec.roots > spec.categories) throw UsageError("scale graph: bad root count");
    std::filesystem::create_directories(dir);
    std::mt19937_64 rng(spec.seed);
    {
        auto out = detail::open_out(dir / "categories.tsv");
        for (std::size_t c = 0; c < spec.categories; ++c) out << c << "\tCategory " << c << '\n';
    }
    {
        auto out = detail::open_out(dir / "pages.tsv");
        for (std::size_t p = 0; p < spec.pages; ++p) out << p << "\tPage " << p << '\n';
    }
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(spec.edges * 2);
    auto key = [](std::size_t parent, std::size_t child, bool member) {
        return (static_cast<std::uint64_t>(parent) << 33) | (static_cast<std::uint64_t>(child) << 1) |
               (member ? 1u : 0u);
    };
    auto edges = detail::open_out(dir / "edges.tsv");
    std::size_t written = 0;
    auto emit = [&](std::size_t parent, std::size_t child, bool member) {
        if (written >= spec.edges || (!member && parent == child)) return;
        if (!seen.insert(key(parent, child, member)).second) return;
        edges << parent << '\t' << child << '\t' << (member ? "member" : "subcat") << '\n';
        ++written;
    };
    for (std::size_t c = spec.roots; c < spec.categories; ++c) {
        const std::size_t k = detail::uniform(rng, 1, 3);
        for (std::size_t i = 0; i < k; ++i) {
            // Bias parents towards nearby ids so depth grows with the id.
            const std::size_t span = std::min<std::size_t>(c, 2'000);
            emit(c - detail::uniform(rng, 1, span), c, false);
        }
    }
    const auto back_edges = static_cast<std::size_t>(spec.back_edge_fraction * static_cast<double>(spec.categories));
    for (std::size_t i = 0; i < back_edges; ++i) {
        const std::size_t child = detail::uniform(rng, spec.roots, spec.categories - 1);
        const std::size_t parent = detail::uniform(rng, child, spec.categories - 1);
        emit(parent, child, false);
    }
    // Pages: round-robin until the edge budget is used.
    for (std::size_t round = 0; written < spec.edges && round < 1'000; ++round) {
        for (std::size_t p = 0; p < spec.pages && written < spec.edges; ++p)
            emit(detail::uniform(rng, 0, spec.categories - 1), p, true);
    }
    edges.close();

    Json labels = Json::array();
    for (std::size_t r = 0; r < spec.roots; ++r)
        labels.push_back({{"id", "L" + std::to_string(r)}, {"name", "Category " + std::to_string(r)}, {"parent", nullptr}});
    write_json_file((dir / "taxonomy.json").string(), Json{{"labels", std::move(labels)}});
}

struct AblationSpec {
    std::size_t genuine_per_topic = 45;
    std::size_t distractors_per_topic = 25;
    std::size_t bridge_pages = 6;       // pages legitimately under two topics
    std::size_t direct_per_topic = 4;   // pages filed directly under the root category
    std::size_t eval_per_topic = 40;
    std::size_t topic_vocab = 120;
    std::size_t noise_vocab = 300;
    std::size_t topic_words = 12;       // own-topic words per document
    std::size_t cross_words = 4;        // words from another topic per document
    std::size_t noise_words = 25;
    std::uint64_t seed = 7;
};

// Three-topic wiki. Each topic root has two levels of subcategories holding
// its genuine pages. Distractor pages carry another topic's text and hang off
// one deep category of this topic's tree while their other three parents
// sit outside every topic tree, so they are reachable but weakly attached.
// The "Cuisine" root also sits below a "Botany" subcategory, which only
// competing-branch pruning keeps apart.
//
// Writes categories.tsv, pages.tsv, edges.tsv, redirects.tsv, corpus.jsonl,
// taxonomy.json, eval.jsonl and config.json.
inline void write_ablation_wiki(const AblationSpec& spec, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::mt19937_64 rng(spec.seed);
    const std::vector<std::string> topics{"Astronomy", "Botany", "Cuisine"};
    const std::vector<std::string> stems{"astro", "botan", "cuisin", "cinema"};  // last: off-taxonomy

    auto word = [&](std::size_t topic) { return stems[topic] + std::to_string(detail::uniform(rng, 0, spec.topic_vocab - 1)); };
    auto document = [&](std::size_t topic) {
        std::vector<std::string> words;
        for (std::size_t i = 0; i < spec.topic_words; ++i) words.push_back(word(topic));
        for (std::size_t i = 0; i < spec.cross_words; ++i) {
            std::size_t other = detail::uniform(rng, 0, stems.size() - 2);
            if (other == topic) other = (other + 1) % (stems.size() - 1);
            words.push_back(word(other));
        }
        for (std::size_t i = 0; i < spec.noise_words; ++i)
            words.push_back("common" + std::to_string(detail::uniform(rng, 0, spec.noise_vocab - 1)));
        std::shuffle(words.begin(), words.end(), rng);
        std::string text;
        for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
        return text;
    };

    std::vector<std::pair<std::string, std::size_t>> categories;  // name, id
    auto add_cat = [&](std::string name) {
        categories.emplace_back(std::move(name), categories.size() + 100);
        return categories.back().second;
    };
    struct Edge {
        std::size_t parent, child;
        bool member;
    };
    std::vector<Edge> edges;
    std::vector<std::size_t> roots;
    std::vector<std::vector<std::size_t>> level1(3), level2(3);
    for (std::size_t t = 0; t < 3; ++t) {
        roots.push_back(add_cat(topics[t]));
        for (std::size_t a = 0; a < 3; ++a) {
            auto l1 = add_cat(topics[t] + " branch " + std::to_string(a + 1));
            level1[t].push_back(l1);
            edges.push_back({roots[t], l1, false});
            for (std::size_t b = 0; b < 2; ++b) {
                auto l2 = add_cat(topics[t] + " branch " + std::to_string(a + 1) + "." + std::to_string(b + 1));
                level2[t].push_back(l2);
                edges.push_back({l1, l2, false});
            }
        }
    }
    // Botany > Edible plants > Cuisine, plus a cycle inside the Astronomy tree.
    auto edible = add_cat("Edible plants");
    edges.push_back({level1[1][0], edible, false});
    edges.push_back({edible, roots[2], false});
    edges.push_back({level2[0][0], level1[0][1], false});
    std::vector<std::size_t> off_tree;
    for (std::size_t i = 0; i < 12; ++i) off_tree.push_back(add_cat("Unrelated topic " + std::to_string(i + 1)));
    auto maintenance = add_cat("Articles needing cleanup");

    struct Page {
        std::string title;
        std::string text;
    };
    std::vector<Page> pages;
    auto add_page = [&](std::string title, std::string text) {
        pages.push_back({std::move(title), std::move(text)});
        return pages.size() - 1 + 5000;
    };
    for (std::size_t t = 0; t < 3; ++t) {
        for (std::size_t i = 0; i < spec.genuine_per_topic; ++i) {
            auto p = add_page(topics[t] + " article " + std::to_string(i + 1), document(t));
            if (i < spec.direct_per_topic) {
                edges.push_back({roots[t], p, true});
            } else {
                const std::size_t k = detail::uniform(rng, 1, 2);
                for (std::size_t j = 0; j < k; ++j) {
                    const bool deep = detail::uniform(rng, 0, 2) != 0;
                    const auto& pool = deep ? level2[t] : level1[t];
                    edges.push_back({pool[detail::uniform(rng, 0, pool.size() - 1)], p, true});
                }
            }
            if (i % 5 == 0) edges.push_back({maintenance, p, true});
        }
    }
    for (std::size_t t = 0; t < 3; ++t) {
        for (std::size_t i = 0; i < spec.distractors_per_topic; ++i) {
            const std::size_t other = (t + 1 + i % 2) % 3;
            auto p = add_page("Loosely related to " + topics[t] + " " + std::to_string(i + 1), document(other));
            edges.push_back({level2[t][detail::uniform(rng, 0, level2[t].size() - 1)], p, true});
            std::vector<std::size_t> picks = off_tree;
            std::shuffle(picks.begin(), picks.end(), rng);
            for (std::size_t j = 0; j < 3; ++j) edges.push_back({picks[j], p, true});
        }
    }
    for (std::size_t i = 0; i < spec.bridge_pages; ++i) {
        const std::size_t a = i % 3, b = (i + 1) % 3;
        auto p = add_page("Bridge article " + std::to_string(i + 1), document(a) + " " + document(b));
        edges.push_back({level1[a][i % 3], p, true});
        edges.push_back({level1[b][i % 3], p, true});
    }
    for (std::size_t i = 0; i < 20; ++i) {
        auto p = add_page("Film " + std::to_string(i + 1), document(3));
        edges.push_back({off_tree[i % off_tree.size()], p, true});
    }

    {
        auto out = detail::open_out(dir / "categories.tsv");
        for (const auto& [name, id] : categories) out << id << '\t' << name << '\n';
    }
    {
        auto out = detail::open_out(dir / "pages.tsv");
        for (std::size_t i = 0; i < pages.size(); ++i) out << i + 5000 << '\t' << pages[i].title << '\n';
    }
    {
        auto out = detail::open_out(dir / "edges.tsv");
        for (const auto& e : edges) out << e.parent << '\t' << e.child << '\t' << (e.member ? "member" : "subcat") << '\n';
    }
    {
        auto out = detail::open_out(dir / "redirects.tsv");
        out << "Astronomical sciences\t" << roots[0] << '\n';
        out << "Plant science\t" << roots[1] << '\n';
    }
    {
        auto out = detail::open_out(dir / "corpus.jsonl");
        for (std::size_t i = 0; i < pages.size(); ++i)
            out << Json{{"id", i + 5000}, {"title", pages[i].title}, {"text", pages[i].text}}.dump() << '\n';
    }
    {
        Json labels = Json::array();
        for (std::size_t t = 0; t < 3; ++t)
            labels.push_back({{"id", "T" + std::to_string(t + 1)}, {"name", topics[t]}, {"parent", nullptr}});
        write_json_file((dir / "taxonomy.json").string(), Json{{"labels", std::move(labels)}});
    }
    {
        auto out = detail::open_out(dir / "eval.jsonl");
        for (std::size_t i = 0; i < spec.eval_per_topic; ++i) {
            for (std::size_t t = 0; t < 3; ++t) {
                out << Json{{"text", document(t)}, {"labels", {"T" + std::to_string(t + 1)}}, {"parent", nullptr}}.dump()
                    << '\n';
            }
        }
    }
    Json config{{"graph",
                 {{"categories", "categories.tsv"},
                  {"pages", "pages.tsv"},
                  {"edges", "edges.tsv"},
                  {"redirects", "redirects.tsv"}}},
                {"corpus", "corpus.jsonl"},
                {"taxonomy", "taxonomy.json"},
                {"eval", "eval.jsonl"},
                {"output_dir", "out"},
                {"scheme", "coarse"},
                {"n_per_class", 60},
                {"seed", 13}};
    write_json_file((dir / "config.json").string(), config);
}

struct TextExample {
    std::string text;
    std::string label;
};

// `classes` classes with disjoint core vocabularies plus shared noise words.
inline std::vector<TextExample> separable_corpus(std::size_t classes, std::size_t per_class, std::uint64_t seed,
                                                 std::size_t core_vocab = 40, std::size_t core_words = 10,
                                                 std::size_t noise_vocab = 200, std::size_t noise_words = 20) {
    std::mt19937_64 rng(seed);
    std::vector<TextExample> out;
    for (std::size_t i = 0; i < per_class; ++i) {
        for (std::size_t c = 0; c < classes; ++c) {
            std::string text;
            for (std::size_t w = 0; w < core_words; ++w)
                text += "class" + std::string(1, static_cast<char>('a' + c)) + "w" +
                        std::to_string(detail::uniform(rng, 0, core_vocab - 1)) + " ";
            for (std::size_t w = 0; w < noise_words; ++w)
                text += "noise" + std::to_string(detail::uniform(rng, 0, noise_vocab - 1)) + " ";
            out.push_back({std::move(text), "C" + std::to_string(c)});
        }
    }
    return out;
}

}  // namespace wikicat::synthetic
