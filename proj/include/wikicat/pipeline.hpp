#pragma once
// End-to-end pipeline steps shared by the CLI: graph build, taxonomy mapping,
// labeling, balanced sampling, training, prediction, evaluation and the
// labeling-mode ablation. Every step reads its inputs from the resolved
// PipelineConfig and writes machine-readable files into the output directory.

#include "wikicat/classifiers.hpp"
#include "wikicat/error.hpp"
#include "wikicat/eval.hpp"
#include "wikicat/graph.hpp"
#include "wikicat/json.hpp"
#include "wikicat/labeler.hpp"
#include "wikicat/parallel.hpp"
#include "wikicat/taxonomy.hpp"
#include "wikicat/textproc.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace wikicat {

namespace fs = std::filesystem;

inline constexpr std::size_t kFineSamplesPerClass = 1000;
inline constexpr std::size_t kCoarseSamplesPerClass = 20000;

struct PipelineConfig {
    // Input paths exactly as written in the config file, echoed into outputs.
    Json raw_paths = Json::object();

    fs::path categories, pages, edges, redirects, snapshot;
    bool strict = true;
    fs::path corpus, taxonomy, overrides, mapping, eval;
    fs::path output_dir = "out";

    CompetitionScheme scheme = CompetitionScheme::Coarse;
    double mapping_threshold = 0.9;
    LabelingConfig labeling;
    TrainConfig training;
    std::size_t min_df = 3;
    std::optional<std::size_t> n_per_class;
    std::uint64_t seed = 0;
    unsigned workers = default_workers();

    std::size_t samples_per_class() const {
        if (n_per_class) return *n_per_class;
        return scheme == CompetitionScheme::Fine ? kFineSamplesPerClass : kCoarseSamplesPerClass;
    }

    fs::path out(const std::string& name) const { return output_dir / name; }
    fs::path mapping_path() const { return mapping.empty() ? out("mapping.json") : mapping; }

    // Resolved settings that influence results. Output directory and worker
    // count are left out: they must not change any artifact.
    Json echo() const {
        TrainConfig t = training;
        t.seed = seed;
        return {{"paths", raw_paths},
                {"scheme", to_string(scheme)},
                {"mapping_threshold", mapping_threshold},
                {"labeling", labeling.to_json()},
                {"training", t.to_json()},
                {"min_df", min_df},
                {"n_per_class", samples_per_class()},
                {"seed", seed}};
    }

    // Relative paths are resolved against `base_dir` (the config file's directory).
    static PipelineConfig from_json(const Json& j, const fs::path& base_dir) {
        PipelineConfig c;
        auto path = [&](const Json& obj, const char* key, const std::string& echo_key) -> fs::path {
            if (!obj.contains(key) || obj.at(key).is_null()) return {};
            auto s = obj.at(key).get<std::string>();
            c.raw_paths[echo_key] = s;
            fs::path p(s);
            return p.is_absolute() ? p : base_dir / p;
        };
        try {
            if (j.contains("graph")) {
                const auto& g = j.at("graph");
                c.categories = path(g, "categories", "categories");
                c.pages = path(g, "pages", "pages");
                c.edges = path(g, "edges", "edges");
                c.redirects = path(g, "redirects", "redirects");
                c.snapshot = path(g, "snapshot", "snapshot");
                c.strict = g.value("strict", true);
            }
            c.corpus = path(j, "corpus", "corpus");
            c.taxonomy = path(j, "taxonomy", "taxonomy");
            c.overrides = path(j, "overrides", "overrides");
            c.mapping = path(j, "mapping", "mapping");
            c.eval = path(j, "eval", "eval");
            if (j.contains("output_dir")) {
                fs::path o(j.at("output_dir").get<std::string>());
                c.output_dir = o.is_absolute() ? o : base_dir / o;
            } else {
                c.output_dir = base_dir / "out";
            }
            if (j.contains("scheme")) c.scheme = scheme_from_string(j.at("scheme").get<std::string>());
            c.mapping_threshold = j.value("mapping_threshold", c.mapping_threshold);
            if (j.contains("labeling")) c.labeling = LabelingConfig::from_json(j.at("labeling"));
            if (j.contains("training")) c.training = TrainConfig::from_json(j.at("training"));
            c.min_df = j.value("min_df", c.min_df);
            if (j.contains("n_per_class") && !j.at("n_per_class").is_null())
                c.n_per_class = j.at("n_per_class").get<std::size_t>();
            c.seed = j.value("seed", c.seed);
            if (j.contains("workers") && j.at("workers").get<unsigned>() > 0) c.workers = j.at("workers").get<unsigned>();
        } catch (const Json::exception& e) {
            throw InputError(std::string("malformed pipeline config: ") + e.what());
        }
        if (c.mapping_threshold < 0.0 || c.mapping_threshold > 1.0)
            throw ConfigError("mapping_threshold must lie in [0, 1]");
        if (c.n_per_class && *c.n_per_class == 0) throw ConfigError("n_per_class must be positive");
        return c;
    }

    static PipelineConfig load(const fs::path& file) {
        return from_json(read_json_file(file.string()), fs::absolute(file).parent_path());
    }
};

namespace detail {

inline void require_file(const fs::path& p, const char* what) {
    if (p.empty()) throw InputError(std::string("no ") + what + " path configured");
    if (!fs::exists(p)) throw InputError(std::string(what) + " not found: " + p.string());
}

inline void write_text_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("cannot write " + p.string());
    out << content;
}

}  // namespace detail

// Snapshot when configured and present, otherwise the TSV files.
inline CategoryGraph load_pipeline_graph(const PipelineConfig& cfg) {
    if (!cfg.snapshot.empty() && fs::exists(cfg.snapshot)) return load_snapshot(cfg.snapshot.string());
    detail::require_file(cfg.categories, "categories file");
    detail::require_file(cfg.pages, "pages file");
    detail::require_file(cfg.edges, "edges file");
    if (!cfg.redirects.empty()) detail::require_file(cfg.redirects, "redirects file");
    return load_graph({cfg.categories.string(), cfg.pages.string(), cfg.edges.string(), cfg.redirects.string()},
                      cfg.strict);
}

inline Taxonomy load_pipeline_taxonomy(const PipelineConfig& cfg) {
    detail::require_file(cfg.taxonomy, "taxonomy");
    return Taxonomy::from_json(read_json_file(cfg.taxonomy.string()));
}

inline Json stats_to_json(const GraphStats& s) {
    return {{"categories", s.categories}, {"pages", s.pages},         {"edges", s.edges()},
            {"subcat_edges", s.subcat_edges}, {"member_edges", s.member_edges}, {"aliases", s.aliases},
            {"dropped_edges", s.dropped_edges}};
}

inline GraphStats run_build_graph(const PipelineConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    auto graph = load_pipeline_graph(cfg);
    const fs::path snap = cfg.snapshot.empty() ? cfg.out("graph.bin") : cfg.snapshot;
    save_snapshot(graph, snap.string());
    auto stats = graph.stats();
    write_json_file(cfg.out("graph_stats.json").string(), stats_to_json(stats));
    return stats;
}

inline CategoryMapping run_map(const PipelineConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    auto graph = load_pipeline_graph(cfg);
    auto taxonomy = load_pipeline_taxonomy(cfg);
    Overrides overrides;
    if (!cfg.overrides.empty()) {
        detail::require_file(cfg.overrides, "overrides");
        overrides = overrides_from_json(read_json_file(cfg.overrides.string()), graph);
    }
    auto mapping = map_taxonomy(taxonomy, graph, overrides, cfg.mapping_threshold);
    write_json_file(cfg.out("mapping.json").string(), mapping_to_json(mapping, graph, taxonomy));
    return mapping;
}

inline Json label_summary(const LabeledCorpus& corpus, const PipelineConfig& cfg) {
    std::size_t labeled = 0;
    for (const auto& p : corpus.pages)
        if (!p.assignments.empty()) ++labeled;
    Json per_label = Json::object();
    for (const auto& [label, count] : corpus.label_counts()) per_label[label] = count;
    return {{"mode", to_string(corpus.config.mode)},
            {"candidate_pages", corpus.pages.size()},
            {"labeled_pages", labeled},
            {"per_label", std::move(per_label)},
            {"config", cfg.echo()}};
}

// Labels with an existing mapping.json (falls back to mapping on the fly
// when no mapping file exists yet).
inline LabeledCorpus label_in_memory(const PipelineConfig& cfg, const CategoryGraph& graph, const Taxonomy& taxonomy) {
    CategoryMapping mapping;
    if (fs::exists(cfg.mapping_path())) {
        mapping = mapping_from_json(read_json_file(cfg.mapping_path().string()), graph);
    } else {
        Overrides overrides;
        if (!cfg.overrides.empty()) overrides = overrides_from_json(read_json_file(cfg.overrides.string()), graph);
        mapping = map_taxonomy(taxonomy, graph, overrides, cfg.mapping_threshold);
    }
    auto sets = competition_sets(taxonomy, mapping, cfg.scheme);
    return label_corpus(graph, sets, cfg.labeling, cfg.workers);
}

inline LabeledCorpus run_label(const PipelineConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    auto graph = load_pipeline_graph(cfg);
    auto taxonomy = load_pipeline_taxonomy(cfg);
    auto corpus = label_in_memory(cfg, graph, taxonomy);
    std::ofstream out(cfg.out("labels.jsonl"), std::ios::binary);
    if (!out) throw InputError("cannot write " + cfg.out("labels.jsonl").string());
    write_labels_jsonl(corpus, out);
    write_json_file(cfg.out("labels_summary.json").string(), label_summary(corpus, cfg));
    return corpus;
}

// Training groups: one per competition set. Coarse has a single group keyed
// "" over the top-level labels; fine has one group per top-level parent.
struct TrainingGroup {
    std::string key;  // parent label id, "" for the coarse group
    std::vector<std::string> labels;
};

inline std::vector<TrainingGroup> training_groups(const Taxonomy& taxonomy, CompetitionScheme scheme) {
    std::vector<TrainingGroup> out;
    if (scheme == CompetitionScheme::Coarse) {
        out.push_back({"", taxonomy.top_level()});
    } else {
        for (const auto& parent : taxonomy.top_level()) {
            auto kids = taxonomy.children_of(parent);
            if (!kids.empty()) out.push_back({parent, std::move(kids)});
        }
    }
    return out;
}

struct CorpusDoc {
    ExternalId id = 0;
    std::string title;
    std::string text;
};

inline std::vector<CorpusDoc> read_corpus_jsonl(const std::string& path) {
    std::vector<CorpusDoc> out;
    for_each_jsonl(path, [&](const Json& j, std::size_t) {
        out.push_back({j.at("id").get<ExternalId>(), j.value("title", std::string()), j.at("text").get<std::string>()});
    });
    return out;
}

// Everything a trained pipeline needs at prediction time.
struct TrainedModels {
    TfIdfModel tfidf;
    std::vector<TrainingGroup> groups;
    std::map<std::string, LinearSvmModel> svm;          // by group key
    std::map<std::string, CentroidModel> centroid;      // by group key

    static std::string predict_with(const LinearSvmModel& m, const SparseVector& v) {
        return m.labels.size() == 1 ? m.labels.front() : m.predict(v);
    }
};

inline Json group_key_json(const std::string& key) { return key.empty() ? Json() : Json(key); }

// Hard-label instances per group from labeled pages, plus the fitted tf-idf.
// SVMs train on the balanced sample; centroids on the unsampled data.
inline TrainedModels train_from_labels(const PipelineConfig& cfg, const Taxonomy& taxonomy,
                                       const std::vector<LabeledPage>& labeled, const std::vector<CorpusDoc>& corpus) {
    std::unordered_map<ExternalId, std::size_t> doc_index;
    for (std::size_t i = 0; i < corpus.size(); ++i) doc_index.emplace(corpus[i].id, i);

    TrainedModels models;
    models.groups = training_groups(taxonomy, cfg.scheme);
    std::map<std::string, std::string> group_of;
    for (const auto& g : models.groups)
        for (const auto& l : g.labels) group_of[l] = g.key;

    std::map<std::string, std::vector<LabeledDoc>> instances;
    std::set<std::size_t> used_docs;
    std::size_t missing = 0;
    for (const auto& p : labeled) {
        if (p.assignments.empty()) continue;
        auto it = doc_index.find(p.page);
        if (it == doc_index.end()) {
            ++missing;
            continue;
        }
        for (const auto& a : p.assignments) {
            auto g = group_of.find(a.label);
            if (g == group_of.end()) continue;
            instances[g->second].push_back({it->second, a.label});
            used_docs.insert(it->second);
        }
    }
    if (missing > 0) std::cerr << "warning: " << missing << " labeled pages have no corpus text\n";
    if (used_docs.empty()) throw InputError("no labeled pages with corpus text to train on");

    TfIdfFitter fitter(cfg.min_df);
    for (auto d : used_docs) fitter.add(corpus[d].text);
    models.tfidf = fitter.finish();
    if (models.tfidf.vocab_size() == 0) std::cerr << "warning: tf-idf vocabulary is empty after min_df cutoff\n";

    std::vector<std::size_t> doc_list(used_docs.begin(), used_docs.end());
    std::vector<SparseVector> vec_list(doc_list.size());
    parallel_for(doc_list.size(), cfg.workers,
                 [&](std::size_t i) { vec_list[i] = models.tfidf.transform(corpus[doc_list[i]].text); });
    std::unordered_map<std::size_t, const SparseVector*> vectors;
    for (std::size_t i = 0; i < doc_list.size(); ++i) vectors.emplace(doc_list[i], &vec_list[i]);

    TrainConfig tcfg = cfg.training;
    for (const auto& g : models.groups) {
        auto it = instances.find(g.key);
        if (it == instances.end() || it->second.empty()) {
            std::cerr << "warning: group '" << g.key << "' has no training documents\n";
            continue;
        }
        const auto& docs = it->second;
        std::vector<SparseVector> xs;
        std::vector<std::string> ys;
        for (const auto& d : docs) {
            xs.push_back(*vectors.at(d.doc));
            ys.push_back(d.label);
        }
        models.centroid.emplace(g.key, train_centroid(xs, ys));

        tcfg.seed = derive_seed(cfg.seed, "svm/" + g.key);
        auto balanced = sample_balance(docs, cfg.samples_per_class(), derive_seed(cfg.seed, "sample/" + g.key));
        xs.clear();
        ys.clear();
        for (const auto& d : balanced.instances) {
            xs.push_back(*vectors.at(d.doc));
            ys.push_back(d.label);
        }
        std::set<std::string> classes(ys.begin(), ys.end());
        if (classes.size() < 2) {
            LinearSvmModel single;
            single.labels = {*classes.begin()};
            single.dim = models.tfidf.vocab_size();
            single.weights.assign(1, std::vector<double>(single.dim, 0.0));
            single.bias = {0.0};
            single.config = tcfg;
            models.svm.emplace(g.key, std::move(single));
        } else {
            models.svm.emplace(g.key, train_svm(xs, ys, models.tfidf.vocab_size(), tcfg, cfg.workers));
        }
    }
    return models;
}

inline void save_models(const TrainedModels& m, const PipelineConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    write_json_file(cfg.out("tfidf_model.json").string(), m.tfidf.to_json());
    Json svm_groups = Json::array(), centroid_groups = Json::array();
    for (const auto& g : m.groups) {
        if (auto it = m.svm.find(g.key); it != m.svm.end())
            svm_groups.push_back({{"parent", group_key_json(g.key)}, {"model", it->second.to_json()}});
        if (auto it = m.centroid.find(g.key); it != m.centroid.end())
            centroid_groups.push_back({{"parent", group_key_json(g.key)}, {"model", it->second.to_json()}});
    }
    write_json_file(cfg.out("svm_model.json").string(), Json{{"format", "wikicat-svm/1"},
                                                             {"tfidf", "tfidf_model.json"},
                                                             {"scheme", to_string(cfg.scheme)},
                                                             {"config", cfg.echo()},
                                                             {"groups", std::move(svm_groups)}});
    write_json_file(cfg.out("centroid_model.json").string(), Json{{"format", "wikicat-centroid/1"},
                                                                  {"tfidf", "tfidf_model.json"},
                                                                  {"scheme", to_string(cfg.scheme)},
                                                                  {"config", cfg.echo()},
                                                                  {"groups", std::move(centroid_groups)}});
}

inline TrainedModels load_models(const PipelineConfig& cfg, const Taxonomy& taxonomy) {
    TrainedModels m;
    m.groups = training_groups(taxonomy, cfg.scheme);
    auto read_model_file = [&](const char* name, const char* format) {
        detail::require_file(cfg.out(name), name);
        auto j = read_json_file(cfg.out(name).string());
        if (j.value("format", std::string()) != format)
            throw InputError(std::string(name) + ": expected format " + format);
        auto tfidf_path = cfg.output_dir / j.at("tfidf").get<std::string>();
        detail::require_file(tfidf_path, "tf-idf model");
        return std::make_pair(j, tfidf_path);
    };
    try {
        auto [svm, tfidf_path] = read_model_file("svm_model.json", "wikicat-svm/1");
        m.tfidf = TfIdfModel::from_json(read_json_file(tfidf_path.string()));
        for (const auto& g : svm.at("groups")) {
            std::string key = g.at("parent").is_null() ? std::string() : g.at("parent").get<std::string>();
            m.svm.emplace(key, LinearSvmModel::from_json(g.at("model")));
        }
        auto [centroid, _] = read_model_file("centroid_model.json", "wikicat-centroid/1");
        for (const auto& g : centroid.at("groups")) {
            std::string key = g.at("parent").is_null() ? std::string() : g.at("parent").get<std::string>();
            m.centroid.emplace(key, CentroidModel::from_json(g.at("model")));
        }
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed model file: ") + e.what());
    }
    return m;
}

inline TrainedModels run_train(const PipelineConfig& cfg) {
    auto taxonomy = load_pipeline_taxonomy(cfg);
    detail::require_file(cfg.out("labels.jsonl"), "labels.jsonl (run `label` first)");
    detail::require_file(cfg.corpus, "corpus");
    auto labeled = read_labels_jsonl(cfg.out("labels.jsonl").string());
    auto corpus = read_corpus_jsonl(cfg.corpus.string());
    auto models = train_from_labels(cfg, taxonomy, labeled, corpus);
    save_models(models, cfg);
    return models;
}

// Balanced per-group sample written as {"page", "label", "group"} rows.
inline std::size_t run_sample(const PipelineConfig& cfg) {
    auto taxonomy = load_pipeline_taxonomy(cfg);
    detail::require_file(cfg.out("labels.jsonl"), "labels.jsonl (run `label` first)");
    auto labeled = read_labels_jsonl(cfg.out("labels.jsonl").string());
    auto groups = training_groups(taxonomy, cfg.scheme);
    std::ofstream out(cfg.out("sample.jsonl"), std::ios::binary);
    if (!out) throw InputError("cannot write " + cfg.out("sample.jsonl").string());
    std::size_t rows = 0;
    for (const auto& g : groups) {
        std::set<std::string> members(g.labels.begin(), g.labels.end());
        std::vector<LabeledDoc> docs;
        for (std::size_t i = 0; i < labeled.size(); ++i)
            for (const auto& a : labeled[i].assignments)
                if (members.count(a.label)) docs.push_back({i, a.label});
        if (docs.empty()) continue;
        auto balanced = sample_balance(docs, cfg.samples_per_class(), derive_seed(cfg.seed, "sample/" + g.key));
        for (const auto& d : balanced.instances) {
            out << Json{{"page", labeled[d.doc].page}, {"label", d.label}, {"group", group_key_json(g.key)}}.dump()
                << '\n';
            ++rows;
        }
    }
    return rows;
}

// Gold labels may be given as label ids or display names.
inline std::vector<EvalInstance> load_eval_set(const fs::path& path, const Taxonomy& taxonomy) {
    detail::require_file(path, "evaluation set");
    auto data = read_eval_jsonl(path.string());
    auto resolve = [&](const std::string& s) {
        if (taxonomy.find(s)) return s;
        if (const auto* l = taxonomy.find_by_name(s)) return l->id;
        throw InputError("evaluation label '" + s + "' is not in the taxonomy");
    };
    for (auto& d : data) {
        for (auto& g : d.gold) g = resolve(g);
        if (d.parent) d.parent = resolve(*d.parent);
    }
    return data;
}

enum class ModelKind { Svm, Centroid, KeywordVoting };

inline std::string_view to_string(ModelKind k) {
    switch (k) {
        case ModelKind::Svm: return "svm";
        case ModelKind::Centroid: return "centroid";
        case ModelKind::KeywordVoting: return "kw_voting";
    }
    return "?";
}

inline ModelKind model_kind_from_string(std::string_view s) {
    if (s == "svm") return ModelKind::Svm;
    if (s == "centroid") return ModelKind::Centroid;
    if (s == "kw_voting" || s == "keyword") return ModelKind::KeywordVoting;
    throw InputError("unknown model '" + std::string(s) + "'");
}

// One classifier per group key; fine-grained evaluation routes each instance
// to its parent's group.
inline std::map<std::string, TextClassifier> classifiers_for(const TrainedModels& m, const Taxonomy& taxonomy,
                                                             ModelKind kind, std::uint64_t seed) {
    std::map<std::string, TextClassifier> out;
    for (const auto& g : m.groups) {
        switch (kind) {
            case ModelKind::Svm:
                if (auto it = m.svm.find(g.key); it != m.svm.end()) {
                    const auto* model = &it->second;
                    out[g.key] = [&m, model](const std::string& text) {
                        return TrainedModels::predict_with(*model, m.tfidf.transform(text));
                    };
                }
                break;
            case ModelKind::Centroid:
                if (auto it = m.centroid.find(g.key); it != m.centroid.end()) {
                    const auto* model = &it->second;
                    out[g.key] = [&m, model](const std::string& text) { return model->predict(m.tfidf.transform(text)); };
                }
                break;
            case ModelKind::KeywordVoting: {
                std::vector<std::pair<std::string, std::string>> names;
                for (const auto& l : g.labels) names.emplace_back(l, taxonomy.at(l).name);
                auto voter = std::make_shared<KeywordVoter>(std::move(names));
                const auto group_seed = derive_seed(seed, "kw/" + g.key);
                out[g.key] = [voter, group_seed](const std::string& text) { return voter->predict(text, group_seed); };
                break;
            }
        }
    }
    return out;
}

inline GroupedReport evaluate_models(const PipelineConfig& cfg, const TrainedModels& models, const Taxonomy& taxonomy,
                                     const std::vector<EvalInstance>& data, ModelKind kind) {
    return evaluate_grouped(data, classifiers_for(models, taxonomy, kind, cfg.seed), cfg.workers,
                            cfg.scheme == CompetitionScheme::Coarse);
}

inline Json run_evaluate(const PipelineConfig& cfg) {
    auto taxonomy = load_pipeline_taxonomy(cfg);
    auto models = load_models(cfg, taxonomy);
    auto data = load_eval_set(cfg.eval, taxonomy);
    Json reports = Json::object();
    for (auto kind : {ModelKind::Svm, ModelKind::Centroid, ModelKind::KeywordVoting})
        reports[std::string(to_string(kind))] = evaluate_models(cfg, models, taxonomy, data, kind).to_json();
    Json report{{"format", "wikicat-report/1"}, {"n", data.size()}, {"models", std::move(reports)}, {"config", cfg.echo()}};
    write_json_file(cfg.out("report.json").string(), report);
    return report;
}

// Predictions for eval-format input: {"index", "prediction"} per line.
inline std::vector<std::string> run_predict(const PipelineConfig& cfg, const fs::path& input, ModelKind kind,
                                            const fs::path& output) {
    auto taxonomy = load_pipeline_taxonomy(cfg);
    auto models = load_models(cfg, taxonomy);
    detail::require_file(input, "prediction input");
    std::vector<EvalInstance> data;
    for_each_jsonl(input.string(), [&](const Json& j, std::size_t) {
        EvalInstance e;
        e.text = j.at("text").get<std::string>();
        if (j.contains("parent") && !j.at("parent").is_null()) e.parent = j.at("parent").get<std::string>();
        data.push_back(std::move(e));
    });
    auto classifiers = classifiers_for(models, taxonomy, kind, cfg.seed);
    std::vector<std::string> preds(data.size());
    const bool coarse = cfg.scheme == CompetitionScheme::Coarse;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::string key = coarse ? std::string() : data[i].parent.value_or(std::string());
        auto it = classifiers.find(key);
        if (it == classifiers.end()) throw InputError("no model for parent '" + key + "'");
        preds[i] = it->second(data[i].text);
    }
    std::ofstream out(output, std::ios::binary);
    if (!out) throw InputError("cannot write " + output.string());
    for (std::size_t i = 0; i < preds.size(); ++i)
        out << Json{{"index", i}, {"prediction", preds[i]}, {"model", to_string(kind)}}.dump() << '\n';
    return preds;
}

// Label -> train SVM -> evaluate, once per labeling mode.
inline Json run_ablate(const PipelineConfig& cfg, const std::vector<LabelingMode>& modes = {std::begin(kAllModes),
                                                                                             std::end(kAllModes)}) {
    fs::create_directories(cfg.output_dir);
    auto graph = load_pipeline_graph(cfg);
    auto taxonomy = load_pipeline_taxonomy(cfg);
    detail::require_file(cfg.corpus, "corpus");
    auto corpus = read_corpus_jsonl(cfg.corpus.string());
    auto data = load_eval_set(cfg.eval, taxonomy);
    Json rows = Json::array();
    for (auto mode : modes) {
        PipelineConfig c = cfg;
        c.labeling.mode = mode;
        auto labeled = label_in_memory(c, graph, taxonomy);
        std::size_t n_labeled = 0;
        for (const auto& p : labeled.pages)
            if (!p.assignments.empty()) ++n_labeled;
        auto models = train_from_labels(c, taxonomy, labeled.pages, corpus);
        auto report = evaluate_models(c, models, taxonomy, data, ModelKind::Svm);
        rows.push_back({{"mode", to_string(mode)},
                        {"labeled_pages", n_labeled},
                        {"accuracy", report.aggregate.accuracy},
                        {"macro_f1", report.aggregate.macro_f1}});
    }
    Json out{{"format", "wikicat-ablation/1"}, {"model", "svm"}, {"rows", std::move(rows)}, {"config", cfg.echo()}};
    write_json_file(cfg.out("ablation.json").string(), out);
    return out;
}

}  // namespace wikicat
