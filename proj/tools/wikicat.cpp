// wikicat: command-line front end for the labeling and classification pipeline.
//
//   wikicat <build-graph|map|label|sample|train|predict|evaluate|ablate> --config cfg.json [options]
//
// Exit codes: 0 ok, 2 input or validation error, 3 internal error.

#include "wikicat/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::string> mode;
    std::optional<std::string> scheme;
    std::optional<std::string> out;
    // predict
    std::string input;
    std::string output;
    std::string model = "svm";
    // ablate
    std::vector<std::string> modes;
};

wikicat::PipelineConfig resolve(const Options& o) {
    auto cfg = wikicat::PipelineConfig::load(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (o.workers) {
        if (*o.workers == 0) throw wikicat::ConfigError("--workers must be at least 1");
        cfg.workers = *o.workers;
    }
    if (o.mode) cfg.labeling.mode = wikicat::labeling_mode_from_string(*o.mode);
    if (o.scheme) cfg.scheme = wikicat::scheme_from_string(*o.scheme);
    if (o.out) cfg.output_dir = *o.out;
    cfg.labeling.validate();
    return cfg;
}

void log(const std::string& msg) { std::cerr << "wikicat: " << msg << '\n'; }

int run(const std::string& command, const Options& o) {
    using namespace wikicat;
    auto cfg = resolve(o);
    std::filesystem::create_directories(cfg.output_dir);
    if (command == "build-graph") {
        auto s = run_build_graph(cfg);
        log("graph: " + std::to_string(s.categories) + " categories, " + std::to_string(s.pages) + " pages, " +
            std::to_string(s.edges()) + " edges, " + std::to_string(s.dropped_edges) + " dropped");
    } else if (command == "map") {
        auto m = run_map(cfg);
        log("mapped " + std::to_string(m.mapped.size()) + " labels, " + std::to_string(m.unmapped.size()) + " unmapped");
    } else if (command == "label") {
        auto c = run_label(cfg);
        log("labeled corpus: " + std::to_string(c.pages.size()) + " candidate pages (" +
            std::string(to_string(cfg.labeling.mode)) + ")");
    } else if (command == "sample") {
        log("sampled " + std::to_string(run_sample(cfg)) + " instances");
    } else if (command == "train") {
        auto m = run_train(cfg);
        log("trained " + std::to_string(m.svm.size()) + " group models, vocabulary " +
            std::to_string(m.tfidf.vocab_size()));
    } else if (command == "predict") {
        std::filesystem::path output = o.output.empty() ? cfg.out("predictions.jsonl") : std::filesystem::path(o.output);
        auto p = run_predict(cfg, o.input.empty() ? cfg.eval : std::filesystem::path(o.input),
                             model_kind_from_string(o.model), output);
        log("wrote " + std::to_string(p.size()) + " predictions to " + output.string());
    } else if (command == "evaluate") {
        auto r = run_evaluate(cfg);
        for (const auto& [name, rep] : r.at("models").items())
            log(name + ": accuracy " + std::to_string(rep.at("aggregate").at("accuracy").get<double>()) +
                ", macro-F1 " + std::to_string(rep.at("aggregate").at("macro_f1").get<double>()));
    } else if (command == "ablate") {
        std::vector<LabelingMode> modes;
        for (const auto& m : o.modes) modes.push_back(labeling_mode_from_string(m));
        if (modes.empty()) modes.assign(std::begin(kAllModes), std::end(kAllModes));
        auto r = run_ablate(cfg, modes);
        for (const auto& row : r.at("rows"))
            log(row.at("mode").get<std::string>() + ": macro-F1 " + std::to_string(row.at("macro_f1").get<double>()));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Taxonomy-driven weak labeling over a category graph"};
    app.require_subcommand(1);
    Options o;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"build-graph", "Load the graph files and write a binary snapshot plus stats"},
        {"map", "Map taxonomy labels onto categories"},
        {"label", "Label pages by competing graph traversal"},
        {"sample", "Write a class-balanced training sample"},
        {"train", "Train tf-idf, linear SVM and centroid models"},
        {"predict", "Classify texts with a trained model"},
        {"evaluate", "Evaluate all models against the gold set"},
        {"ablate", "Label, train and evaluate once per labeling mode"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config, "Pipeline config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "Override the config seed");
        sub->add_option("--workers", o.workers, "Worker threads (default: all processors)");
        sub->add_option("--out", o.out, "Override the output directory");
        sub->add_option("--scheme", o.scheme, "coarse or fine");
        sub->add_option("--mode", o.mode, "full|child_only|all_descendants|min_dist|no_pruning");
        if (name == "predict") {
            sub->add_option("--input", o.input, "JSONL with a \"text\" field (default: the eval set)");
            sub->add_option("--output", o.output, "Predictions file (default: <out>/predictions.jsonl)");
            sub->add_option("--model", o.model, "svm|centroid|kw_voting");
        }
        if (name == "ablate") sub->add_option("--modes", o.modes, "Modes to compare (default: all)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, o);
    } catch (const wikicat::InputError& e) {
        std::cerr << "wikicat: error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "wikicat: error: malformed JSON input: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "wikicat: internal error: " << e.what() << '\n';
        return 3;
    }
}
