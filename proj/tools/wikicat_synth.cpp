// wikicat_synth: writes the synthetic data sets used by the scale smoke test
// and the labeling-mode ablation.
//
//   wikicat_synth scale --out DIR [--categories N --pages N --edges N --roots N --seed S]
//   wikicat_synth ablation --out DIR [--seed S]

#include "wikicat/synthetic.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Synthetic category graphs for wikicat"};
    app.require_subcommand(1);

    wikicat::synthetic::ScaleSpec scale;
    std::string out;
    auto* s = app.add_subcommand("scale", "Large random category graph with cycles");
    s->add_option("--out", out)->required();
    s->add_option("--categories", scale.categories);
    s->add_option("--pages", scale.pages);
    s->add_option("--edges", scale.edges);
    s->add_option("--roots", scale.roots);
    s->add_option("--seed", scale.seed);

    wikicat::synthetic::AblationSpec ablation;
    auto* a = app.add_subcommand("ablation", "Three-topic wiki with weakly attached distractor pages");
    a->add_option("--out", out)->required();
    a->add_option("--seed", ablation.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        if (s->parsed())
            wikicat::synthetic::write_scale_graph(scale, out);
        else
            wikicat::synthetic::write_ablation_wiki(ablation, out);
    } catch (const std::exception& e) {
        std::cerr << "wikicat_synth: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
