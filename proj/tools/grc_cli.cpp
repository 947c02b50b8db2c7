// Command-line front end: run | sweep | baseline | synth | ablate.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "grc/grc.hpp"

namespace {

grc::CliOverrides make_overrides(const std::string& out, std::uint64_t seed,
                                 bool seed_set, int parallelism) {
    grc::CliOverrides ov;
    if (!out.empty()) ov.out_dir = out;
    if (seed_set) ov.seed = seed;
    if (parallelism > 0) ov.parallelism = parallelism;
    return ov;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric risk controller for generative OCR"};
    app.require_subcommand(1);

    std::string config_path, manifest_path, out_dir;
    std::uint64_t seed = 0;
    int parallelism = 0;
    int m = 3;
    std::vector<int> k_list;

    auto add_common = [&](CLI::App* cmd, bool needs_inputs = true) {
        if (needs_inputs) {
            cmd->add_option("--config", config_path, "Run config JSON")
                ->required()
                ->check(CLI::ExistingFile);
            cmd->add_option("--manifest", manifest_path, "Dataset manifest JSONL")
                ->required()
                ->check(CLI::ExistingFile);
        }
        cmd->add_option("--out", out_dir, "Output directory (overrides config)");
        cmd->add_option("--seed", seed, "Protocol seed (overrides config)");
        cmd->add_option("--parallelism", parallelism,
                        "Worker count (overrides config)");
    };

    CLI::App* run = app.add_subcommand("run", "Evaluate one operating point");
    add_common(run);
    run->add_option("--m", m, "Strictness index")->default_val(3);

    CLI::App* sweep =
        app.add_subcommand("sweep", "Operating-point or query-budget sweep");
    add_common(sweep);
    sweep->add_option("--m", m, "Strictness index for the K sweep")->default_val(3);
    sweep->add_option("--k-list", k_list,
                      "View counts for a query-budget sweep (omit for an m sweep)");

    CLI::App* baseline = app.add_subcommand(
        "baseline", "Coverage-matched confidence-threshold comparison");
    add_common(baseline);
    baseline->add_option("--m", m, "Target operating point")->default_val(3);

    CLI::App* ablate = app.add_subcommand("ablate", "Component ablation table");
    add_common(ablate);
    ablate->add_option("--m", m, "Strictness index")->default_val(3);

    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
    grc::SynthConfig synth_cfg;
    std::string synth_out = "synth_corpus";
    std::string conf_model = "overconfident";
    synth->add_option("--out", synth_out, "Corpus output directory");
    synth->add_option("--n", synth_cfg.n_samples, "Sample count")->default_val(500);
    synth->add_option("--seed", synth_cfg.seed, "Corpus seed")->default_val(7);
    synth->add_option("--p-overgen", synth_cfg.p_overgen,
                      "Over-generation probability");
    synth->add_option("--p-substitute", synth_cfg.p_substitute,
                      "Substitution probability");
    synth->add_option("--p-unstable", synth_cfg.p_unstable,
                      "Per-view instability probability");
    synth->add_option("--overgen-repeat", synth_cfg.overgen_repeat,
                      "Ground-truth repeats appended on over-generation");
    synth->add_option("--confidence-model", conf_model, "oracle | overconfident");
    synth->add_option("--glyph-scale", synth_cfg.glyph_scale, "Pixels per glyph cell");
    synth->add_option("--margin", synth_cfg.margin, "Background margin in cells");

    CLI11_PARSE(app, argc, argv);

    try {
        auto ov = make_overrides(out_dir, seed, app.count("--seed") ||
                                                    run->count("--seed") ||
                                                    sweep->count("--seed") ||
                                                    baseline->count("--seed") ||
                                                    ablate->count("--seed"),
                                 parallelism);
        if (run->parsed()) return grc::cmd_run(config_path, manifest_path, m, ov);
        if (sweep->parsed())
            return grc::cmd_sweep(config_path, manifest_path, k_list, m, ov);
        if (baseline->parsed())
            return grc::cmd_baseline(config_path, manifest_path, m, ov);
        if (ablate->parsed()) return grc::cmd_ablate(config_path, manifest_path, m, ov);
        if (synth->parsed()) {
            synth_cfg.confidence_model = grc::confidence_model_from_string(conf_model);
            return grc::cmd_synth(synth_cfg, synth_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
