#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grc/config.hpp"
#include "grc/evaluation.hpp"
#include "grc/image_io.hpp"
#include "grc/manifest.hpp"
#include "grc/synth.hpp"

namespace grc {

// ---------------------------------------------------------------------------
// Record and report serialization. Key order is alphabetical (nlohmann
// object storage), so emitted bytes are deterministic for identical inputs.

inline void to_json(nlohmann::json& j, const EvidenceSummary& s) {
    j = nlohmann::json{{"n_valid", s.n_valid}, {"mode_unique", s.mode_unique}};
    j["mode"] = s.mode ? nlohmann::json(*s.mode) : nlohmann::json();
    j["vote_fraction"] =
        s.vote_fraction ? nlohmann::json(*s.vote_fraction) : nlohmann::json();
    j["dispersion"] = s.dispersion ? nlohmann::json(*s.dispersion) : nlohmann::json();
}

inline void to_json(nlohmann::json& j, const Decision& d) {
    j = nlohmann::json{{"outcome", d.accepted ? "accept" : "abstain"},
                       {"reason", to_string(d.reason)},
                       {"summary", d.summary}};
    j["transcript"] = d.transcript ? nlohmann::json(*d.transcript) : nlohmann::json();
}

inline void to_json(nlohmann::json& j, const RunRecord& r) {
    j = nlohmann::json{{"source_id", r.source_id}, {"decision", r.decision}};
    j["cer"] = r.cer ? nlohmann::json(*r.cer) : nlohmann::json();
    if (r.baseline_text) j["baseline_text"] = *r.baseline_text;
    if (r.baseline_confidence) j["baseline_confidence"] = *r.baseline_confidence;
    if (!r.error.empty()) j["error"] = r.error;
}

inline void to_json(nlohmann::json& j, const ReportRow& r) {
    j = nlohmann::json{{"label", r.label},
                       {"n_total", r.n_total},
                       {"n_covered", r.n_covered},
                       {"coverage_pct", r.coverage_pct}};
    j["cer_mean_pct"] = r.cer_mean_pct ? nlohmann::json(*r.cer_mean_pct) : nlohmann::json();
    j["cer_p99_pct"] = r.cer_p99_pct ? nlohmann::json(*r.cer_p99_pct) : nlohmann::json();
    j["meltdown_permille"] =
        r.meltdown_permille ? nlohmann::json(*r.meltdown_permille) : nlohmann::json();
    if (r.m) j["m"] = *r.m;
    if (r.k) j["k"] = *r.k;
    if (r.backend_calls_per_sample)
        j["backend_calls_per_sample"] = *r.backend_calls_per_sample;
    if (r.relative_calls) j["relative_calls"] = *r.relative_calls;
}

inline void write_records_jsonl(const std::vector<RunRecord>& records,
                                const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write records file: " + path);
    for (const RunRecord& r : records) {
        nlohmann::json j = r;
        out << j.dump() << "\n";
    }
}

namespace detail {

inline std::string csv_num(std::optional<double> v) {
    if (!v) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", *v);
    return buf;
}

inline std::string label_file_part(std::string label) {
    std::string out;
    for (char c : label)
        if (c != '=' && c != ' ') out.push_back(c);
    return out;
}

}  // namespace detail

/// Plot-ready trajectory: coverage on x, covered-risk columns on y.
inline void write_trajectory_csv(const std::vector<ReportRow>& rows,
                                 const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write trajectory file: " + path);
    out << "label,m,k,n_total,n_covered,coverage_pct,cer_mean_pct,cer_p99_pct,"
           "meltdown_permille,calls_per_sample,relative_calls\n";
    for (const ReportRow& r : rows) {
        out << r.label << ',' << (r.m ? std::to_string(*r.m) : "NA") << ','
            << (r.k ? std::to_string(*r.k) : "NA") << ',' << r.n_total << ','
            << r.n_covered << ',' << detail::csv_num(r.coverage_pct) << ','
            << detail::csv_num(r.cer_mean_pct) << ','
            << detail::csv_num(r.cer_p99_pct) << ','
            << detail::csv_num(r.meltdown_permille) << ','
            << detail::csv_num(r.backend_calls_per_sample) << ','
            << detail::csv_num(r.relative_calls) << "\n";
    }
}

inline std::string row_to_line(const ReportRow& r) {
    char buf[256];
    auto fmt = [](std::optional<double> v) {
        if (!v) return std::string("n/a");
        char b[32];
        std::snprintf(b, sizeof(b), "%.2f", *v);
        return std::string(b);
    };
    std::snprintf(buf, sizeof(buf),
                  "%-14s n=%zu covered=%zu cov=%.1f%% cer_mean=%s%% cer_p99=%s%% "
                  "md=%s permille",
                  r.label.c_str(), r.n_total, r.n_covered, r.coverage_pct,
                  fmt(r.cer_mean_pct).c_str(), fmt(r.cer_p99_pct).c_str(),
                  fmt(r.meltdown_permille).c_str());
    std::string line(buf);
    if (r.backend_calls_per_sample) {
        std::snprintf(buf, sizeof(buf), " calls/sample=%.2f",
                      *r.backend_calls_per_sample);
        line += buf;
    }
    return line;
}

struct CliOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> parallelism;
};

namespace detail {

struct HarnessContext {
    RunConfig cfg;
    Manifest manifest;
    std::vector<LabeledSample> samples;
    std::shared_ptr<Generator> backend;
};

inline HarnessContext load_context(const std::string& config_path,
                                   const std::string& manifest_path,
                                   const CliOverrides& ov) {
    HarnessContext ctx;
    ctx.cfg = load_run_config(config_path);
    if (ov.out_dir) ctx.cfg.output_dir = *ov.out_dir;
    if (ov.seed) ctx.cfg.protocol.seed = *ov.seed;
    if (ov.parallelism) ctx.cfg.parallelism = *ov.parallelism;
    ctx.cfg.validate();
    ctx.manifest = load_manifest(manifest_path, ctx.cfg.protocol.case_insensitive);
    if (ctx.manifest.entries.empty())
        throw Error("manifest has no entries: " + manifest_path);
    ctx.samples = load_samples(ctx.manifest);
    ctx.backend = make_backend(ctx.cfg.backend);
    return ctx;
}

inline nlohmann::json report_skeleton(const HarnessContext& ctx,
                                      const std::string& command) {
    return nlohmann::json{{"command", command},
                          {"dataset", ctx.manifest.dataset_name},
                          {"backend", ctx.backend->identity()},
                          {"n_samples", ctx.samples.size()},
                          {"meltdown_delta", ctx.cfg.meltdown_delta}};
}

inline void write_report(const nlohmann::json& report, const std::string& dir) {
    std::ofstream out(std::filesystem::path(dir) / "report.json");
    if (!out) throw Error("cannot write report.json in " + dir);
    out << report.dump(2) << "\n";
}

inline bool any_record_error(const std::vector<RunRecord>& records) {
    for (const RunRecord& r : records)
        if (!r.error.empty()) return true;
    return false;
}

}  // namespace detail

/// Evaluate one operating point and write records.jsonl + report.json.
inline int cmd_run(const std::string& config_path, const std::string& manifest_path,
                   int m, const CliOverrides& ov = {}) {
    auto ctx = detail::load_context(config_path, manifest_path, ov);
    OperatingPoint op = operating_point_for(m, ctx.cfg.operating_points);
    Gateway gateway(ctx.backend, ctx.cfg.cache_enabled);
    std::string label = std::string(to_string(ctx.cfg.ablation)) + " m=" +
                        std::to_string(op.m);
    auto [records, row] = evaluate(ctx.samples, ctx.cfg.protocol, ctx.cfg.length_bound,
                                   gateway, op, ctx.cfg.ablation, label,
                                   ctx.cfg.parallelism, ctx.cfg.meltdown_delta);
    row.m = op.m;
    row.backend_calls_per_sample = static_cast<double>(gateway.backend_calls()) /
                                   static_cast<double>(ctx.samples.size());
    std::filesystem::create_directories(ctx.cfg.output_dir);
    write_records_jsonl(records,
                        (std::filesystem::path(ctx.cfg.output_dir) / "records.jsonl")
                            .string());
    nlohmann::json report = detail::report_skeleton(ctx, "run");
    report["rows"] = std::vector<ReportRow>{row};
    detail::write_report(report, ctx.cfg.output_dir);
    std::cout << row_to_line(row) << "\n";
    return detail::any_record_error(records) ? 1 : 0;
}

/// Operating-point sweep (k_list empty) or query-budget sweep over the given
/// view counts. Writes report.json, trajectory.csv and per-row records.
inline int cmd_sweep(const std::string& config_path, const std::string& manifest_path,
                     const std::vector<int>& k_list = {}, int m_for_k_sweep = 3,
                     const CliOverrides& ov = {}) {
    auto ctx = detail::load_context(config_path, manifest_path, ov);
    std::filesystem::create_directories(ctx.cfg.output_dir);
    std::vector<ReportRow> rows;
    bool had_errors = false;
    const auto n = static_cast<double>(ctx.samples.size());

    if (k_list.empty()) {
        // Risk-coverage sweep over the configured family. One shared gateway:
        // with caching on, later rows reuse all earlier view queries.
        Gateway gateway(ctx.backend, ctx.cfg.cache_enabled);
        {
            std::uint64_t before = gateway.backend_calls();
            auto [records, row] = evaluate(
                ctx.samples, ctx.cfg.protocol, ctx.cfg.length_bound, gateway,
                ctx.cfg.operating_points.front(), Ablation::AlwaysAccept, "baseline",
                ctx.cfg.parallelism, ctx.cfg.meltdown_delta);
            row.backend_calls_per_sample =
                static_cast<double>(gateway.backend_calls() - before) / n;
            had_errors |= detail::any_record_error(records);
            write_records_jsonl(records, (std::filesystem::path(ctx.cfg.output_dir) /
                                          "records_baseline.jsonl")
                                             .string());
            rows.push_back(std::move(row));
        }
        for (const OperatingPoint& op : ctx.cfg.operating_points) {
            std::uint64_t before = gateway.backend_calls();
            auto [records, row] = evaluate(
                ctx.samples, ctx.cfg.protocol, ctx.cfg.length_bound, gateway, op,
                Ablation::Full, "m=" + std::to_string(op.m), ctx.cfg.parallelism,
                ctx.cfg.meltdown_delta);
            row.m = op.m;
            row.backend_calls_per_sample =
                static_cast<double>(gateway.backend_calls() - before) / n;
            had_errors |= detail::any_record_error(records);
            write_records_jsonl(
                records,
                (std::filesystem::path(ctx.cfg.output_dir) /
                 ("records_" + detail::label_file_part(row.label) + ".jsonl"))
                    .string());
            rows.push_back(std::move(row));
        }
        nlohmann::json report = detail::report_skeleton(ctx, "sweep_m");
        report["k_views"] = ctx.cfg.protocol.k_views;
        report["total_backend_calls"] = gateway.backend_calls();
        report["cache"] = ctx.cfg.cache_enabled;
        report["rows"] = rows;
        detail::write_report(report, ctx.cfg.output_dir);
    } else {
        // Query-budget sweep at fixed m. Every row gets a fresh gateway so
        // per-row backend-call counts are honest measurements.
        OperatingPoint op = operating_point_for(m_for_k_sweep, ctx.cfg.operating_points);
        double baseline_calls = 0;
        std::uint64_t total_calls = 0;
        {
            Gateway gateway(ctx.backend, ctx.cfg.cache_enabled);
            auto [records, row] = evaluate(
                ctx.samples, ctx.cfg.protocol, ctx.cfg.length_bound, gateway, op,
                Ablation::AlwaysAccept, "baseline", ctx.cfg.parallelism,
                ctx.cfg.meltdown_delta);
            baseline_calls = static_cast<double>(gateway.backend_calls()) / n;
            row.backend_calls_per_sample = baseline_calls;
            row.relative_calls = 1.0;
            total_calls += gateway.backend_calls();
            had_errors |= detail::any_record_error(records);
            write_records_jsonl(records, (std::filesystem::path(ctx.cfg.output_dir) /
                                          "records_baseline.jsonl")
                                             .string());
            rows.push_back(std::move(row));
        }
        for (int k : k_list) {
            ProtocolConfig protocol = ctx.cfg.protocol;
            protocol.k_views = k;
            Gateway gateway(ctx.backend, ctx.cfg.cache_enabled);
            auto [records, row] =
                evaluate(ctx.samples, protocol, ctx.cfg.length_bound, gateway, op,
                         Ablation::Full, "k=" + std::to_string(k),
                         ctx.cfg.parallelism, ctx.cfg.meltdown_delta);
            row.m = op.m;
            row.k = k;
            row.backend_calls_per_sample =
                static_cast<double>(gateway.backend_calls()) / n;
            row.relative_calls = *row.backend_calls_per_sample / baseline_calls;
            total_calls += gateway.backend_calls();
            had_errors |= detail::any_record_error(records);
            write_records_jsonl(
                records,
                (std::filesystem::path(ctx.cfg.output_dir) /
                 ("records_" + detail::label_file_part(row.label) + ".jsonl"))
                    .string());
            rows.push_back(std::move(row));
        }
        nlohmann::json report = detail::report_skeleton(ctx, "sweep_k");
        report["m"] = op.m;
        report["total_backend_calls"] = total_calls;
        report["cache"] = ctx.cfg.cache_enabled;
        report["rows"] = rows;
        detail::write_report(report, ctx.cfg.output_dir);
    }

    write_trajectory_csv(
        rows, (std::filesystem::path(ctx.cfg.output_dir) / "trajectory.csv").string());
    for (const ReportRow& r : rows) std::cout << row_to_line(r) << "\n";
    return had_errors ? 1 : 0;
}

/// Coverage-matched confidence-threshold baseline: calibrate the threshold
/// on the held-out split against GRC's coverage at target_m, then compare
/// both selective systems on the remainder.
inline int cmd_baseline(const std::string& config_path,
                        const std::string& manifest_path, int target_m,
                        const CliOverrides& ov = {}) {
    auto ctx = detail::load_context(config_path, manifest_path, ov);
    OperatingPoint op = operating_point_for(target_m, ctx.cfg.operating_points);
    auto [held, rest] = split_heldout(ctx.samples, ctx.cfg.heldout_fraction);
    if (held.empty() || rest.empty())
        throw Error("held-out split produced an empty part; adjust heldout_fraction");
    Gateway gateway(ctx.backend, ctx.cfg.cache_enabled);

    auto [held_grc_records, held_grc_row] =
        evaluate(held, ctx.cfg.protocol, ctx.cfg.length_bound, gateway, op,
                 Ablation::Full, "grc_heldout", ctx.cfg.parallelism,
                 ctx.cfg.meltdown_delta);
    double target_coverage = held_grc_row.coverage_pct / 100.0;
    if (target_coverage <= 0.0)
        throw Error("GRC covered nothing on the held-out split; cannot calibrate");

    auto [held_conf_records, held_conf_row] = evaluate_confidence_baseline(
        held, ctx.cfg.protocol, gateway, -std::numeric_limits<double>::infinity(),
        "conf_heldout", ctx.cfg.parallelism, ctx.cfg.meltdown_delta);
    double threshold = calibrate_confidence_threshold(held_conf_records, target_coverage);

    auto [grc_records, grc_row] =
        evaluate(rest, ctx.cfg.protocol, ctx.cfg.length_bound, gateway, op,
                 Ablation::Full, "grc m=" + std::to_string(op.m),
                 ctx.cfg.parallelism, ctx.cfg.meltdown_delta);
    grc_row.m = op.m;
    auto [conf_records, conf_row] = evaluate_confidence_baseline(
        rest, ctx.cfg.protocol, gateway, threshold, "conf_thr", ctx.cfg.parallelism,
        ctx.cfg.meltdown_delta);

    std::filesystem::create_directories(ctx.cfg.output_dir);
    write_records_jsonl(
        grc_records,
        (std::filesystem::path(ctx.cfg.output_dir) / "records_grc.jsonl").string());
    write_records_jsonl(conf_records, (std::filesystem::path(ctx.cfg.output_dir) /
                                       "records_conf_thr.jsonl")
                                          .string());
    nlohmann::json report = detail::report_skeleton(ctx, "baseline");
    report["target_m"] = op.m;
    report["heldout_fraction"] = ctx.cfg.heldout_fraction;
    report["n_heldout"] = held.size();
    report["n_test"] = rest.size();
    report["heldout_grc_coverage_pct"] = held_grc_row.coverage_pct;
    report["confidence_threshold"] = threshold;
    report["rows"] = std::vector<ReportRow>{grc_row, conf_row};
    detail::write_report(report, ctx.cfg.output_dir);
    std::cout << row_to_line(grc_row) << "\n" << row_to_line(conf_row) << "\n";
    return detail::any_record_error(grc_records) ||
                   detail::any_record_error(conf_records)
               ? 1
               : 0;
}

/// Component comparison at one operating point: Full, NoStructural,
/// NoConsensus and AlwaysAccept on the same manifest.
inline int cmd_ablate(const std::string& config_path,
                      const std::string& manifest_path, int m,
                      const CliOverrides& ov = {}) {
    auto ctx = detail::load_context(config_path, manifest_path, ov);
    OperatingPoint op = operating_point_for(m, ctx.cfg.operating_points);
    Gateway gateway(ctx.backend, ctx.cfg.cache_enabled);
    std::filesystem::create_directories(ctx.cfg.output_dir);
    std::vector<ReportRow> rows;
    bool had_errors = false;
    for (Ablation ablation : {Ablation::Full, Ablation::NoStructural,
                              Ablation::NoConsensus, Ablation::AlwaysAccept}) {
        auto [records, row] =
            evaluate(ctx.samples, ctx.cfg.protocol, ctx.cfg.length_bound, gateway, op,
                     ablation, to_string(ablation), ctx.cfg.parallelism,
                     ctx.cfg.meltdown_delta);
        row.m = op.m;
        had_errors |= detail::any_record_error(records);
        write_records_jsonl(records,
                            (std::filesystem::path(ctx.cfg.output_dir) /
                             ("records_" + detail::label_file_part(row.label) + ".jsonl"))
                                .string());
        rows.push_back(std::move(row));
    }
    nlohmann::json report = detail::report_skeleton(ctx, "ablate");
    report["m"] = op.m;
    report["rows"] = rows;
    detail::write_report(report, ctx.cfg.output_dir);
    for (const ReportRow& r : rows) std::cout << row_to_line(r) << "\n";
    return had_errors ? 1 : 0;
}

/// Generate a synthetic corpus: rendered crops, manifest, scripted backend
/// spec, and a ready-to-run config wired to them.
inline int cmd_synth(const SynthConfig& synth_cfg, const std::string& out_dir) {
    SynthCorpus corpus = make_synth_corpus(synth_cfg);
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir / "images");
    Manifest manifest;
    manifest.dataset_name = "synthetic";
    for (std::size_t i = 0; i < corpus.source_ids.size(); ++i) {
        std::filesystem::path img = dir / "images" / (corpus.source_ids[i] + ".png");
        save_image(corpus.images[i], img.string());
        manifest.entries.push_back(
            {corpus.source_ids[i], img.string(), corpus.labels[i]});
    }
    write_manifest(manifest, (dir / "manifest.jsonl").string());
    save_scripted_spec(corpus.scripted_spec, (dir / "scripted_spec.json").string());

    RunConfig run_cfg;
    run_cfg.protocol.seed = synth_cfg.seed;
    run_cfg.backend.kind = "scripted";
    run_cfg.backend.spec_path = "scripted_spec.json";
    run_cfg.output_dir = "out";
    save_run_config(run_cfg, (dir / "config.json").string());
    std::cout << "synthesized " << corpus.source_ids.size() << " crops in "
              << out_dir << "\n";
    return 0;
}

}  // namespace grc
