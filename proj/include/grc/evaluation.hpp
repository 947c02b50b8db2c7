#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grc/consensus.hpp"
#include "grc/controller.hpp"
#include "grc/errors.hpp"
#include "grc/generator.hpp"

namespace grc {

/// One labeled evaluation input. Ground truth is stored canonicalized under
/// the task's case rule and is never empty.
struct LabeledSample {
    std::string source_id;
    CropImage image;
    std::string ground_truth;
};

/// One sample's end-to-end outcome, the atom of all metrics. cer is present
/// iff the decision exposed a transcript; baseline_* fields are used by the
/// confidence-threshold baseline path.
struct RunRecord {
    std::string source_id;
    Decision decision;
    std::optional<double> cer;
    std::optional<std::string> baseline_text;
    std::optional<double> baseline_confidence;
    std::string error;
};

/// Aggregated metrics over one run. Risk metrics are computed on the covered
/// subset only and are absent when nothing was covered (an all-abstain run
/// has undefined conditional risk). Percentages and per-mille conversion
/// happen here, at the reporting boundary.
struct ReportRow {
    std::string label;
    std::size_t n_total = 0;
    std::size_t n_covered = 0;
    double coverage_pct = 0.0;
    std::optional<double> cer_mean_pct;
    std::optional<double> cer_p99_pct;
    std::optional<double> meltdown_permille;
    std::optional<int> m;
    std::optional<int> k;
    std::optional<double> backend_calls_per_sample;
    std::optional<double> relative_calls;  // vs. the single-pass baseline
};

/// Character error rate: Levenshtein distance over ground-truth length,
/// both strings canonicalized under the run's case rule. Over-generation can
/// push it above 1.
inline double cer(const std::string& prediction, const std::string& ground_truth,
                  bool case_insensitive) {
    CanonicalTranscript p = canonicalize(prediction, case_insensitive);
    CanonicalTranscript g = canonicalize(ground_truth, case_insensitive);
    if (g.char_length == 0)
        throw EmptyGroundTruthError("cer: ground truth is empty after canonicalization");
    return static_cast<double>(edit_distance(p.text, g.text)) /
           static_cast<double>(g.char_length);
}

inline double coverage(const std::vector<RunRecord>& records) {
    if (records.empty()) throw EmptyRecordSetError("coverage of an empty record set");
    std::size_t covered = 0;
    for (const RunRecord& r : records)
        if (r.decision.accepted) ++covered;
    return static_cast<double>(covered) / static_cast<double>(records.size());
}

inline std::vector<double> covered_cers(const std::vector<RunRecord>& records) {
    std::vector<double> out;
    for (const RunRecord& r : records)
        if (r.decision.accepted && r.cer) out.push_back(*r.cer);
    return out;
}

/// Conditional catastrophic exposure: the fraction of covered records with
/// CER >= delta (inclusive boundary).
inline double meltdown_at(const std::vector<RunRecord>& records, double delta) {
    std::vector<double> cers = covered_cers(records);
    if (cers.empty())
        throw NoCoveredRecordsError("meltdown over a run with no covered records");
    std::size_t hits = 0;
    for (double c : cers)
        if (c >= delta) ++hits;
    return static_cast<double>(hits) / static_cast<double>(cers.size());
}

/// Nearest-rank percentile: element ceil(p*n) (1-based) of the ascending
/// sort, clamped to [1, n].
inline double percentile_nearest_rank(std::vector<double> values, double p) {
    if (values.empty()) throw EmptyRecordSetError("percentile of an empty list");
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(
        std::ceil(p * static_cast<double>(values.size())));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

inline double percentile_p99(const std::vector<double>& values) {
    return percentile_nearest_rank(values, 0.99);
}

/// Fold records into one report row. Records are re-sorted by source_id so
/// aggregation is independent of worker scheduling.
inline ReportRow make_report_row(std::string label, std::vector<RunRecord>& records,
                                 double meltdown_delta = 2.0) {
    std::sort(records.begin(), records.end(),
              [](const RunRecord& a, const RunRecord& b) {
                  return a.source_id < b.source_id;
              });
    ReportRow row;
    row.label = std::move(label);
    row.n_total = records.size();
    std::vector<double> cers = covered_cers(records);
    row.n_covered = cers.size();
    row.coverage_pct = records.empty()
                           ? 0.0
                           : 100.0 * static_cast<double>(row.n_covered) /
                                 static_cast<double>(row.n_total);
    if (!cers.empty()) {
        double sum = 0;
        for (double c : cers) sum += c;
        row.cer_mean_pct = 100.0 * sum / static_cast<double>(cers.size());
        row.cer_p99_pct = 100.0 * percentile_p99(cers);
        row.meltdown_permille = 1000.0 * meltdown_at(records, meltdown_delta);
    }
    return row;
}

/// Run the controller over a labeled dataset. Per-sample failures land in
/// the record's error field without aborting the run. Samples are processed
/// by up to `parallelism` workers; output order and aggregation are
/// deterministic regardless of scheduling.
inline std::pair<std::vector<RunRecord>, ReportRow> evaluate(
    const std::vector<LabeledSample>& dataset, const ProtocolConfig& protocol,
    const LengthBoundParams& length_params, Gateway& gateway,
    const OperatingPoint& op, Ablation ablation, const std::string& label,
    int parallelism = 1, double meltdown_delta = 2.0) {
    if (dataset.empty()) throw EmptyRecordSetError("evaluate: empty dataset");
    std::vector<RunRecord> records(dataset.size());
    auto run_one = [&](std::size_t i) {
        RunRecord& rec = records[i];
        rec.source_id = dataset[i].source_id;
        try {
            rec.decision = run_pipeline(dataset[i].image, protocol, gateway,
                                        length_params, op, ablation);
            if (rec.decision.accepted)
                rec.cer = cer(*rec.decision.transcript, dataset[i].ground_truth,
                              protocol.case_insensitive);
        } catch (const std::exception& e) {
            rec.decision = Decision{};
            rec.error = e.what();
        }
    };
    if (parallelism <= 1 || dataset.size() <= 1) {
        for (std::size_t i = 0; i < dataset.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < dataset.size();
                 i = next.fetch_add(1))
                run_one(i);
        };
        std::vector<std::future<void>> pool;
        int n = std::min<int>(parallelism, static_cast<int>(dataset.size()));
        for (int w = 0; w < n; ++w)
            pool.push_back(std::async(std::launch::async, worker));
        for (auto& f : pool) f.get();
    }
    ReportRow row = make_report_row(label, records, meltdown_delta);
    return {std::move(records), std::move(row)};
}

/// Risk-coverage sweep: an always-accept baseline row followed by one row
/// per operating point, all through the same gateway so anchor queries are
/// reused when caching is on. Coverage is nonincreasing in m by
/// construction of the family.
inline std::vector<ReportRow> sweep_operating_points(
    const std::vector<LabeledSample>& dataset, const ProtocolConfig& protocol,
    const LengthBoundParams& length_params, Gateway& gateway,
    const std::vector<OperatingPoint>& family, int parallelism = 1,
    double meltdown_delta = 2.0) {
    validate_family(family);
    std::vector<ReportRow> rows;
    const auto n = static_cast<double>(dataset.size());
    {
        std::uint64_t before = gateway.backend_calls();
        auto [records, row] =
            evaluate(dataset, protocol, length_params, gateway, family.front(),
                     Ablation::AlwaysAccept, "baseline", parallelism, meltdown_delta);
        row.backend_calls_per_sample =
            static_cast<double>(gateway.backend_calls() - before) / n;
        rows.push_back(std::move(row));
    }
    for (const OperatingPoint& op : family) {
        std::uint64_t before = gateway.backend_calls();
        auto [records, row] =
            evaluate(dataset, protocol, length_params, gateway, op, Ablation::Full,
                     "m=" + std::to_string(op.m), parallelism, meltdown_delta);
        row.m = op.m;
        row.backend_calls_per_sample =
            static_cast<double>(gateway.backend_calls() - before) / n;
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Deterministic held-out split on the source_id hash; returns (held-out,
/// remainder). Independent of dataset order and of any seed.
inline std::pair<std::vector<LabeledSample>, std::vector<LabeledSample>>
split_heldout(const std::vector<LabeledSample>& dataset, double heldout_fraction) {
    std::vector<LabeledSample> held, rest;
    auto cut = static_cast<std::uint64_t>(heldout_fraction * 10000.0);
    for (const LabeledSample& s : dataset) {
        if (fnv1a64(s.source_id) % 10000 < cut)
            held.push_back(s);
        else
            rest.push_back(s);
    }
    return {std::move(held), std::move(rest)};
}

/// Smallest-coverage-at-least-target quantile threshold: the largest
/// observed confidence t such that the held-out fraction with confidence
/// >= t reaches target_coverage.
inline double calibrate_confidence_threshold(const std::vector<RunRecord>& heldout,
                                             double target_coverage) {
    if (!(target_coverage > 0.0 && target_coverage <= 1.0))
        throw Error("calibrate: target coverage must be in (0, 1]");
    std::vector<double> confs;
    for (const RunRecord& r : heldout)
        if (r.baseline_confidence) confs.push_back(*r.baseline_confidence);
    if (confs.empty())
        throw NoConfidenceSignalError(
            "calibrate: no held-out record carries a confidence value");
    std::sort(confs.begin(), confs.end(), std::greater<>());
    const auto n = static_cast<double>(confs.size());
    for (std::size_t i = 0; i < confs.size(); ++i) {
        // confs[i] is the smallest value in the top i+1; threshold confs[i]
        // passes everything >= it.
        std::size_t passing = i + 1;
        while (passing < confs.size() && confs[passing] == confs[i]) ++passing;
        if (static_cast<double>(passing) / n >= target_coverage) return confs[i];
    }
    return confs.back();
}

/// The single-view confidence-threshold selective baseline: query the anchor
/// only, accept iff the backend's mean token log-probability clears the
/// threshold. Canonicalization matches the controlled system.
inline std::pair<std::vector<RunRecord>, ReportRow> evaluate_confidence_baseline(
    const std::vector<LabeledSample>& dataset, const ProtocolConfig& protocol,
    Gateway& gateway, double threshold, const std::string& label,
    int parallelism = 1, double meltdown_delta = 2.0) {
    if (dataset.empty()) throw EmptyRecordSetError("baseline: empty dataset");
    std::vector<RunRecord> records(dataset.size());
    auto run_one = [&](std::size_t i) {
        RunRecord& rec = records[i];
        rec.source_id = dataset[i].source_id;
        try {
            GeneratorQuery q;
            q.image = &dataset[i].image;
            q.prompt = protocol.prompt_template;
            q.view_index = 1;
            GeneratorReply reply = gateway.query(q);
            if (!reply.mean_token_logprob)
                throw NoConfidenceSignalError(
                    "backend reply carries no mean_token_logprob");
            CanonicalTranscript canon =
                canonicalize(reply.text, protocol.case_insensitive);
            rec.baseline_text = canon.text;
            rec.baseline_confidence = *reply.mean_token_logprob;
            if (*reply.mean_token_logprob >= threshold) {
                rec.decision.accepted = true;
                rec.decision.transcript = canon.text;
                rec.decision.reason = DecisionReason::Accepted;
                rec.cer = cer(canon.text, dataset[i].ground_truth,
                              protocol.case_insensitive);
            } else {
                rec.decision.reason = DecisionReason::BelowConfidenceThreshold;
            }
        } catch (const std::exception& e) {
            rec.decision = Decision{};
            rec.error = e.what();
        }
    };
    if (parallelism <= 1 || dataset.size() <= 1) {
        for (std::size_t i = 0; i < dataset.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < dataset.size();
                 i = next.fetch_add(1))
                run_one(i);
        };
        std::vector<std::future<void>> pool;
        int n = std::min<int>(parallelism, static_cast<int>(dataset.size()));
        for (int w = 0; w < n; ++w)
            pool.push_back(std::async(std::launch::async, worker));
        for (auto& f : pool) f.get();
    }
    ReportRow row = make_report_row(label, records, meltdown_delta);
    return {std::move(records), std::move(row)};
}

}  // namespace grc
