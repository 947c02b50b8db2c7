#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grc/consensus.hpp"
#include "grc/errors.hpp"
#include "grc/generator.hpp"
#include "grc/screening.hpp"
#include "grc/transforms.hpp"

namespace grc {

/// One strictness setting on the risk-coverage curve: the consensus
/// threshold tau(m), the shared dispersion threshold kappa, and the
/// minimum-evidence gate.
struct OperatingPoint {
    int m = 3;
    double tau = 0.5;
    double kappa = 0.4;
    int k_min = 3;
};

/// Default family: tau(1)=0.1, tau(3)=0.5, tau(5)=0.9 with kappa=0.4 and
/// K_min=3 shared.
inline std::vector<OperatingPoint> default_operating_points() {
    return {{1, 0.1, 0.4, 3}, {3, 0.5, 0.4, 3}, {5, 0.9, 0.4, 3}};
}

inline void validate_family(const std::vector<OperatingPoint>& family) {
    if (family.empty()) throw Error("operating-point family is empty");
    for (const OperatingPoint& op : family) {
        if (op.tau < 0 || op.tau > 1 || op.kappa < 0 || op.kappa > 1 || op.k_min < 1)
            throw Error("operating point m=" + std::to_string(op.m) +
                        " has out-of-range thresholds");
    }
    for (std::size_t i = 1; i < family.size(); ++i) {
        if (family[i].m <= family[i - 1].m)
            throw Error("operating-point family: m values must be increasing");
        if (family[i].tau < family[i - 1].tau)
            throw Error("operating-point family: tau must be nondecreasing in m");
        if (family[i].kappa != family[0].kappa || family[i].k_min != family[0].k_min)
            throw Error("operating-point family: kappa and k_min are shared");
    }
}

inline OperatingPoint operating_point_for(int m,
                                          const std::vector<OperatingPoint>& family) {
    validate_family(family);
    for (const OperatingPoint& op : family)
        if (op.m == m) return op;
    throw UnknownOperatingPointError("no operating point with m=" + std::to_string(m));
}

enum class DecisionReason {
    Accepted,
    InsufficientEvidence,
    NoUniqueMode,
    LowConsensus,
    HighDispersion,
    BelowConfidenceThreshold,  // used only by the confidence baseline
};

inline const char* to_string(DecisionReason r) {
    switch (r) {
        case DecisionReason::Accepted: return "accepted";
        case DecisionReason::InsufficientEvidence: return "insufficient_evidence";
        case DecisionReason::NoUniqueMode: return "no_unique_mode";
        case DecisionReason::LowConsensus: return "low_consensus";
        case DecisionReason::HighDispersion: return "high_dispersion";
        case DecisionReason::BelowConfidenceThreshold:
            return "below_confidence_threshold";
    }
    return "?";
}

/// Accept with the consensus transcript, or abstain with the first failed
/// gate as the reason. The evidence summary is always attached for audit.
struct Decision {
    bool accepted = false;
    std::optional<std::string> transcript;
    DecisionReason reason = DecisionReason::InsufficientEvidence;
    EvidenceSummary summary;
};

/// The accept/abstain rule. Gates are evaluated in order: minimum evidence,
/// unique mode, vote fraction q >= tau, dispersion <= kappa; both threshold
/// comparisons are non-strict.
inline Decision decide(const EvidenceSummary& summary, const OperatingPoint& op) {
    Decision d;
    d.summary = summary;
    if (summary.n_valid < static_cast<std::size_t>(op.k_min)) {
        d.reason = DecisionReason::InsufficientEvidence;
        return d;
    }
    if (!summary.mode_unique) {
        d.reason = DecisionReason::NoUniqueMode;
        return d;
    }
    if (*summary.vote_fraction < op.tau) {
        d.reason = DecisionReason::LowConsensus;
        return d;
    }
    if (*summary.dispersion > op.kappa) {
        d.reason = DecisionReason::HighDispersion;
        return d;
    }
    d.accepted = true;
    d.transcript = summary.mode;
    d.reason = DecisionReason::Accepted;
    return d;
}

/// Component ablations. NoStructural drops the admissibility screen while
/// keeping consensus control; NoConsensus keeps screening but emits the
/// anchor's output; AlwaysAccept is the single-query baseline that never
/// abstains.
enum class Ablation { Full, NoStructural, NoConsensus, AlwaysAccept };

inline const char* to_string(Ablation a) {
    switch (a) {
        case Ablation::Full: return "full";
        case Ablation::NoStructural: return "no_structural";
        case Ablation::NoConsensus: return "no_consensus";
        case Ablation::AlwaysAccept: return "always_accept";
    }
    return "?";
}

inline Ablation ablation_from_string(const std::string& s) {
    if (s == "full") return Ablation::Full;
    if (s == "no_structural") return Ablation::NoStructural;
    if (s == "no_consensus") return Ablation::NoConsensus;
    if (s == "always_accept") return Ablation::AlwaysAccept;
    throw ParseError("unknown ablation: " + s);
}

/// End-to-end execution for one crop: expand views, query the generator,
/// canonicalize, screen, summarize, decide.
///
/// The anchor-only variants (NoConsensus, AlwaysAccept) query just view 1;
/// their evidence record covers that single view. NoConsensus accepts the
/// anchor's screened output and abstains only when the anchor is screened
/// out or absent. AlwaysAccept exposes the anchor's canonicalized output
/// unconditionally (abstaining only if the backend call itself fails).
inline Decision run_pipeline(const CropImage& image, const ProtocolConfig& cfg,
                             Gateway& gateway, const LengthBoundParams& params,
                             const OperatingPoint& op,
                             Ablation ablation = Ablation::Full,
                             int view_parallelism = 1) {
    cfg.validate();
    params.validate();
    const bool anchor_only =
        ablation == Ablation::NoConsensus || ablation == Ablation::AlwaysAccept;

    std::vector<View> views;
    if (anchor_only) {
        View anchor;
        anchor.index = 1;
        anchor.image = image;
        anchor.transform = GeometricTransform::identity();
        views.push_back(std::move(anchor));
    } else {
        views = make_views(image, cfg);
    }

    std::vector<ViewOutcome> outcomes =
        gateway.query_all_views(views, cfg.prompt_template, view_parallelism);

    EvidenceRecord record;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (!outcomes[i].reply) {
            record.absent_views.push_back(outcomes[i].view_index);
            continue;
        }
        EvidenceRecord::Entry entry;
        entry.view_index = outcomes[i].view_index;
        entry.canonical = canonicalize(outcomes[i].reply->text, cfg.case_insensitive);
        if (ablation == Ablation::NoStructural || ablation == Ablation::AlwaysAccept) {
            entry.verdict = ValidityVerdict{};  // screen bypassed
        } else {
            entry.verdict = screen(entry.canonical, views[i].image, params);
        }
        record.entries.push_back(std::move(entry));
    }

    if (ablation == Ablation::NoConsensus || ablation == Ablation::AlwaysAccept) {
        Decision d;
        d.summary = summarize_evidence(record);
        const EvidenceRecord::Entry* anchor = nullptr;
        for (const auto& e : record.entries)
            if (e.view_index == 1) anchor = &e;
        if (anchor == nullptr ||
            (ablation == Ablation::NoConsensus && !anchor->verdict.valid)) {
            d.reason = DecisionReason::InsufficientEvidence;
            return d;
        }
        d.accepted = true;
        d.transcript = anchor->canonical.text;
        d.reason = DecisionReason::Accepted;
        return d;
    }

    return decide(summarize_evidence(record), op);
}

}  // namespace grc
