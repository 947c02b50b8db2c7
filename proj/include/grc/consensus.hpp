#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grc/screening.hpp"
#include "grc/text.hpp"

namespace grc {

/// Levenshtein distance over Unicode scalar values; insertions, deletions
/// and substitutions all cost 1.
inline std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::u32string ua = decode_utf8(a);
    std::u32string ub = decode_utf8(b);
    if (ua.size() < ub.size()) std::swap(ua, ub);
    const std::size_t n = ub.size();
    std::vector<std::size_t> prev(n + 1), cur(n + 1);
    for (std::size_t j = 0; j <= n; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= ua.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= n; ++j) {
            std::size_t sub = prev[j - 1] + (ua[i - 1] == ub[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

/// min(1, ED(a,b) / max(1, max(|a|,|b|))): symmetric, in [0,1], zero iff the
/// strings are equal.
inline double bounded_normalized_distance(const std::string& a, const std::string& b) {
    std::size_t len = std::max(scalar_length(a), scalar_length(b));
    double d = static_cast<double>(edit_distance(a, b)) /
               static_cast<double>(std::max<std::size_t>(1, len));
    return std::min(1.0, d);
}

struct ModeResult {
    std::optional<std::string> mode;
    bool unique = false;
};

/// Most frequent string under exact equality. A tie for the maximum count
/// yields no mode.
inline ModeResult select_mode(const std::vector<std::string>& valid_texts) {
    std::map<std::string, int> counts;
    for (const std::string& s : valid_texts) ++counts[s];
    int best = 0;
    int n_best = 0;
    const std::string* arg = nullptr;
    for (const auto& [text, count] : counts) {
        if (count > best) {
            best = count;
            n_best = 1;
            arg = &text;
        } else if (count == best) {
            ++n_best;
        }
    }
    ModeResult r;
    if (arg != nullptr && n_best == 1) {
        r.mode = *arg;
        r.unique = true;
    }
    return r;
}

/// Per-view transcriptions with validity flags; views lost to backend
/// failures are listed in absent_views. Indices over entries plus
/// absent_views cover 1..K exactly once.
struct EvidenceRecord {
    struct Entry {
        int view_index = 0;
        CanonicalTranscript canonical;
        ValidityVerdict verdict;
    };
    std::vector<Entry> entries;
    std::vector<int> absent_views;
};

/// The statistics driving the decision: valid count n, mode s*, vote
/// fraction q, and candidate-centered dispersion. vote_fraction and
/// dispersion are present only when a unique mode exists.
struct EvidenceSummary {
    std::size_t n_valid = 0;
    std::optional<std::string> mode;
    bool mode_unique = false;
    std::optional<double> vote_fraction;
    std::optional<double> dispersion;
};

/// Restrict to valid entries, pick the unique mode, and compute q and the
/// dispersion (mean bounded normalized distance to the mode over all valid
/// views; mode-matching views contribute 0).
inline EvidenceSummary summarize_evidence(const EvidenceRecord& record) {
    std::vector<std::string> texts;
    for (const auto& e : record.entries)
        if (e.verdict.valid) texts.push_back(e.canonical.text);
    EvidenceSummary s;
    s.n_valid = texts.size();
    if (texts.empty()) return s;
    ModeResult mode = select_mode(texts);
    if (!mode.unique) return s;
    s.mode = mode.mode;
    s.mode_unique = true;
    std::size_t votes = 0;
    double dist_sum = 0.0;
    for (const std::string& t : texts) {
        if (t == *mode.mode) {
            ++votes;
        } else {
            dist_sum += bounded_normalized_distance(t, *mode.mode);
        }
    }
    s.vote_fraction = static_cast<double>(votes) / static_cast<double>(texts.size());
    s.dispersion = dist_sum / static_cast<double>(texts.size());
    return s;
}

}  // namespace grc
