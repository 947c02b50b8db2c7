#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "grc/generator.hpp"
#include "grc/rng.hpp"
#include "grc/wordlist.hpp"

namespace grc {

enum class ConfidenceModel { Oracle, Overconfident };

inline const char* to_string(ConfidenceModel m) {
    return m == ConfidenceModel::Oracle ? "oracle" : "overconfident";
}

inline ConfidenceModel confidence_model_from_string(const std::string& s) {
    if (s == "oracle") return ConfidenceModel::Oracle;
    if (s == "overconfident") return ConfidenceModel::Overconfident;
    throw ParseError("unknown confidence model: " + s);
}

/// Fully deterministic stand-in for a frozen VLM backend. Reproduces the
/// generative OCR failure taxonomy on demand:
///
///   * per sample (keyed by seed + source_id) one failure mode is drawn:
///     over-generation with probability p_overgen, a plausible same-length
///     dictionary substitution with probability p_substitute, otherwise the
///     ground truth;
///   * over-generation appends overgen_repeat extra copies of the ground
///     truth on the anchor view; non-anchor views append between
///     overgen_repeat and overgen_repeat+2 copies (runaway length varies
///     from view to view, as decoding instability does);
///   * independently, each non-anchor view is replaced w.p. p_unstable by a
///     per-view random lowercase corruption of similar length.
///
/// mean_token_logprob follows confidence_model: Oracle scores correct text
/// high and errors low; Overconfident gives fluent over-generation the
/// highest scores, so the confidence signal misses exactly the catastrophic
/// tail.
struct ScriptedGeneratorSpec {
    std::map<std::string, std::string> ground_truth_lookup;
    double p_overgen = 0.0;
    double p_substitute = 0.0;
    double p_unstable = 0.0;
    int overgen_repeat = 3;
    std::uint64_t seed = 1;
    ConfidenceModel confidence_model = ConfidenceModel::Overconfident;
    std::vector<std::string> extra_words;

    void validate() const {
        for (double p : {p_overgen, p_substitute, p_unstable})
            if (p < 0.0 || p > 1.0)
                throw Error("scripted spec: probabilities must be in [0,1]");
        if (overgen_repeat < 1)
            throw Error("scripted spec: overgen_repeat must be >= 1");
    }
};

inline void to_json(nlohmann::json& j, const ScriptedGeneratorSpec& s) {
    j = nlohmann::json{{"seed", s.seed},
                       {"p_overgen", s.p_overgen},
                       {"p_substitute", s.p_substitute},
                       {"p_unstable", s.p_unstable},
                       {"overgen_repeat", s.overgen_repeat},
                       {"confidence_model", to_string(s.confidence_model)},
                       {"ground_truth", s.ground_truth_lookup}};
    if (!s.extra_words.empty()) j["extra_words"] = s.extra_words;
}

inline void from_json(const nlohmann::json& j, ScriptedGeneratorSpec& s) {
    j.at("seed").get_to(s.seed);
    j.at("p_overgen").get_to(s.p_overgen);
    j.at("p_substitute").get_to(s.p_substitute);
    j.at("p_unstable").get_to(s.p_unstable);
    j.at("overgen_repeat").get_to(s.overgen_repeat);
    s.confidence_model =
        confidence_model_from_string(j.at("confidence_model").get<std::string>());
    j.at("ground_truth").get_to(s.ground_truth_lookup);
    if (j.contains("extra_words")) j.at("extra_words").get_to(s.extra_words);
}

class ScriptedGenerator : public Generator {
public:
    explicit ScriptedGenerator(ScriptedGeneratorSpec spec) : spec_(std::move(spec)) {
        spec_.validate();
        vocabulary_ = builtin_words();
        vocabulary_.insert(vocabulary_.end(), spec_.extra_words.begin(),
                           spec_.extra_words.end());
    }

    enum class SampleMode { Clean, Overgen, Substitute };

    GeneratorReply generate(const GeneratorQuery& q) override {
        const std::string& source_id = q.image->source_id;
        auto it = spec_.ground_truth_lookup.find(source_id);
        if (it == spec_.ground_truth_lookup.end())
            throw Error("scripted backend: unknown source_id '" + source_id + "'");
        const std::string& gt = it->second;
        const int k = q.view_index;

        GeneratorReply reply;
        if (k >= 2 && unstable(source_id, k)) {
            reply.text = corruption(source_id, k, gt);
            reply.mean_token_logprob = confidence(source_id, k, SampleMode::Clean,
                                                  /*corrupted=*/true, gt, reply.text);
            return reply;
        }
        SampleMode mode = sample_mode(source_id);
        switch (mode) {
            case SampleMode::Clean:
                reply.text = gt;
                break;
            case SampleMode::Substitute:
                reply.text = substitution(source_id, gt);
                break;
            case SampleMode::Overgen: {
                int repeats = spec_.overgen_repeat;
                if (k >= 2) {
                    SplitMix64 rng = keyed_stream(
                        spec_.seed, "overgen|" + source_id + "|" + std::to_string(k));
                    repeats += static_cast<int>(rng.next_below(3));
                }
                reply.text.reserve(gt.size() * (repeats + 1));
                for (int i = 0; i <= repeats; ++i) reply.text += gt;
                break;
            }
        }
        reply.mean_token_logprob =
            confidence(source_id, k, mode, /*corrupted=*/false, gt, reply.text);
        return reply;
    }

    std::string identity() const override {
        nlohmann::json j = spec_;
        j.erase("ground_truth");
        return "scripted:" + std::to_string(fnv1a64(j.dump()));
    }

    SampleMode sample_mode(const std::string& source_id) const {
        SplitMix64 rng = keyed_stream(spec_.seed, "mode|" + source_id);
        double u = rng.next_double();
        if (u < spec_.p_overgen) return SampleMode::Overgen;
        if (u < spec_.p_overgen + spec_.p_substitute) return SampleMode::Substitute;
        return SampleMode::Clean;
    }

private:
    bool unstable(const std::string& source_id, int k) const {
        SplitMix64 rng = keyed_stream(
            spec_.seed, "unstable|" + source_id + "|" + std::to_string(k));
        return rng.next_double() < spec_.p_unstable;
    }

    std::string corruption(const std::string& source_id, int k,
                           const std::string& gt) const {
        SplitMix64 rng = keyed_stream(
            spec_.seed, "corrupt|" + source_id + "|" + std::to_string(k));
        long len = static_cast<long>(gt.size()) +
                   static_cast<long>(rng.next_below(3)) - 1;
        len = std::max(1L, len);
        std::string out;
        out.reserve(len);
        for (long i = 0; i < len; ++i)
            out.push_back(static_cast<char>('a' + rng.next_below(26)));
        return out;
    }

    /// Deterministic dictionary word of similar length, never the ground
    /// truth itself.
    std::string substitution(const std::string& source_id, const std::string& gt) const {
        std::vector<const std::string*> candidates;
        for (const std::string& w : vocabulary_) {
            long diff = static_cast<long>(w.size()) - static_cast<long>(gt.size());
            if (w != gt && diff >= -1 && diff <= 1) candidates.push_back(&w);
        }
        if (candidates.empty()) {
            for (const std::string& w : vocabulary_)
                if (w != gt) candidates.push_back(&w);
        }
        if (candidates.empty()) return std::string(gt.rbegin(), gt.rend());
        SplitMix64 rng = keyed_stream(spec_.seed, "subst|" + source_id);
        return *candidates[rng.next_below(candidates.size())];
    }

    double confidence(const std::string& source_id, int k, SampleMode mode,
                      bool corrupted, const std::string& gt,
                      const std::string& text) const {
        SplitMix64 rng = keyed_stream(
            spec_.seed, "conf|" + source_id + "|" + std::to_string(k));
        double u = rng.next_double();
        if (spec_.confidence_model == ConfidenceModel::Oracle) {
            return text == gt ? -0.05 - 0.10 * u : -1.5 - 1.0 * u;
        }
        if (corrupted) return -0.60 - 0.80 * u;
        switch (mode) {
            case SampleMode::Overgen: return -0.05 - 0.10 * u;
            case SampleMode::Clean: return -0.05 - 0.20 * u;
            case SampleMode::Substitute: return -0.20 - 0.60 * u;
        }
        return -1.0;
    }

    ScriptedGeneratorSpec spec_;
    std::vector<std::string> vocabulary_;
};

inline ScriptedGeneratorSpec load_scripted_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scripted spec file: " + path);
    nlohmann::json j;
    try {
        in >> j;
        return j.get<ScriptedGeneratorSpec>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("scripted spec " + path + ": " + e.what());
    }
}

inline void save_scripted_spec(const ScriptedGeneratorSpec& spec,
                               const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write scripted spec file: " + path);
    nlohmann::json j = spec;
    out << j.dump(2) << "\n";
}

}  // namespace grc
