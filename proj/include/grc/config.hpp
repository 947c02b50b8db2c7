#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "grc/controller.hpp"
#include "grc/errors.hpp"
#include "grc/http_generator.hpp"
#include "grc/scripted_generator.hpp"
#include "grc/screening.hpp"
#include "grc/transforms.hpp"

namespace grc {

struct BackendDescriptor {
    std::string kind = "scripted";  // "scripted" | "http"
    std::string spec_path;          // scripted
    HttpBackendConfig http;         // http
};

/// The full deployment contract for one run: protocol, screening parameters,
/// operating-point family, backend, and harness knobs. Loads from a single
/// JSON file so the whole contract is one reviewable document.
struct RunConfig {
    ProtocolConfig protocol;
    LengthBoundParams length_bound;
    std::vector<OperatingPoint> operating_points = default_operating_points();
    BackendDescriptor backend;
    Ablation ablation = Ablation::Full;
    std::string output_dir = "out";
    int parallelism = 1;
    bool cache_enabled = true;
    double heldout_fraction = 0.2;
    double meltdown_delta = 2.0;

    void validate() const {
        protocol.validate();
        length_bound.validate();
        validate_family(operating_points);
        if (backend.kind != "scripted" && backend.kind != "http")
            throw Error("config: backend.kind must be 'scripted' or 'http'");
        if (parallelism < 1) throw Error("config: parallelism must be >= 1");
        if (heldout_fraction <= 0 || heldout_fraction >= 1)
            throw Error("config: heldout_fraction must be in (0, 1)");
    }
};

namespace detail {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace detail

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config " + path + ": " + e.what());
    }
    RunConfig cfg;
    try {
        if (j.contains("protocol")) {
            const auto& p = j["protocol"];
            detail::read_if(p, "k_views", cfg.protocol.k_views);
            detail::read_if(p, "seed", cfg.protocol.seed);
            detail::read_if(p, "max_translate", cfg.protocol.max_translate);
            detail::read_if(p, "max_jitter", cfg.protocol.max_jitter);
            detail::read_if(p, "scale_min", cfg.protocol.scale_min);
            detail::read_if(p, "scale_max", cfg.protocol.scale_max);
            detail::read_if(p, "prompt_template", cfg.protocol.prompt_template);
            detail::read_if(p, "case_insensitive", cfg.protocol.case_insensitive);
        }
        if (j.contains("length_bound")) {
            const auto& p = j["length_bound"];
            if (p.contains("binarize_method") &&
                p["binarize_method"].get<std::string>() != "otsu")
                throw ParseError("config: only binarize_method 'otsu' is supported");
            detail::read_if(p, "alpha", cfg.length_bound.alpha);
            detail::read_if(p, "min_bound", cfg.length_bound.min_bound);
            detail::read_if(p, "aspect_per_char", cfg.length_bound.aspect_per_char);
        }
        if (j.contains("operating_points")) {
            cfg.operating_points.clear();
            for (const auto& o : j["operating_points"]) {
                OperatingPoint op;
                o.at("m").get_to(op.m);
                o.at("tau").get_to(op.tau);
                o.at("kappa").get_to(op.kappa);
                o.at("k_min").get_to(op.k_min);
                cfg.operating_points.push_back(op);
            }
        }
        if (j.contains("backend")) {
            const auto& b = j["backend"];
            b.at("kind").get_to(cfg.backend.kind);
            if (cfg.backend.kind == "scripted") {
                b.at("spec_path").get_to(cfg.backend.spec_path);
                std::filesystem::path sp = cfg.backend.spec_path;
                if (sp.is_relative())
                    cfg.backend.spec_path =
                        (std::filesystem::path(path).parent_path() / sp).string();
            } else {
                detail::read_if(b, "url", cfg.backend.http.url);
                detail::read_if(b, "timeout_ms", cfg.backend.http.timeout_ms);
                detail::read_if(b, "retries", cfg.backend.http.retries);
                detail::read_if(b, "backoff_ms", cfg.backend.http.backoff_ms);
            }
        }
        if (j.contains("ablation"))
            cfg.ablation = ablation_from_string(j["ablation"].get<std::string>());
        detail::read_if(j, "output_dir", cfg.output_dir);
        detail::read_if(j, "parallelism", cfg.parallelism);
        detail::read_if(j, "cache", cfg.cache_enabled);
        detail::read_if(j, "heldout_fraction", cfg.heldout_fraction);
        detail::read_if(j, "meltdown_delta", cfg.meltdown_delta);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config " + path + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

inline void save_run_config(const RunConfig& cfg, const std::string& path) {
    nlohmann::json j;
    j["protocol"] = {{"k_views", cfg.protocol.k_views},
                     {"seed", cfg.protocol.seed},
                     {"max_translate", cfg.protocol.max_translate},
                     {"max_jitter", cfg.protocol.max_jitter},
                     {"scale_min", cfg.protocol.scale_min},
                     {"scale_max", cfg.protocol.scale_max},
                     {"prompt_template", cfg.protocol.prompt_template},
                     {"case_insensitive", cfg.protocol.case_insensitive}};
    j["length_bound"] = {{"binarize_method", "otsu"},
                         {"alpha", cfg.length_bound.alpha},
                         {"min_bound", cfg.length_bound.min_bound},
                         {"aspect_per_char", cfg.length_bound.aspect_per_char}};
    j["operating_points"] = nlohmann::json::array();
    for (const OperatingPoint& op : cfg.operating_points)
        j["operating_points"].push_back(
            {{"m", op.m}, {"tau", op.tau}, {"kappa", op.kappa}, {"k_min", op.k_min}});
    if (cfg.backend.kind == "scripted") {
        j["backend"] = {{"kind", "scripted"}, {"spec_path", cfg.backend.spec_path}};
    } else {
        j["backend"] = {{"kind", "http"},
                        {"url", cfg.backend.http.url},
                        {"timeout_ms", cfg.backend.http.timeout_ms},
                        {"retries", cfg.backend.http.retries},
                        {"backoff_ms", cfg.backend.http.backoff_ms}};
    }
    j["ablation"] = to_string(cfg.ablation);
    j["output_dir"] = cfg.output_dir;
    j["parallelism"] = cfg.parallelism;
    j["cache"] = cfg.cache_enabled;
    j["heldout_fraction"] = cfg.heldout_fraction;
    j["meltdown_delta"] = cfg.meltdown_delta;
    std::ofstream out(path);
    if (!out) throw Error("cannot write config file: " + path);
    out << j.dump(2) << "\n";
}

/// Instantiate the configured backend. GRC_BACKEND_URL, when set, overrides
/// the HTTP adapter's URL.
inline std::shared_ptr<Generator> make_backend(const BackendDescriptor& desc) {
    if (desc.kind == "scripted")
        return std::make_shared<ScriptedGenerator>(load_scripted_spec(desc.spec_path));
    HttpBackendConfig http = desc.http;
    if (const char* url = std::getenv("GRC_BACKEND_URL"); url && *url)
        http.url = url;
    if (http.url.empty()) throw Error("http backend: no URL configured");
    return std::make_shared<HttpGenerator>(http);
}

}  // namespace grc
