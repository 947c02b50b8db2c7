#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "grc/errors.hpp"
#include "grc/evaluation.hpp"
#include "grc/image_io.hpp"
#include "grc/screening.hpp"

namespace grc {

/// Dataset manifest: JSONL, one {"id", "image", "label"} object per line.
/// Image paths are resolved relative to the manifest file's directory.
struct Manifest {
    struct Entry {
        std::string source_id;
        std::string image_path;  // absolute, resolved at load time
        std::string ground_truth;
    };
    std::vector<Entry> entries;
    std::string dataset_name;
    bool case_insensitive = true;
};

inline Manifest load_manifest(const std::string& path, bool case_insensitive = true) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open manifest: " + path);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    Manifest manifest;
    manifest.dataset_name = std::filesystem::path(path).stem().string();
    manifest.case_insensitive = case_insensitive;
    std::set<std::string> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id") ||
            !j.contains("image") || !j.contains("label") || !j["id"].is_string() ||
            !j["image"].is_string() || !j["label"].is_string())
            throw ParseError("manifest " + path + " line " + std::to_string(line_no) +
                             ": expected {\"id\", \"image\", \"label\"} strings");
        Manifest::Entry e;
        e.source_id = j["id"].get<std::string>();
        e.ground_truth = j["label"].get<std::string>();
        if (!seen.insert(e.source_id).second)
            throw ParseError("manifest " + path + " line " + std::to_string(line_no) +
                             ": duplicate id '" + e.source_id + "'");
        if (canonicalize(e.ground_truth, case_insensitive).char_length == 0)
            throw ParseError("manifest " + path + " line " + std::to_string(line_no) +
                             ": empty label for id '" + e.source_id + "'");
        std::filesystem::path img = j["image"].get<std::string>();
        if (img.is_relative()) img = base / img;
        if (!std::filesystem::exists(img))
            throw ParseError("manifest " + path + " line " + std::to_string(line_no) +
                             ": missing image file '" + img.string() + "'");
        e.image_path = img.string();
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

/// Materialize the manifest: decode every image and canonicalize every
/// label under the task's case rule.
inline std::vector<LabeledSample> load_samples(const Manifest& manifest) {
    std::vector<LabeledSample> samples;
    samples.reserve(manifest.entries.size());
    for (const Manifest::Entry& e : manifest.entries) {
        LabeledSample s;
        s.source_id = e.source_id;
        s.image = load_image(e.image_path, e.source_id);
        s.ground_truth = canonicalize(e.ground_truth, manifest.case_insensitive).text;
        samples.push_back(std::move(s));
    }
    return samples;
}

inline void write_manifest(const Manifest& manifest, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write manifest: " + path);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    for (const Manifest::Entry& e : manifest.entries) {
        std::filesystem::path img(e.image_path);
        nlohmann::json j{{"id", e.source_id},
                         {"image", img.lexically_relative(base).string()},
                         {"label", e.ground_truth}};
        out << j.dump() << "\n";
    }
}

}  // namespace grc
