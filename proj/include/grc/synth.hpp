#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "grc/image.hpp"
#include "grc/rng.hpp"
#include "grc/scripted_generator.hpp"
#include "grc/wordlist.hpp"

namespace grc {

// 5x7 glyph bitmaps for A..Z, one byte per row, bit 4 = leftmost column.
inline const std::array<std::uint8_t, 7>& glyph5x7(char letter) {
    static const std::array<std::array<std::uint8_t, 7>, 26> font = {{
        {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11},  // A
        {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E},  // B
        {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E},  // C
        {0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E},  // D
        {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F},  // E
        {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10},  // F
        {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F},  // G
        {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11},  // H
        {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E},  // I
        {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C},  // J
        {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11},  // K
        {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F},  // L
        {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11},  // M
        {0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11},  // N
        {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E},  // O
        {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10},  // P
        {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D},  // Q
        {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11},  // R
        {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E},  // S
        {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04},  // T
        {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E},  // U
        {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04},  // V
        {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A},  // W
        {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11},  // X
        {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04},  // Y
        {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F},  // Z
    }};
    if (letter >= 'a' && letter <= 'z') return font[letter - 'a'];
    if (letter >= 'A' && letter <= 'Z') return font[letter - 'A'];
    return font['x' - 'a'];  // unknown characters render as X
}

struct SynthConfig {
    std::size_t n_samples = 500;
    std::uint64_t seed = 7;
    int glyph_scale = 3;
    int margin = 3;  // background border around the text, in glyph-grid pixels
    double p_overgen = 0.0;
    double p_substitute = 0.0;
    double p_unstable = 0.0;
    int overgen_repeat = 3;
    ConfidenceModel confidence_model = ConfidenceModel::Overconfident;
};

/// Rasterize a word onto a noisy light background with dark monospaced
/// glyphs. Ink and paper stay in disjoint intensity bands so foreground
/// extraction is well-posed.
inline CropImage render_word(const std::string& word, std::uint64_t seed,
                             const std::string& source_id, int glyph_scale = 3,
                             int margin = 3) {
    const int n = static_cast<int>(word.size());
    const int grid_w = (n > 0 ? 6 * n - 1 : 1) + 2 * margin;
    const int grid_h = 7 + 2 * margin;
    const int w = grid_w * glyph_scale;
    const int h = grid_h * glyph_scale;
    SplitMix64 noise = keyed_stream(seed, "pixels|" + source_id);
    CropImage img = CropImage::blank(w, h, 1, 0, source_id);
    std::vector<bool> ink(static_cast<std::size_t>(grid_w) * grid_h, false);
    for (int i = 0; i < n; ++i) {
        const auto& glyph = glyph5x7(word[i]);
        for (int row = 0; row < 7; ++row)
            for (int col = 0; col < 5; ++col)
                if (glyph[row] & (1 << (4 - col)))
                    ink[static_cast<std::size_t>(margin + row) * grid_w +
                        (margin + i * 6 + col)] = true;
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool is_ink = ink[static_cast<std::size_t>(y / glyph_scale) * grid_w +
                              (x / glyph_scale)];
            // ink in [0, 55], paper in [210, 255]
            std::uint8_t v = is_ink
                                 ? static_cast<std::uint8_t>(noise.next_below(56))
                                 : static_cast<std::uint8_t>(210 + noise.next_below(46));
            img.at(x, y) = v;
        }
    }
    return img;
}

struct SynthCorpus {
    std::vector<std::string> source_ids;
    std::vector<std::string> labels;
    std::vector<CropImage> images;
    ScriptedGeneratorSpec scripted_spec;
};

/// Draw dictionary words, render crops, and wire a scripted backend spec to
/// the generated ground truth. Fully determined by cfg.
inline SynthCorpus make_synth_corpus(const SynthConfig& cfg) {
    SynthCorpus corpus;
    const auto& words = builtin_words();
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "synth-%05zu", i);
        std::string id(buf);
        SplitMix64 rng = keyed_stream(cfg.seed, "word|" + id);
        const std::string& word = words[rng.next_below(words.size())];
        corpus.source_ids.push_back(id);
        corpus.labels.push_back(word);
        corpus.images.push_back(
            render_word(word, cfg.seed, id, cfg.glyph_scale, cfg.margin));
        corpus.scripted_spec.ground_truth_lookup[id] = word;
    }
    corpus.scripted_spec.seed = cfg.seed;
    corpus.scripted_spec.p_overgen = cfg.p_overgen;
    corpus.scripted_spec.p_substitute = cfg.p_substitute;
    corpus.scripted_spec.p_unstable = cfg.p_unstable;
    corpus.scripted_spec.overgen_repeat = cfg.overgen_repeat;
    corpus.scripted_spec.confidence_model = cfg.confidence_model;
    return corpus;
}

}  // namespace grc
