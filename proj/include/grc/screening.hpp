#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grc/image.hpp"
#include "grc/text.hpp"

namespace grc {

/// A raw generator output after presentation-only normalization.
struct CanonicalTranscript {
    std::string text;
    std::size_t char_length = 0;  // Unicode scalar values
};

/// Normalize a raw decoded string: strip control characters, trim, collapse
/// internal whitespace runs to one space, and lowercase when the task
/// protocol is case-insensitive (ASCII folding). No content edits.
inline CanonicalTranscript canonicalize(const std::string& raw, bool case_insensitive) {
    std::u32string cps = decode_utf8(raw);
    std::u32string kept;
    kept.reserve(cps.size());
    auto is_space = [](char32_t c) {
        return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' ||
               c == U'\f' || c == U'\v';
    };
    auto is_control = [](char32_t c) {
        return c < 0x20 || (c >= 0x7F && c <= 0x9F);
    };
    for (char32_t c : cps) {
        if (is_space(c)) {
            if (!kept.empty() && kept.back() != U' ') kept.push_back(U' ');
            continue;
        }
        if (is_control(c)) continue;
        if (case_insensitive && c >= U'A' && c <= U'Z') c += 32;
        kept.push_back(c);
    }
    if (!kept.empty() && kept.back() == U' ') kept.pop_back();
    CanonicalTranscript out;
    out.char_length = kept.size();
    for (char32_t c : kept) encode_utf8(c, out.text);
    return out;
}

enum class BinarizeMethod { Otsu };

/// Parameters behind the geometric length bound. alpha is the conservative
/// multiplier; aspect_per_char the nominal width/height ratio of one glyph.
struct LengthBoundParams {
    BinarizeMethod binarize_method = BinarizeMethod::Otsu;
    double alpha = 2.0;
    long min_bound = 2;
    double aspect_per_char = 0.6;

    void validate() const {
        if (alpha < 1.0) throw Error("length_bound: alpha must be >= 1");
        if (min_bound < 1) throw Error("length_bound: min_bound must be >= 1");
        if (!(aspect_per_char > 0)) throw Error("length_bound: aspect_per_char must be > 0");
    }
};

/// Otsu threshold of an 8-bit value distribution: the split maximizing
/// between-class variance. Values <= threshold form the lower class.
inline int otsu_threshold(const std::vector<std::uint8_t>& gray) {
    std::array<std::uint64_t, 256> hist{};
    for (std::uint8_t v : gray) ++hist[v];
    const double total = static_cast<double>(gray.size());
    double sum_all = 0;
    for (int v = 0; v < 256; ++v) sum_all += static_cast<double>(v) * hist[v];
    double w0 = 0, sum0 = 0, best = -1.0;
    int best_t = 0;
    for (int t = 0; t < 256; ++t) {
        w0 += hist[t];
        if (w0 == 0) continue;
        double w1 = total - w0;
        if (w1 == 0) break;
        sum0 += static_cast<double>(t) * hist[t];
        double mu0 = sum0 / w0;
        double mu1 = (sum_all - sum0) / w1;
        double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {
            best = between;
            best_t = t;
        }
    }
    return best_t;
}

/// Conservative per-view bound on plausible transcription length, derived
/// from foreground geometry: binarize, take the minority class as text,
/// bound the foreground box, and divide the dominant-axis span by a nominal
/// per-character width. Returns nullopt when no foreground exists; screening
/// treats that as unbounded.
inline std::optional<long> geometric_length_bound(const CropImage& image,
                                                  const LengthBoundParams& params) {
    params.validate();
    std::vector<std::uint8_t> gray = to_grayscale(image);
    int t = otsu_threshold(gray);
    std::size_t low = 0;
    for (std::uint8_t v : gray)
        if (v <= t) ++low;
    std::size_t high = gray.size() - low;
    if (low == 0 || high == 0) return std::nullopt;
    const bool fg_low = low <= high;  // text pixels are assumed the minority
    int min_x = image.width, max_x = -1, min_y = image.height, max_y = -1;
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            bool is_low = gray[static_cast<std::size_t>(y) * image.width + x] <= t;
            if (is_low != fg_low) continue;
            min_x = std::min(min_x, x);
            max_x = std::max(max_x, x);
            min_y = std::min(min_y, y);
            max_y = std::max(max_y, y);
        }
    }
    double span_x = max_x - min_x + 1;
    double span_y = max_y - min_y + 1;
    double span_major = std::max(span_x, span_y);
    double span_minor = std::min(span_x, span_y);
    double est_chars = span_major / (params.aspect_per_char * span_minor);
    long bound = static_cast<long>(std::ceil(params.alpha * est_chars));
    return std::max(params.min_bound, bound);
}

enum class ScreenReason { Ok, ExceedsLengthBound };

/// Per-view validity verdict. length_bound is absent when the view image has
/// no detectable foreground.
struct ValidityVerdict {
    bool valid = true;
    ScreenReason reason = ScreenReason::Ok;
    std::optional<long> length_bound;
};

/// Mark a canonical transcript invalid iff it exceeds the view's geometric
/// length bound. Empty text always passes; a foreground-free image screens
/// nothing.
inline ValidityVerdict screen(const CanonicalTranscript& t, const CropImage& image,
                              const LengthBoundParams& params) {
    ValidityVerdict v;
    v.length_bound = geometric_length_bound(image, params);
    if (v.length_bound &&
        static_cast<long>(t.char_length) > *v.length_bound) {
        v.valid = false;
        v.reason = ScreenReason::ExceedsLengthBound;
    }
    return v;
}

}  // namespace grc
