#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "grc/errors.hpp"
#include "grc/rng.hpp"

namespace grc {

/// A single-word image crop, the unit of OCR input. Pixels are row-major,
/// 8-bit, with 1 (grayscale) or 3 (RGB) channels.
struct CropImage {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;
    std::string source_id;

    bool valid() const {
        return width >= 1 && height >= 1 && (channels == 1 || channels == 3) &&
               pixels.size() == static_cast<std::size_t>(width) * height * channels;
    }

    std::uint8_t at(int x, int y, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    std::uint8_t& at(int x, int y, int c = 0) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    /// Clamped access; reads outside the image replicate the nearest edge.
    std::uint8_t at_clamped(int x, int y, int c = 0) const {
        x = std::clamp(x, 0, width - 1);
        y = std::clamp(y, 0, height - 1);
        return at(x, y, c);
    }

    static CropImage blank(int w, int h, int ch, std::uint8_t fill,
                           std::string source_id = {}) {
        CropImage img;
        img.width = w;
        img.height = h;
        img.channels = ch;
        img.pixels.assign(static_cast<std::size_t>(w) * h * ch, fill);
        img.source_id = std::move(source_id);
        return img;
    }
};

inline bool pixels_equal(const CropImage& a, const CropImage& b) {
    return a.width == b.width && a.height == b.height &&
           a.channels == b.channels && a.pixels == b.pixels;
}

/// ITU-R BT.601 luma. Grayscale inputs pass through.
inline std::vector<std::uint8_t> to_grayscale(const CropImage& img) {
    if (img.channels == 1) return img.pixels;
    std::vector<std::uint8_t> gray(static_cast<std::size_t>(img.width) * img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double v = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
                       0.114 * img.at(x, y, 2);
            gray[static_cast<std::size_t>(y) * img.width + x] =
                static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
        }
    }
    return gray;
}

/// Bilinear resize to (out_w, out_h). Sample positions use pixel-center
/// alignment; source coordinates are clamped at the borders.
inline CropImage resize_bilinear(const CropImage& src, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) {
        throw DegenerateOutputError("resize target is " + std::to_string(out_w) +
                                    "x" + std::to_string(out_h));
    }
    CropImage dst = CropImage::blank(out_w, out_h, src.channels, 0, src.source_id);
    const double sx = static_cast<double>(src.width) / out_w;
    const double sy = static_cast<double>(src.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double wx = fx - x0;
            for (int c = 0; c < src.channels; ++c) {
                double v00 = src.at_clamped(x0, y0, c);
                double v10 = src.at_clamped(x0 + 1, y0, c);
                double v01 = src.at_clamped(x0, y0 + 1, c);
                double v11 = src.at_clamped(x0 + 1, y0 + 1, c);
                double v = v00 * (1 - wx) * (1 - wy) + v10 * wx * (1 - wy) +
                           v01 * (1 - wx) * wy + v11 * wx * wy;
                dst.at(x, y, c) =
                    static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
            }
        }
    }
    return dst;
}

/// Content hash covering geometry and pixel bytes; used as a cache key part.
inline std::uint64_t content_hash(const CropImage& img) {
    std::uint64_t h = fnv1a64(std::string_view(
        reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size()));
    h = mix64(h ^ (static_cast<std::uint64_t>(img.width) << 32 ^
                   static_cast<std::uint64_t>(img.height) << 8 ^
                   static_cast<std::uint64_t>(img.channels)));
    return h;
}

}  // namespace grc
