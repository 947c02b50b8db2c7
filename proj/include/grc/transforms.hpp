#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "grc/errors.hpp"
#include "grc/image.hpp"
#include "grc/rng.hpp"

namespace grc {

enum class TransformKind { Identity, Translate, CropJitter, Scale };

inline const char* to_string(TransformKind k) {
    switch (k) {
        case TransformKind::Identity: return "identity";
        case TransformKind::Translate: return "translate";
        case TransformKind::CropJitter: return "crop_jitter";
        case TransformKind::Scale: return "scale";
    }
    return "?";
}

/// One admissible geometric perturbation. All transforms preserve the input
/// resolution; parameters are fractions of width/height.
struct GeometricTransform {
    TransformKind kind = TransformKind::Identity;
    double dx = 0.0, dy = 0.0;                              // Translate
    double left = 0.0, right = 0.0, top = 0.0, bottom = 0.0;  // CropJitter
    double factor = 1.0;                                    // Scale

    static GeometricTransform identity() { return {}; }

    static GeometricTransform translate(double dx, double dy) {
        GeometricTransform t;
        t.kind = TransformKind::Translate;
        t.dx = dx;
        t.dy = dy;
        return t;
    }

    static GeometricTransform crop_jitter(double left, double right, double top,
                                          double bottom) {
        GeometricTransform t;
        t.kind = TransformKind::CropJitter;
        t.left = left;
        t.right = right;
        t.top = top;
        t.bottom = bottom;
        return t;
    }

    static GeometricTransform scale(double factor) {
        GeometricTransform t;
        t.kind = TransformKind::Scale;
        t.factor = factor;
        return t;
    }
};

/// The fixed evidence protocol: transform family bounds, view count, seed,
/// prompt. Identical config and seed give identical transform sequences for
/// the same source_id.
struct ProtocolConfig {
    int k_views = 5;
    std::uint64_t seed = 1;
    double max_translate = 0.05;
    double max_jitter = 0.03;
    double scale_min = 0.9;
    double scale_max = 1.1;
    std::string prompt_template = "Transcribe the word in the image.";
    bool case_insensitive = true;

    void validate() const {
        if (k_views < 1) throw Error("protocol: k_views must be >= 1");
        if (max_translate < 0 || max_translate >= 0.5)
            throw Error("protocol: max_translate must be in [0, 0.5)");
        if (max_jitter < 0 || max_jitter >= 0.5)
            throw Error("protocol: max_jitter must be in [0, 0.5)");
        if (!(scale_min > 0 && scale_min <= 1.0 && scale_max >= 1.0))
            throw Error("protocol: scale range must satisfy 0 < min <= 1 <= max");
    }
};

/// One queried view: 1-based index, transformed image, and the transform that
/// produced it. Index 1 always carries the identity transform.
struct View {
    int index = 1;
    CropImage image;
    GeometricTransform transform;
};

namespace detail {

inline CropImage apply_translate(const CropImage& img, double dx, double dy) {
    int sx = static_cast<int>(std::lround(dx * img.width));
    int sy = static_cast<int>(std::lround(dy * img.height));
    CropImage out = CropImage::blank(img.width, img.height, img.channels, 0,
                                     img.source_id);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c)
                out.at(x, y, c) = img.at_clamped(x - sx, y - sy, c);
    return out;
}

inline CropImage apply_crop_jitter(const CropImage& img, double l, double r,
                                   double t, double b) {
    int x0 = static_cast<int>(std::lround(l * img.width));
    int x1 = img.width - static_cast<int>(std::lround(r * img.width));
    int y0 = static_cast<int>(std::lround(t * img.height));
    int y1 = img.height - static_cast<int>(std::lround(b * img.height));
    if (x1 - x0 < 1 || y1 - y0 < 1)
        throw DegenerateOutputError("crop jitter leaves an empty region");
    CropImage cropped = CropImage::blank(x1 - x0, y1 - y0, img.channels, 0,
                                         img.source_id);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
            for (int c = 0; c < img.channels; ++c)
                cropped.at(x - x0, y - y0, c) = img.at(x, y, c);
    return resize_bilinear(cropped, img.width, img.height);
}

inline CropImage apply_scale(const CropImage& img, double factor) {
    int sw = static_cast<int>(std::lround(img.width * factor));
    int sh = static_cast<int>(std::lround(img.height * factor));
    if (sw < 1 || sh < 1)
        throw DegenerateOutputError("scale factor collapses the image");
    if (sw == img.width && sh == img.height) return img;
    CropImage scaled = resize_bilinear(img, sw, sh);
    // Center-align the scaled content on the original canvas. Shrunk images
    // are padded by edge replication, grown images are center-cropped.
    int offx = (img.width - sw) / 2;
    int offy = (img.height - sh) / 2;
    CropImage out = CropImage::blank(img.width, img.height, img.channels, 0,
                                     img.source_id);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c)
                out.at(x, y, c) = scaled.at_clamped(x - offx, y - offy, c);
    return out;
}

}  // namespace detail

/// Apply one transform; the output always has the input's dimensions.
inline CropImage apply_transform(const CropImage& img, const GeometricTransform& t) {
    switch (t.kind) {
        case TransformKind::Identity:
            return img;
        case TransformKind::Translate:
            return detail::apply_translate(img, t.dx, t.dy);
        case TransformKind::CropJitter:
            return detail::apply_crop_jitter(img, t.left, t.right, t.top, t.bottom);
        case TransformKind::Scale:
            return detail::apply_scale(img, t.factor);
    }
    return img;
}

/// Sample the transform sequence for one source. The stream is keyed by
/// (cfg.seed, source_id); per non-anchor view the draw order is: kind in
/// {Translate, CropJitter, Scale}, then that kind's parameters in field order.
inline std::vector<GeometricTransform> sample_transforms(
    const ProtocolConfig& cfg, const std::string& source_id) {
    cfg.validate();
    std::vector<GeometricTransform> out;
    out.reserve(cfg.k_views);
    out.push_back(GeometricTransform::identity());
    SplitMix64 rng = keyed_stream(cfg.seed, "views|" + source_id);
    for (int k = 2; k <= cfg.k_views; ++k) {
        switch (rng.next_below(3)) {
            case 0:
                out.push_back(GeometricTransform::translate(
                    rng.next_in(-cfg.max_translate, cfg.max_translate),
                    rng.next_in(-cfg.max_translate, cfg.max_translate)));
                break;
            case 1:
                out.push_back(GeometricTransform::crop_jitter(
                    rng.next_in(0.0, cfg.max_jitter), rng.next_in(0.0, cfg.max_jitter),
                    rng.next_in(0.0, cfg.max_jitter), rng.next_in(0.0, cfg.max_jitter)));
                break;
            default:
                out.push_back(GeometricTransform::scale(
                    rng.next_in(cfg.scale_min, cfg.scale_max)));
                break;
        }
    }
    return out;
}

/// Expand one crop into K views. View 1 is the untransformed anchor.
inline std::vector<View> make_views(const CropImage& image, const ProtocolConfig& cfg) {
    std::vector<GeometricTransform> transforms = sample_transforms(cfg, image.source_id);
    std::vector<View> views;
    views.reserve(transforms.size());
    for (std::size_t i = 0; i < transforms.size(); ++i) {
        View v;
        v.index = static_cast<int>(i) + 1;
        v.transform = transforms[i];
        v.image = apply_transform(image, transforms[i]);
        views.push_back(std::move(v));
    }
    return views;
}

}  // namespace grc
