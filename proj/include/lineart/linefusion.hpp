#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "lineart/haar.hpp"
#include "lineart/morphology.hpp"
#include "lineart/raster.hpp"

namespace lineart {

namespace detail {

struct Pixel {
    int x, y;
};

// Marks every pixel reachable from `seeds` through pixels where `passable` is
// set. 4- or 8-connectivity.
inline BinaryMask flood(const BinaryMask& passable, const std::vector<Pixel>& seeds,
                        bool eight_connected) {
    BinaryMask reached(passable.width(), passable.height());
    std::vector<Pixel> stack;
    for (const auto& s : seeds)
        if (passable(s.x, s.y) && !reached(s.x, s.y)) {
            reached(s.x, s.y) = 1;
            stack.push_back(s);
        }
    while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if ((dx == 0 && dy == 0) || (!eight_connected && dx != 0 && dy != 0)) continue;
                const int u = p.x + dx, v = p.y + dy;
                if (passable.contains(u, v) && passable(u, v) && !reached(u, v)) {
                    reached(u, v) = 1;
                    stack.push_back({u, v});
                }
            }
    }
    return reached;
}

inline std::vector<Pixel> border_pixels(int w, int h) {
    std::vector<Pixel> out;
    for (int x = 0; x < w; ++x) {
        out.push_back({x, 0});
        if (h > 1) out.push_back({x, h - 1});
    }
    for (int y = 1; y + 1 < h; ++y) {
        out.push_back({0, y});
        if (w > 1) out.push_back({w - 1, y});
    }
    return out;
}

inline BinaryMask largest_component(const BinaryMask& fg) {
    BinaryMask labelled(fg.width(), fg.height());
    BinaryMask best(fg.width(), fg.height());
    std::size_t best_size = 0;
    for (int y = 0; y < fg.height(); ++y)
        for (int x = 0; x < fg.width(); ++x) {
            if (!fg(x, y) || labelled(x, y)) continue;
            BinaryMask comp = flood(fg, {{x, y}}, true);
            const std::size_t n = count_nonzero(comp);
            for (std::size_t i = 0; i < comp.size(); ++i)
                labelled.pixels()[i] |= comp.pixels()[i];
            if (n > best_size) {
                best_size = n;
                best = std::move(comp);
            }
        }
    return best;
}

}  // namespace detail

/// Foreground region enclosed by the outermost drawn contour.
///
/// Ink (luminance < ink_threshold) is closed with a 3x3 square, background is
/// flood-filled (4-connected) from every border pixel, and the complement is
/// reduced to its largest 8-connected component. Throws "empty mask" when
/// nothing remains.
inline BinaryMask extract_mask(const GrayImage& drawing, double ink_threshold = 0.5) {
    require(ink_threshold >= 0.0 && ink_threshold <= 1.0, ErrorKind::parameter,
            "ink_threshold must be in [0,1]");
    BinaryMask ink(drawing.width(), drawing.height());
    std::transform(drawing.pixels().begin(), drawing.pixels().end(), ink.pixels().begin(),
                   [&](double v) { return static_cast<std::uint8_t>(v < ink_threshold); });
    const BinaryMask closed = closing(ink, StructuringElement::square(1), std::uint8_t{1});

    BinaryMask open_space(closed.width(), closed.height());
    std::transform(closed.pixels().begin(), closed.pixels().end(), open_space.pixels().begin(),
                   [](std::uint8_t v) { return static_cast<std::uint8_t>(!v); });
    const BinaryMask background =
        detail::flood(open_space, detail::border_pixels(drawing.width(), drawing.height()), false);

    BinaryMask fg(drawing.width(), drawing.height());
    std::transform(background.pixels().begin(), background.pixels().end(), fg.pixels().begin(),
                   [](std::uint8_t v) { return static_cast<std::uint8_t>(!v); });
    BinaryMask mask = detail::largest_component(fg);
    require(count_nonzero(mask) > 0, ErrorKind::input, "empty mask");
    return mask;
}

/// Double-line layer: morphological opening of the ink channel, returned in
/// the drawing's own dark-on-light polarity. Strokes thinner than the element
/// vanish; emphasized strokes survive.
inline GrayImage double_lines(const GrayImage& drawing, const StructuringElement& se) {
    return invert(opening(invert(drawing), se));
}

struct SingleLines {
    BinaryMask region;   // eroded mask
    BinaryMask contour;  // 1-px boundary of the eroded region (the drawable layer)
};

inline BinaryMask boundary(const BinaryMask& region) {
    BinaryMask out(region.width(), region.height());
    constexpr std::array<std::array<int, 2>, 4> n4{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
    for (int y = 0; y < region.height(); ++y)
        for (int x = 0; x < region.width(); ++x) {
            if (!region(x, y)) continue;
            for (const auto& d : n4) {
                const int u = x + d[0], v = y + d[1];
                if (!region.contains(u, v) || !region(u, v)) {
                    out(x, y) = 1;
                    break;
                }
            }
        }
    return out;
}

inline SingleLines single_lines(const BinaryMask& mask, const StructuringElement& se) {
    SingleLines out;
    out.region = erode(mask, se);
    require(count_nonzero(out.region) > 0, ErrorKind::input, "mask too thin for radius");
    out.contour = boundary(out.region);
    return out;
}

struct SoftEdgePoint {
    int x = 0;
    int y = 0;
    double magnitude = 0.0;
    friend bool operator==(const SoftEdgePoint&, const SoftEdgePoint&) = default;
};

struct SoftEdgeMap {
    std::vector<SoftEdgePoint> points;
    int source_width = 0;
    int source_height = 0;
    int levels = 0;

    GrayImage rasterize() const {
        GrayImage out(source_width, source_height);
        for (const auto& p : points) out(p.x, p.y) = p.magnitude;
        return out;
    }
};

/// Per-pixel detail strength: sqrt(LH^2 + HL^2 + HH^2) at each level, nearest
/// upsampled to source resolution, summed over levels and scaled so the
/// maximum is 1. An image without detail yields all zeros.
inline GrayImage detail_magnitude(const GrayImage& img, int levels) {
    const HaarPyramid p = haar_decompose(img, levels);
    GrayImage mag(img.width(), img.height());
    for (std::size_t l = 0; l < p.levels.size(); ++l) {
        const HaarLevel& lvl = p.levels[l];
        const int shift = static_cast<int>(l) + 1;
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x) {
                const int i = x >> shift, j = y >> shift;
                const double a = lvl.lh(i, j), b = lvl.hl(i, j), c = lvl.hh(i, j);
                mag(x, y) += std::sqrt(a * a + b * b + c * c);
            }
    }
    const double peak = *std::max_element(mag.pixels().begin(), mag.pixels().end());
    // Ignore floating-point residue on flat inputs.
    if (peak <= 1e-12) return GrayImage(img.width(), img.height());
    for (double& v : mag.pixels()) v /= peak;
    return mag;
}

/// Sparse soft-edge point set: the strongest ceil(keep_fraction * N) pixels
/// with nonzero magnitude. Ties break on (y, x) so smaller fractions always
/// give subsets of larger ones.
inline SoftEdgeMap soft_edges(const GrayImage& g_initial, int levels = 2,
                              double keep_fraction = 0.10) {
    require(keep_fraction > 0.0 && keep_fraction <= 1.0, ErrorKind::parameter,
            "keep_fraction must be in (0,1]");
    const GrayImage mag = detail_magnitude(g_initial, levels);

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < mag.size(); ++i)
        if (mag.pixels()[i] > 0.0) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return mag.pixels()[a] > mag.pixels()[b];
    });
    const auto quota = static_cast<std::size_t>(
        std::ceil(keep_fraction * static_cast<double>(mag.size()) - 1e-9));
    order.resize(std::min(order.size(), quota));

    SoftEdgeMap out;
    out.source_width = g_initial.width();
    out.source_height = g_initial.height();
    out.levels = levels;
    out.points.reserve(order.size());
    for (std::size_t i : order) {
        const int x = static_cast<int>(i % static_cast<std::size_t>(mag.width()));
        const int y = static_cast<int>(i / static_cast<std::size_t>(mag.width()));
        out.points.push_back({x, y, mag.pixels()[i]});
    }
    return out;
}

struct FusionWeights {
    double double_line = 1.0;
    double single_line = 1.0;
    double soft_edge = 0.4;
    friend bool operator==(const FusionWeights&, const FusionWeights&) = default;
};

struct GeometryCondition {
    GrayImage image;  // bright strokes on black
    FusionWeights weights;
    std::array<std::string, 3> provenance;  // double, single, soft
};

/// Weighted per-pixel maximum of any number of equally sized layers, clamped to [0,1].
inline GrayImage weighted_max(std::span<const GrayImage* const> layers,
                              std::span<const double> weights) {
    require(!layers.empty() && layers.size() == weights.size(), ErrorKind::parameter,
            "weighted_max: need one weight per layer");
    GrayImage out(layers[0]->width(), layers[0]->height());
    for (std::size_t k = 0; k < layers.size(); ++k) {
        require_same_shape(*layers[0], *layers[k], "fuse");
        require(weights[k] >= 0.0 && weights[k] <= 1.0, ErrorKind::parameter,
                "fusion weights must be in [0,1]");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        double v = 0.0;
        for (std::size_t k = 0; k < layers.size(); ++k)
            v = std::max(v, weights[k] * layers[k]->pixels()[i]);
        out.pixels()[i] = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

/// Fuses the three edge levels. `l_double` is in ink polarity (strokes = 1);
/// callers holding the output of double_lines() pass invert() of it.
inline GeometryCondition fuse(const GrayImage& l_double, const BinaryMask& l_single,
                              const SoftEdgeMap& s_soft, const FusionWeights& w = {},
                              std::array<std::string, 3> provenance = {"double_lines",
                                                                       "single_lines",
                                                                       "soft_edges"}) {
    require(s_soft.source_width == l_double.width() && s_soft.source_height == l_double.height(),
            ErrorKind::parameter, "fuse: soft-edge map dimensions differ from the line layers");
    const GrayImage single = to_gray(l_single);
    const GrayImage soft = s_soft.rasterize();
    const std::array<const GrayImage*, 3> layers{&l_double, &single, &soft};
    const std::array<double, 3> weights{w.double_line, w.single_line, w.soft_edge};
    return {weighted_max(layers, weights), w, std::move(provenance)};
}

/// Two-layer condition for the stage before an initial generation exists.
inline GeometryCondition fuse(const GrayImage& l_double, const BinaryMask& l_single,
                              const FusionWeights& w = {}) {
    SoftEdgeMap none;
    none.source_width = l_double.width();
    none.source_height = l_double.height();
    return fuse(l_double, l_single, none, w, {"double_lines", "single_lines", ""});
}

}  // namespace lineart
