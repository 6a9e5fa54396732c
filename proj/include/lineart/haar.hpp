#pragma once

#include <bit>
#include <cmath>
#include <string>
#include <vector>

#include "lineart/raster.hpp"

namespace lineart {

/// Detail subbands of one decomposition level. `source_width/height` are the
/// unpadded dimensions of the plane this level was computed from.
struct HaarLevel {
    GrayImage lh;  // (top - bottom): responds to horizontal edges
    GrayImage hl;  // (left - right): responds to vertical edges
    GrayImage hh;
    int source_width = 0;
    int source_height = 0;
};

struct HaarPyramid {
    GrayImage approx;               // LL at the deepest level
    std::vector<HaarLevel> levels;  // levels[0] is the finest
};

inline int max_haar_levels(int width, int height) {
    const int m = std::min(width, height);
    return m < 2 ? 0 : std::bit_width(static_cast<unsigned>(m)) - 1;
}

namespace detail {

// One orthonormal 2x2 butterfly pass; odd dimensions replicate the last row/column.
inline void haar_step(const GrayImage& in, GrayImage& ll, HaarLevel& lvl) {
    const int w = in.width(), h = in.height();
    const int hw = (w + 1) / 2, hh = (h + 1) / 2;
    ll = GrayImage(hw, hh);
    lvl.lh = GrayImage(hw, hh);
    lvl.hl = GrayImage(hw, hh);
    lvl.hh = GrayImage(hw, hh);
    lvl.source_width = w;
    lvl.source_height = h;
    for (int j = 0; j < hh; ++j) {
        const int y0 = 2 * j, y1 = std::min(2 * j + 1, h - 1);
        for (int i = 0; i < hw; ++i) {
            const int x0 = 2 * i, x1 = std::min(2 * i + 1, w - 1);
            const double a = in(x0, y0), b = in(x1, y0), c = in(x0, y1), d = in(x1, y1);
            ll(i, j) = (a + b + c + d) / 2.0;
            lvl.lh(i, j) = (a + b - c - d) / 2.0;
            lvl.hl(i, j) = (a - b + c - d) / 2.0;
            lvl.hh(i, j) = (a - b - c + d) / 2.0;
        }
    }
}

}  // namespace detail

/// Orthonormal 2-D Haar analysis, `levels` deep.
inline HaarPyramid haar_decompose(const GrayImage& img, int levels) {
    const int max_levels = max_haar_levels(img.width(), img.height());
    require(levels >= 1 && levels <= max_levels, ErrorKind::parameter,
            "haar levels must be in [1, " + std::to_string(max_levels) + "], got " +
                std::to_string(levels));
    HaarPyramid p;
    GrayImage cur = img;
    p.levels.resize(static_cast<std::size_t>(levels));
    for (int l = 0; l < levels; ++l) {
        GrayImage ll;
        detail::haar_step(cur, ll, p.levels[static_cast<std::size_t>(l)]);
        cur = std::move(ll);
    }
    p.approx = std::move(cur);
    return p;
}

/// Synthesis; crops replicated padding back off at every level.
inline GrayImage haar_reconstruct(const HaarPyramid& p) {
    GrayImage cur = p.approx;
    for (auto it = p.levels.rbegin(); it != p.levels.rend(); ++it) {
        const HaarLevel& lvl = *it;
        require_same_shape(cur, lvl.lh, "haar_reconstruct");
        GrayImage out(lvl.source_width, lvl.source_height);
        for (int j = 0; j < cur.height(); ++j)
            for (int i = 0; i < cur.width(); ++i) {
                const double s = cur(i, j), v = lvl.lh(i, j), hz = lvl.hl(i, j), d = lvl.hh(i, j);
                const double px[2][2] = {{(s + v + hz + d) / 2.0, (s + v - hz - d) / 2.0},
                                         {(s - v + hz - d) / 2.0, (s - v - hz + d) / 2.0}};
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        const int x = 2 * i + dx, y = 2 * j + dy;
                        if (out.contains(x, y)) out(x, y) = px[dy][dx];
                    }
            }
        cur = std::move(out);
    }
    return cur;
}

inline double energy(const GrayImage& img) {
    double s = 0.0;
    for (double v : img.pixels()) s += v * v;
    return s;
}

/// Sum of squared detail coefficients over every level.
inline double detail_energy(const HaarPyramid& p) {
    double s = 0.0;
    for (const auto& l : p.levels) s += energy(l.lh) + energy(l.hl) + energy(l.hh);
    return s;
}

}  // namespace lineart
