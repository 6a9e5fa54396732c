#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "lineart/raster.hpp"

namespace lineart {

struct StructuringElement {
    enum class Shape { square, disc };

    Shape shape = Shape::square;
    // 0 is the degenerate single-pixel footprint (identity); the CLI only accepts >= 1.
    int radius = 1;

    int side() const noexcept { return 2 * radius + 1; }

    bool covers(int dx, int dy) const noexcept {
        if (std::abs(dx) > radius || std::abs(dy) > radius) return false;
        return shape == Shape::square || dx * dx + dy * dy <= radius * radius;
    }

    struct Offset {
        int dx, dy;
    };

    std::vector<Offset> footprint() const {
        require(radius >= 0, ErrorKind::parameter, "structuring element radius must be >= 0");
        std::vector<Offset> out;
        for (int dy = -radius; dy <= radius; ++dy)
            for (int dx = -radius; dx <= radius; ++dx)
                if (covers(dx, dy)) out.push_back({dx, dy});
        return out;
    }

    static StructuringElement square(int r) { return {Shape::square, r}; }
    static StructuringElement disc(int r) { return {Shape::disc, r}; }
};

inline std::string to_string(StructuringElement::Shape s) {
    return s == StructuringElement::Shape::square ? "square" : "disc";
}

inline StructuringElement::Shape parse_shape(const std::string& s) {
    if (s == "square") return StructuringElement::Shape::square;
    if (s == "disc") return StructuringElement::Shape::disc;
    fail(ErrorKind::parameter, "unknown structuring element shape '" + s + "'");
}

namespace detail {

template <class T, class Pick>
Raster<T> rank_filter(const Raster<T>& img, const StructuringElement& se, T border, Pick pick) {
    const auto fp = se.footprint();
    Raster<T> out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            bool first = true;
            T acc{};
            for (const auto& o : fp) {
                const int u = x + o.dx, v = y + o.dy;
                const T s = img.contains(u, v) ? img(u, v) : border;
                acc = first ? s : pick(acc, s);
                first = false;
            }
            out(x, y) = acc;
        }
    return out;
}

}  // namespace detail

/// Minimum over the footprint. Pixels outside the raster read as `border`
/// (0 unless the caller is forming a dual pair).
template <class T>
Raster<T> erode(const Raster<T>& img, const StructuringElement& se, T border = T{0}) {
    return detail::rank_filter(img, se, border, [](T a, T b) { return std::min(a, b); });
}

/// Maximum over the footprint, outside pixels read as `border`.
template <class T>
Raster<T> dilate(const Raster<T>& img, const StructuringElement& se, T border = T{0}) {
    return detail::rank_filter(img, se, border, [](T a, T b) { return std::max(a, b); });
}

/// Erode then dilate, both with zero exterior.
template <class T>
Raster<T> opening(const Raster<T>& img, const StructuringElement& se) {
    return dilate(erode(img, se), se);
}

/// Dilate with zero exterior, then erode with a saturated exterior; the
/// exterior is treated as the dual pair so closing stays extensive at the edge.
template <class T>
Raster<T> closing(const Raster<T>& img, const StructuringElement& se, T top) {
    return erode(dilate(img, se), se, top);
}

}  // namespace lineart
