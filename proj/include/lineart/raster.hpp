#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lineart/error.hpp"

namespace lineart {

/// Row-major 2-D raster. Every image, mask, and coefficient plane in the
/// library is one of these; the pixel type carries the meaning.
template <class T>
class Raster {
public:
    using value_type = T;

    Raster() = default;

    Raster(int width, int height, T fill = T{})
        : width_(width), height_(height) {
        require(width >= 1 && height >= 1, ErrorKind::parameter,
                "raster dimensions must be >= 1, got " + std::to_string(width) + "x" +
                    std::to_string(height));
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    Raster(int width, int height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data)) {
        require(width >= 1 && height >= 1, ErrorKind::parameter, "raster dimensions must be >= 1");
        require(data_.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                ErrorKind::parameter, "raster data length does not match width x height");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    bool contains(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    T& operator()(int x, int y) noexcept {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }
    const T& operator()(int x, int y) const noexcept {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }

    std::span<T> pixels() noexcept { return data_; }
    std::span<const T> pixels() const noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

    bool same_shape(const auto& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// Luminance in [0,1] for images; unconstrained for coefficient planes.
using GrayImage = Raster<double>;
/// Values in {0,1}, 1 = foreground.
using BinaryMask = Raster<std::uint8_t>;

struct Rgb {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

using RgbImage = Raster<Rgb>;

inline void require_same_shape(const auto& a, const auto& b, const std::string& what) {
    require(a.same_shape(b), ErrorKind::parameter,
            what + ": dimension mismatch (" + std::to_string(a.width()) + "x" +
                std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                std::to_string(b.height()) + ")");
}

inline void require_unit_range(const GrayImage& img, const std::string& what) {
    for (double v : img.pixels())
        require(v >= 0.0 && v <= 1.0, ErrorKind::input, what + ": pixel value outside [0,1]");
}

inline void require_binary(const BinaryMask& mask, const std::string& what) {
    for (auto v : mask.pixels())
        require(v <= 1, ErrorKind::input, what + ": mask value is not 0 or 1");
}

inline GrayImage invert(const GrayImage& img) {
    GrayImage out = img;
    for (double& v : out.pixels()) v = 1.0 - v;
    return out;
}

inline GrayImage to_gray(const BinaryMask& mask) {
    GrayImage out(mask.width(), mask.height());
    std::transform(mask.pixels().begin(), mask.pixels().end(), out.pixels().begin(),
                   [](std::uint8_t v) { return v ? 1.0 : 0.0; });
    return out;
}

inline BinaryMask threshold_above(const GrayImage& img, double t) {
    BinaryMask out(img.width(), img.height());
    std::transform(img.pixels().begin(), img.pixels().end(), out.pixels().begin(),
                   [t](double v) { return static_cast<std::uint8_t>(v > t); });
    return out;
}

/// Rec. 601 luma.
inline GrayImage luminance(const RgbImage& img) {
    GrayImage out(img.width(), img.height());
    std::transform(img.pixels().begin(), img.pixels().end(), out.pixels().begin(),
                   [](const Rgb& p) { return 0.299 * p.r + 0.587 * p.g + 0.114 * p.b; });
    return out;
}

inline RgbImage to_rgb(const GrayImage& img) {
    RgbImage out(img.width(), img.height());
    std::transform(img.pixels().begin(), img.pixels().end(), out.pixels().begin(),
                   [](double v) { return Rgb{v, v, v}; });
    return out;
}

inline std::size_t count_nonzero(const BinaryMask& mask) {
    return static_cast<std::size_t>(std::count_if(mask.pixels().begin(), mask.pixels().end(),
                                                  [](std::uint8_t v) { return v != 0; }));
}

struct Box {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
    friend bool operator==(const Box&, const Box&) = default;
};

/// Bounding box of the nonzero pixels; w == 0 when the mask is empty.
inline Box bounding_box(const BinaryMask& mask) {
    int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask(x, y)) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
    if (x1 < 0) return {};
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

template <class T>
Raster<T> crop(const Raster<T>& img, const Box& box) {
    require(box.w >= 1 && box.h >= 1 && box.x >= 0 && box.y >= 0 &&
                box.x + box.w <= img.width() && box.y + box.h <= img.height(),
            ErrorKind::parameter, "crop box outside image");
    Raster<T> out(box.w, box.h);
    for (int y = 0; y < box.h; ++y)
        for (int x = 0; x < box.w; ++x) out(x, y) = img(box.x + x, box.y + y);
    return out;
}

/// Bilinear resampling with pixel-center alignment.
inline GrayImage resize_bilinear(const GrayImage& img, int width, int height) {
    GrayImage out(width, height);
    const double sx = static_cast<double>(img.width()) / width;
    const double sy = static_cast<double>(img.height()) / height;
    for (int y = 0; y < height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height() - 1);
        const double ty = fy - y0;
        for (int x = 0; x < width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width() - 1);
            const double tx = fx - x0;
            const double top = img(x0, y0) * (1 - tx) + img(x1, y0) * tx;
            const double bot = img(x0, y1) * (1 - tx) + img(x1, y1) * tx;
            out(x, y) = top * (1 - ty) + bot * ty;
        }
    }
    return out;
}

inline RgbImage resize_bilinear(const RgbImage& img, int width, int height) {
    GrayImage r(img.width(), img.height()), g(img.width(), img.height()),
        b(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        r.pixels()[i] = img.pixels()[i].r;
        g.pixels()[i] = img.pixels()[i].g;
        b.pixels()[i] = img.pixels()[i].b;
    }
    r = resize_bilinear(r, width, height);
    g = resize_bilinear(g, width, height);
    b = resize_bilinear(b, width, height);
    RgbImage out(width, height);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.pixels()[i] = {r.pixels()[i], g.pixels()[i], b.pixels()[i]};
    return out;
}

}  // namespace lineart
