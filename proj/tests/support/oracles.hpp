#pragma once

// Brute-force reference implementations and fixture generators. Nothing here
// calls into the library's algorithms; only the container types are shared.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <tuple>
#include <vector>

#include "lineart/raster.hpp"

namespace oracle {

using lineart::BinaryMask;
using lineart::GrayImage;
using lineart::Rgb;
using lineart::RgbImage;

inline bool in_footprint(bool disc, int r, int dx, int dy) {
    if (std::abs(dx) > r || std::abs(dy) > r) return false;
    return !disc || dx * dx + dy * dy <= r * r;
}

// Min (or max) over the footprint, reading `border` outside the raster.
template <class T>
lineart::Raster<T> rank_filter(const lineart::Raster<T>& img, bool disc, int r, bool take_min,
                               T border = T{0}) {
    lineart::Raster<T> out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            T best = take_min ? std::numeric_limits<T>::max() : std::numeric_limits<T>::lowest();
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    if (!in_footprint(disc, r, dx, dy)) continue;
                    const int u = x + dx, v = y + dy;
                    const bool inside = u >= 0 && v >= 0 && u < img.width() && v < img.height();
                    const T s = inside ? img(u, v) : border;
                    best = take_min ? std::min(best, s) : std::max(best, s);
                }
            out(x, y) = best;
        }
    return out;
}

inline GrayImage random_gray(std::mt19937_64& gen, int w, int h) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GrayImage img(w, h);
    for (double& v : img.pixels()) v = u(gen);
    return img;
}

inline BinaryMask random_mask(std::mt19937_64& gen, int w, int h, double p = 0.5) {
    std::bernoulli_distribution b(p);
    BinaryMask m(w, h);
    for (auto& v : m.pixels()) v = b(gen);
    return m;
}

inline RgbImage random_rgb(std::mt19937_64& gen, int w, int h) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RgbImage img(w, h);
    for (auto& p : img.pixels()) p = {u(gen), u(gen), u(gen)};
    return img;
}

// Direct 2-D convolution with the truncated Gaussian (radius ceil(3 sigma)),
// normalized over the 2-D window, clamp-to-edge sampling.
inline GrayImage gaussian_blur_2d(const GrayImage& img, double sigma) {
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    double norm = 0.0;
    for (int j = -r; j <= r; ++j)
        for (int i = -r; i <= r; ++i) norm += std::exp(-(i * i + j * j) / (2.0 * sigma * sigma));
    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            double acc = 0.0;
            for (int j = -r; j <= r; ++j)
                for (int i = -r; i <= r; ++i) {
                    const int u = std::clamp(x + i, 0, img.width() - 1);
                    const int v = std::clamp(y + j, 0, img.height() - 1);
                    acc += std::exp(-(i * i + j * j) / (2.0 * sigma * sigma)) * img(u, v);
                }
            out(x, y) = acc / norm;
        }
    return out;
}

// Per-window SSIM with means and population (co)variances from explicit loops.
inline double ssim_naive(const GrayImage& a, const GrayImage& b, int win, double c1, double c2) {
    double total = 0.0;
    int count = 0;
    for (int y0 = 0; y0 + win <= a.height(); ++y0)
        for (int x0 = 0; x0 + win <= a.width(); ++x0) {
            double ma = 0, mb = 0;
            for (int y = y0; y < y0 + win; ++y)
                for (int x = x0; x < x0 + win; ++x) {
                    ma += a(x, y);
                    mb += b(x, y);
                }
            const double n = double(win) * win;
            ma /= n;
            mb /= n;
            double va = 0, vb = 0, cov = 0;
            for (int y = y0; y < y0 + win; ++y)
                for (int x = x0; x < x0 + win; ++x) {
                    va += (a(x, y) - ma) * (a(x, y) - ma);
                    vb += (b(x, y) - mb) * (b(x, y) - mb);
                    cov += (a(x, y) - ma) * (b(x, y) - mb);
                }
            va /= n;
            vb /= n;
            cov /= n;
            total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    return total / count;
}

inline double psnr_naive(const GrayImage& a, const GrayImage& b, double peak) {
    double s = 0.0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) s += std::pow(a(x, y) - b(x, y), 2);
    return 10.0 * std::log10(peak * peak / (s / (a.width() * a.height())));
}

using Pt = std::pair<int, int>;

inline double directed_nn(const std::vector<Pt>& from, const std::vector<Pt>& to) {
    double s = 0.0;
    for (const auto& p : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : to)
            best = std::min(best, std::hypot(double(p.first - q.first), double(p.second - q.second)));
        s += best;
    }
    return s / from.size();
}

inline double chamfer_naive(const std::vector<Pt>& a, const std::vector<Pt>& b) {
    return 0.5 * (directed_nn(a, b) + directed_nn(b, a));
}

// Unique random points in [0,w) x [0,h).
inline std::vector<Pt> random_points(std::mt19937_64& gen, int n, int w, int h) {
    std::uniform_int_distribution<int> ux(0, w - 1), uy(0, h - 1);
    std::vector<Pt> out;
    while (static_cast<int>(out.size()) < n) {
        Pt p{ux(gen), uy(gen)};
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    return out;
}

// Enumerates every ordered pixel pair and counts those separated by an offset.
inline std::vector<double> glcm_counts_naive(const GrayImage& img, int levels,
                                             const std::vector<std::pair<int, int>>& offsets,
                                             bool symmetric) {
    std::vector<double> c(static_cast<std::size_t>(levels) * levels, 0.0);
    auto q = [&](double v) { return std::min(levels - 1, static_cast<int>(v * levels)); };
    const int n = img.width() * img.height();
    for (const auto& [dx, dy] : offsets)
        for (int p = 0; p < n; ++p)
            for (int r = 0; r < n; ++r) {
                const int px = p % img.width(), py = p / img.width();
                const int rx = r % img.width(), ry = r / img.width();
                if (rx - px != dx || ry - py != dy) continue;
                const int i = q(img(px, py)), j = q(img(rx, ry));
                c[static_cast<std::size_t>(i) * levels + j] += 1;
                if (symmetric) c[static_cast<std::size_t>(j) * levels + i] += 1;
            }
    return c;
}

inline double hist_loss_naive(const RgbImage& a, const RgbImage& b, int bins) {
    auto key = [bins](const Rgb& p) {
        auto q = [bins](double v) { return std::min(bins - 1, static_cast<int>(v * bins)); };
        return std::make_tuple(q(p.r), q(p.g), q(p.b));
    };
    std::map<std::tuple<int, int, int>, double> ha, hb;
    for (const auto& p : a.pixels()) ha[key(p)] += 1.0 / a.size();
    for (const auto& p : b.pixels()) hb[key(p)] += 1.0 / b.size();
    double s = 0.0;
    for (const auto& [k, v] : ha) s += std::abs(v - (hb.count(k) ? hb[k] : 0.0));
    for (const auto& [k, v] : hb)
        if (!ha.count(k)) s += v;
    return 0.5 * s;
}

// Synthetic "photo": smooth illumination field times a textured reflectance,
// plus sensor noise.
inline GrayImage fixture_photo(std::uint64_t seed, int w, int h) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.04);
    const double fx = 0.2 + 0.6 * u(gen), fy = 0.2 + 0.6 * u(gen), phase = 6.28 * u(gen);
    const double lx = u(gen), ly = u(gen);
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double light =
                0.35 + 0.5 * std::exp(-(std::pow(x / double(w) - lx, 2) + std::pow(y / double(h) - ly, 2)) / 0.3);
            const double tex = 0.6 + 0.25 * std::sin(fx * x + phase) * std::cos(fy * y);
            img(x, y) = std::clamp(light * tex + noise(gen), 0.0, 1.0);
        }
    return img;
}

}  // namespace oracle
