#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lineart/linefusion.hpp"
#include "lineart/raster.hpp"

namespace lineart {

// ---------------------------------------------------------------- SSIM / PSNR

struct SsimParams {
    int window = 8;
    double dynamic_range = 1.0;
    double k1 = 0.01;
    double k2 = 0.03;
    double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
};

namespace detail {

// (w+1) x (h+1) summed-area table of f(a, b).
template <class F>
std::vector<double> integral(const GrayImage& a, const GrayImage& b, F f) {
    const int w = a.width(), h = a.height();
    std::vector<double> s(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
    for (int y = 0; y < h; ++y) {
        double row = 0.0;
        for (int x = 0; x < w; ++x) {
            row += f(a(x, y), b(x, y));
            s[static_cast<std::size_t>(y + 1) * (w + 1) + x + 1] =
                s[static_cast<std::size_t>(y) * (w + 1) + x + 1] + row;
        }
    }
    return s;
}

inline double box_sum(const std::vector<double>& s, int stride, int x, int y, int n) {
    auto at = [&](int u, int v) { return s[static_cast<std::size_t>(v) * stride + u]; };
    return at(x + n, y + n) - at(x, y + n) - at(x + n, y) + at(x, y);
}

}  // namespace detail

/// Mean SSIM over every window position (stride 1, uniform weights,
/// population statistics). The window shrinks to fit images smaller than it.
inline double ssim(const GrayImage& a, const GrayImage& b, const SsimParams& p = {}) {
    require_same_shape(a, b, "ssim");
    require(p.window >= 1, ErrorKind::parameter, "ssim window must be >= 1");
    const int n = std::min({p.window, a.width(), a.height()});
    const int stride = a.width() + 1;
    const auto sa = detail::integral(a, b, [](double u, double) { return u; });
    const auto sb = detail::integral(a, b, [](double, double v) { return v; });
    const auto saa = detail::integral(a, b, [](double u, double) { return u * u; });
    const auto sbb = detail::integral(a, b, [](double, double v) { return v * v; });
    const auto sab = detail::integral(a, b, [](double u, double v) { return u * v; });
    const double c1 = p.c1(), c2 = p.c2(), area = static_cast<double>(n) * n;

    double total = 0.0;
    std::size_t count = 0;
    for (int y = 0; y + n <= a.height(); ++y)
        for (int x = 0; x + n <= a.width(); ++x) {
            const double ma = detail::box_sum(sa, stride, x, y, n) / area;
            const double mb = detail::box_sum(sb, stride, x, y, n) / area;
            const double va = detail::box_sum(saa, stride, x, y, n) / area - ma * ma;
            const double vb = detail::box_sum(sbb, stride, x, y, n) / area - mb * mb;
            const double cov = detail::box_sum(sab, stride, x, y, n) / area - ma * mb;
            total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                     ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    return total / static_cast<double>(count);
}

inline double mse(const GrayImage& a, const GrayImage& b) {
    require_same_shape(a, b, "mse");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.pixels()[i] - b.pixels()[i];
        s += d * d;
    }
    return s / static_cast<double>(a.size());
}

inline double mse(const RgbImage& a, const RgbImage& b) {
    require_same_shape(a, b, "mse");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Rgb &p = a.pixels()[i], &q = b.pixels()[i];
        s += (p.r - q.r) * (p.r - q.r) + (p.g - q.g) * (p.g - q.g) + (p.b - q.b) * (p.b - q.b);
    }
    return s / (3.0 * static_cast<double>(a.size()));
}

/// 10 log10(peak^2 / MSE); identical inputs return cap_db.
template <class Image>
double psnr(const Image& a, const Image& b, double peak = 1.0, double cap_db = 100.0) {
    const double m = mse(a, b);
    if (m == 0.0) return cap_db;
    return std::min(cap_db, 10.0 * std::log10(peak * peak / m));
}

// ---------------------------------------------------------------- chamfer

struct EdgePointSet {
    struct Point {
        int x, y;
        friend bool operator==(const Point&, const Point&) = default;
        friend auto operator<=>(const Point&, const Point&) = default;
    };
    std::vector<Point> points;
    int source_width = 0;
    int source_height = 0;
};

inline EdgePointSet edge_points(const BinaryMask& edges) {
    EdgePointSet s{{}, edges.width(), edges.height()};
    for (int y = 0; y < edges.height(); ++y)
        for (int x = 0; x < edges.width(); ++x)
            if (edges(x, y)) s.points.push_back({x, y});
    return s;
}

namespace detail {

// 1-D squared distance transform of a sampled function (lower envelope of parabolas).
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d) {
    const int n = static_cast<int>(f.size());
    std::vector<int> v(static_cast<std::size_t>(n));
    std::vector<double> z(static_cast<std::size_t>(n) + 1);
    constexpr double inf = std::numeric_limits<double>::infinity();
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[static_cast<std::size_t>(q)] == inf) continue;
        double s = -inf;
        while (k >= 0) {
            const int p = v[static_cast<std::size_t>(k)];
            s = ((f[static_cast<std::size_t>(q)] + double(q) * q) -
                 (f[static_cast<std::size_t>(p)] + double(p) * p)) /
                (2.0 * (q - p));
            if (s > z[static_cast<std::size_t>(k)]) break;
            --k;
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = k == 0 ? -inf : s;
        z[static_cast<std::size_t>(k) + 1] = inf;
    }
    if (k < 0) {
        std::fill(d.begin(), d.end(), inf);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[static_cast<std::size_t>(j) + 1] < q) ++j;
        const int p = v[static_cast<std::size_t>(j)];
        d[static_cast<std::size_t>(q)] = double(q - p) * (q - p) + f[static_cast<std::size_t>(p)];
    }
}

}  // namespace detail

/// Exact squared Euclidean distance to the nearest set pixel.
inline GrayImage squared_distance_transform(const BinaryMask& sites) {
    const int w = sites.width(), h = sites.height();
    constexpr double inf = std::numeric_limits<double>::infinity();
    GrayImage out(w, h);
    std::vector<double> f, d;
    f.resize(static_cast<std::size_t>(h));
    d.resize(static_cast<std::size_t>(h));
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[static_cast<std::size_t>(y)] = sites(x, y) ? 0.0 : inf;
        detail::edt_1d(f, d);
        for (int y = 0; y < h; ++y) out(x, y) = d[static_cast<std::size_t>(y)];
    }
    f.resize(static_cast<std::size_t>(w));
    d.resize(static_cast<std::size_t>(w));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[static_cast<std::size_t>(x)] = out(x, y);
        detail::edt_1d(f, d);
        for (int x = 0; x < w; ++x) out(x, y) = d[static_cast<std::size_t>(x)];
    }
    return out;
}

/// Symmetric chamfer distance: mean of the two directed mean nearest-neighbor
/// distances, evaluated on a shared grid through the distance transform.
inline double chamfer(const EdgePointSet& a, const EdgePointSet& b) {
    require(!a.points.empty() && !b.points.empty(), ErrorKind::input,
            "chamfer: edge point set is empty");
    int w = std::max(a.source_width, b.source_width), h = std::max(a.source_height, b.source_height);
    for (const auto* s : {&a, &b})
        for (const auto& p : s->points) {
            require(p.x >= 0 && p.y >= 0, ErrorKind::parameter, "chamfer: negative coordinate");
            w = std::max(w, p.x + 1);
            h = std::max(h, p.y + 1);
        }
    auto directed = [w, h](const EdgePointSet& from, const EdgePointSet& to) {
        BinaryMask sites(w, h);
        for (const auto& p : to.points) sites(p.x, p.y) = 1;
        const GrayImage dt = squared_distance_transform(sites);
        double s = 0.0;
        for (const auto& p : from.points) s += std::sqrt(dt(p.x, p.y));
        return s / static_cast<double>(from.points.size());
    };
    return 0.5 * (directed(a, b) + directed(b, a));
}

// ---------------------------------------------------------------- GLCM

struct GlcmOffset {
    int dx, dy;
    friend bool operator==(const GlcmOffset&, const GlcmOffset&) = default;
};

struct GlcmParams {
    int levels = 8;
    std::vector<GlcmOffset> offsets{{1, 0}, {0, 1}, {1, 1}, {1, -1}};
    bool symmetric = true;
    friend bool operator==(const GlcmParams&, const GlcmParams&) = default;
};

struct GLCMMatrix {
    GlcmParams params;
    std::vector<double> counts;  // levels x levels, row = reference gray level
    std::vector<double> p;       // counts / total

    int levels() const { return params.levels; }
    double count(int i, int j) const {
        return counts[static_cast<std::size_t>(i) * params.levels + j];
    }
    double prob(int i, int j) const { return p[static_cast<std::size_t>(i) * params.levels + j]; }
};

inline int quantize(double v, int levels) {
    return std::clamp(static_cast<int>(std::floor(v * levels)), 0, levels - 1);
}

inline GLCMMatrix glcm(const GrayImage& img, const GlcmParams& params = {}) {
    require(params.levels >= 2, ErrorKind::parameter, "glcm levels must be >= 2");
    require(!params.offsets.empty(), ErrorKind::parameter, "glcm needs at least one offset");
    const int L = params.levels;
    GrayImage q(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) q.pixels()[i] = quantize(img.pixels()[i], L);

    GLCMMatrix m{params, std::vector<double>(static_cast<std::size_t>(L) * L, 0.0), {}};
    auto bump = [&](int i, int j) { m.counts[static_cast<std::size_t>(i) * L + j] += 1.0; };
    for (const auto& o : params.offsets) {
        const int y_lo = std::max(0, -o.dy), y_hi = std::min(img.height(), img.height() - o.dy);
        const int x_lo = std::max(0, -o.dx), x_hi = std::min(img.width(), img.width() - o.dx);
        for (int y = y_lo; y < y_hi; ++y)
            for (int x = x_lo; x < x_hi; ++x) {
                const int i = static_cast<int>(q(x, y)), j = static_cast<int>(q(x + o.dx, y + o.dy));
                bump(i, j);
                if (params.symmetric) bump(j, i);
            }
    }
    double total = 0.0;
    for (double c : m.counts) total += c;
    require(total > 0.0, ErrorKind::input, "glcm: image too small for the requested offsets");
    m.p.resize(m.counts.size());
    std::transform(m.counts.begin(), m.counts.end(), m.p.begin(),
                   [total](double c) { return c / total; });
    return m;
}

enum class GlcmStatistic { contrast, homogeneity, energy };

inline std::string to_string(GlcmStatistic s) {
    switch (s) {
        case GlcmStatistic::contrast: return "contrast";
        case GlcmStatistic::homogeneity: return "homogeneity";
        case GlcmStatistic::energy: return "energy";
    }
    return {};
}

inline GlcmStatistic parse_glcm_statistic(const std::string& s) {
    if (s == "contrast") return GlcmStatistic::contrast;
    if (s == "homogeneity") return GlcmStatistic::homogeneity;
    if (s == "energy") return GlcmStatistic::energy;
    fail(ErrorKind::parameter, "unknown glcm statistic '" + s + "'");
}

/// contrast = sum p (i-j)^2; homogeneity = sum p / (1 + (i-j)^2); energy = sqrt(sum p^2).
inline double glcm_statistic(const GLCMMatrix& m, GlcmStatistic stat) {
    double s = 0.0;
    for (int i = 0; i < m.levels(); ++i)
        for (int j = 0; j < m.levels(); ++j) {
            const double p = m.prob(i, j), d2 = double(i - j) * (i - j);
            switch (stat) {
                case GlcmStatistic::contrast: s += p * d2; break;
                case GlcmStatistic::homogeneity: s += p / (1.0 + d2); break;
                case GlcmStatistic::energy: s += p * p; break;
            }
        }
    return stat == GlcmStatistic::energy ? std::sqrt(s) : s;
}

inline double glcm_distance(const GLCMMatrix& a, const GLCMMatrix& b,
                            GlcmStatistic stat = GlcmStatistic::contrast) {
    require(a.params == b.params, ErrorKind::parameter,
            "glcm_distance: matrices built with different levels/offsets");
    return std::abs(glcm_statistic(a, stat) - glcm_statistic(b, stat));
}

// ---------------------------------------------------------------- color histogram

/// Normalized joint RGB histogram, bins^3 cells, index (r * bins + g) * bins + b.
inline std::vector<double> color_histogram(const RgbImage& img, int bins = 8) {
    require(bins >= 1, ErrorKind::parameter, "histogram bins must be >= 1");
    require(!img.empty(), ErrorKind::input, "color histogram of an empty image");
    std::vector<double> h(static_cast<std::size_t>(bins) * bins * bins, 0.0);
    for (const Rgb& p : img.pixels()) {
        const int r = quantize(p.r, bins), g = quantize(p.g, bins), b = quantize(p.b, bins);
        h[(static_cast<std::size_t>(r) * bins + g) * bins + b] += 1.0;
    }
    for (double& v : h) v /= static_cast<double>(img.size());
    return h;
}

/// Total-variation distance between joint color histograms, in [0,1].
inline double color_hist_loss(const RgbImage& a, const RgbImage& b, int bins = 8) {
    const auto ha = color_histogram(a, bins), hb = color_histogram(b, bins);
    double s = 0.0;
    for (std::size_t i = 0; i < ha.size(); ++i) s += std::abs(ha[i] - hb[i]);
    return 0.5 * s;
}

// ---------------------------------------------------------------- report

struct MetricParams {
    SsimParams ssim;
    double psnr_peak = 1.0;
    double psnr_cap_db = 100.0;
    GlcmParams glcm;
    GlcmStatistic glcm_statistic = GlcmStatistic::contrast;
    int ch_bins = 8;
    double edge_threshold = 0.2;
    int edge_haar_levels = 2;
};

struct MetricReport {
    std::string id;
    double ssim = 0.0;
    double psnr_db = 0.0;
    bool psnr_capped = false;
    double chamfer = 0.0;
    double glcm_distance = 0.0;
    double ch_loss = 0.0;
    bool appearance_resampled = false;
    MetricParams parameters;
    // Filled in by external tools; never computed here.
    std::optional<double> fid, lpips, clip_i;
};

/// Edge map of a generated image: Haar detail magnitude, normalized to [0,1].
inline GrayImage generated_edge_map(const RgbImage& generated, int levels) {
    const GrayImage lum = luminance(generated);
    return detail_magnitude(lum, std::min(levels, max_haar_levels(lum.width(), lum.height())));
}

/// Routing: SSIM and chamfer compare the condition against the generated
/// image's edge map; PSNR, GLCM and the color histogram compare the generated
/// image against the appearance reference (resampled to the generated size
/// for PSNR when dimensions differ).
inline MetricReport evaluate_pair(const RgbImage& generated, const GrayImage& condition,
                                  const RgbImage& appearance, const MetricParams& params = {},
                                  std::string id = {}) {
    MetricReport r;
    r.id = std::move(id);
    r.parameters = params;

    const GrayImage edges = generated_edge_map(generated, params.edge_haar_levels);
    const GrayImage cond = condition.same_shape(edges)
                               ? condition
                               : resize_bilinear(condition, edges.width(), edges.height());
    r.ssim = ssim(cond, edges, params.ssim);
    r.chamfer = chamfer(edge_points(threshold_above(cond, params.edge_threshold)),
                        edge_points(threshold_above(edges, params.edge_threshold)));

    RgbImage ref = appearance;
    if (!ref.same_shape(generated)) {
        ref = resize_bilinear(appearance, generated.width(), generated.height());
        r.appearance_resampled = true;
    }
    r.psnr_db = psnr(generated, ref, params.psnr_peak, params.psnr_cap_db);
    r.psnr_capped = r.psnr_db >= params.psnr_cap_db;
    r.glcm_distance = glcm_distance(glcm(luminance(generated), params.glcm),
                                    glcm(luminance(appearance), params.glcm), params.glcm_statistic);
    r.ch_loss = color_hist_loss(generated, appearance, params.ch_bins);
    return r;
}

}  // namespace lineart
