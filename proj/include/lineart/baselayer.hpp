#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "lineart/raster.hpp"

namespace lineart {

/// Normalized Gaussian taps over [-ceil(3 sigma), ceil(3 sigma)].
inline std::vector<double> gaussian_kernel(double sigma) {
    require(sigma > 0.0, ErrorKind::parameter, "gaussian sigma must be > 0");
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
    for (int i = -r; i <= r; ++i)
        k[static_cast<std::size_t>(i + r)] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    const double s = std::accumulate(k.begin(), k.end(), 0.0);
    for (double& v : k) v /= s;
    return k;
}

namespace detail {

// 1-D convolution with clamp-to-edge. Taps falling off either end are folded
// onto the edge sample via prefix sums, so cost is bounded by the line length
// even when the kernel is wider than the image.
inline void blur_line(const double* in, double* out, int n, std::ptrdiff_t stride,
                      const std::vector<double>& k, const std::vector<double>& prefix) {
    const int r = static_cast<int>(k.size() / 2);
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - r), hi = std::min(n - 1, i + r);
        // taps t = j - i + r for j in [lo, hi]; below lo map to sample 0, above hi to n-1
        double acc = prefix[static_cast<std::size_t>(lo - i + r)] * in[0];
        acc += (prefix.back() - prefix[static_cast<std::size_t>(hi - i + r + 1)]) *
               in[static_cast<std::ptrdiff_t>(n - 1) * stride];
        for (int j = lo; j <= hi; ++j)
            acc += k[static_cast<std::size_t>(j - i + r)] * in[static_cast<std::ptrdiff_t>(j) * stride];
        out[static_cast<std::ptrdiff_t>(i) * stride] = acc;
    }
}

}  // namespace detail

/// Separable Gaussian blur, clamp-to-edge border.
inline GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    const auto k = gaussian_kernel(sigma);
    std::vector<double> prefix(k.size() + 1, 0.0);
    std::partial_sum(k.begin(), k.end(), prefix.begin() + 1);

    const int w = img.width(), h = img.height();
    GrayImage tmp(w, h), out(w, h);
    for (int y = 0; y < h; ++y)
        detail::blur_line(&img(0, y), &tmp(0, y), w, 1, k, prefix);
    for (int x = 0; x < w; ++x)
        detail::blur_line(&tmp(x, 0), &out(x, 0), h, w, k, prefix);
    return out;
}

struct RetinexParams {
    std::vector<double> scales{15.0, 80.0, 250.0};
    std::vector<double> weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    double epsilon = 1e-4;
};

struct IlluminationMap {
    GrayImage image;
    std::vector<double> scales;
    std::vector<double> weights;
};

inline void validate(const RetinexParams& p) {
    require(!p.scales.empty() && p.scales.size() == p.weights.size(), ErrorKind::parameter,
            "retinex: need one weight per scale");
    for (std::size_t i = 0; i < p.scales.size(); ++i) {
        require(p.scales[i] > 0.0, ErrorKind::parameter, "retinex: scales must be > 0");
        require(i == 0 || p.scales[i] > p.scales[i - 1], ErrorKind::parameter,
                "retinex: scales must be strictly increasing");
        require(p.weights[i] >= 0.0, ErrorKind::parameter, "retinex: weights must be >= 0");
    }
    const double sum = std::accumulate(p.weights.begin(), p.weights.end(), 0.0);
    require(std::abs(sum - 1.0) <= 1e-9, ErrorKind::parameter,
            "retinex: weights must sum to 1, got " + std::to_string(sum));
    require(p.epsilon > 0.0, ErrorKind::parameter, "retinex: epsilon must be > 0");
}

/// Multi-scale Retinex illumination estimate: weighted sum of
/// log(blur_s(I) + eps) over scales, min-max normalized to [0,1]. A flat
/// result (zero range) maps back out of the log domain, so a uniform input
/// returns its own value.
inline IlluminationMap retinex_illumination(const GrayImage& appearance,
                                            const RetinexParams& params = {}) {
    validate(params);
    GrayImage combined(appearance.width(), appearance.height());
    for (std::size_t s = 0; s < params.scales.size(); ++s) {
        if (params.weights[s] == 0.0) continue;
        const GrayImage blurred = gaussian_blur(appearance, params.scales[s]);
        for (std::size_t i = 0; i < combined.size(); ++i)
            combined.pixels()[i] +=
                params.weights[s] * std::log(blurred.pixels()[i] + params.epsilon);
    }
    const auto [lo_it, hi_it] = std::minmax_element(combined.pixels().begin(), combined.pixels().end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi - lo <= 1e-12) {
        for (double& v : combined.pixels()) v = std::clamp(std::exp(v) - params.epsilon, 0.0, 1.0);
    } else {
        for (double& v : combined.pixels()) v = (v - lo) / (hi - lo);
    }
    return {std::move(combined), params.scales, params.weights};
}

struct BrightnessStats {
    double l_mean = 0.0;  // [0,1]
    double sigma2 = 0.0;  // population variance
    double l_mean_255() const { return l_mean * 255.0; }
};

inline BrightnessStats brightness_analysis(const GrayImage& illum) {
    const auto n = static_cast<double>(illum.size());
    const double mean = std::accumulate(illum.pixels().begin(), illum.pixels().end(), 0.0) / n;
    double ss = 0.0;
    for (double v : illum.pixels()) ss += (v - mean) * (v - mean);
    return {mean, ss / n};
}

inline BrightnessStats brightness_analysis(const IlluminationMap& illum) {
    return brightness_analysis(illum.image);
}

/// Pixel-space brightness in [0,1] to the latent value domain: (2v - 1) * scale.
struct LatentMapping {
    double scale = 1.0;
    double to_latent(double pixel) const { return (2.0 * pixel - 1.0) * scale; }
    double to_pixel(double latent) const { return (latent / scale + 1.0) / 2.0; }
};

class LatentGrid {
public:
    LatentGrid() = default;
    LatentGrid(int channels, int width, int height, double fill = 0.0)
        : channels_(channels), width_(width), height_(height) {
        require(channels >= 1 && width >= 1 && height >= 1, ErrorKind::parameter,
                "latent dimensions must be >= 1");
        data_.assign(static_cast<std::size_t>(channels) * width * height, fill);
    }
    LatentGrid(int channels, int width, int height, std::vector<double> data)
        : LatentGrid(channels, width, height) {
        require(data.size() == data_.size(), ErrorKind::parameter,
                "latent data length does not match channels x width x height");
        data_ = std::move(data);
    }

    int channels() const noexcept { return channels_; }
    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    double& at(int c, int x, int y) noexcept {
        return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
    }

    bool same_shape(const LatentGrid& o) const noexcept {
        return channels_ == o.channels_ && width_ == o.width_ && height_ == o.height_;
    }

    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
    }

    double mean() const {
        return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(size());
    }
    double variance() const {
        const double m = mean();
        double ss = 0.0;
        for (double v : data_) ss += (v - m) * (v - m);
        return ss / static_cast<double>(size());
    }

    friend bool operator==(const LatentGrid&, const LatentGrid&) = default;

private:
    int channels_ = 0;
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// x0' = target + (x0 - target) * factor, elementwise. Evaluated as the
/// equivalent convex combination so factor 1 and 0 are exact.
inline LatentGrid shape_base_layer(const LatentGrid& x0, double l_mean_target, double factor = 0.5) {
    require(std::isfinite(l_mean_target), ErrorKind::parameter, "l_mean_target must be finite");
    require(factor >= 0.0 && factor <= 1.0, ErrorKind::parameter, "blend factor must be in [0,1]");
    require(x0.all_finite(), ErrorKind::input, "x0 contains non-finite values");
    LatentGrid out = x0;
    for (double& v : out.values()) v = factor * v + (1.0 - factor) * l_mean_target;
    return out;
}

struct NoiseSchedule {
    int num_steps = 0;
    double beta_start = 0.0;
    double beta_end = 0.0;
    std::vector<double> betas;       // betas[t-1] is beta_t
    std::vector<double> alpha_bars;  // alpha_bars[t-1] is prod_{s<=t}(1 - beta_s)

    double alpha_bar(int t) const {
        require(t >= 1 && t <= num_steps, ErrorKind::parameter,
                "timestep " + std::to_string(t) + " outside [1, " + std::to_string(num_steps) + "]");
        return alpha_bars[static_cast<std::size_t>(t - 1)];
    }
};

/// Linear beta schedule; beta_t = beta_start when T == 1.
inline NoiseSchedule build_schedule(int steps = 1000, double beta_start = 1e-4,
                                    double beta_end = 0.02) {
    require(steps >= 1, ErrorKind::parameter, "schedule needs T >= 1");
    require(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0, ErrorKind::parameter,
            "schedule needs 0 < beta_start <= beta_end < 1");
    NoiseSchedule s{steps, beta_start, beta_end, {}, {}};
    s.betas.resize(static_cast<std::size_t>(steps));
    s.alpha_bars.resize(static_cast<std::size_t>(steps));
    double prod = 1.0;
    for (int t = 0; t < steps; ++t) {
        const double beta =
            steps == 1 ? beta_start : beta_start + (beta_end - beta_start) * t / (steps - 1.0);
        prod *= 1.0 - beta;
        s.betas[static_cast<std::size_t>(t)] = beta;
        s.alpha_bars[static_cast<std::size_t>(t)] = prod;
    }
    for (std::size_t t = 0; t < s.alpha_bars.size(); ++t) {
        require(s.alpha_bars[t] > 0.0 && s.alpha_bars[t] < 1.0, ErrorKind::parameter,
                "schedule: alpha_bar left (0,1)");
        require(t == 0 || s.alpha_bars[t] < s.alpha_bars[t - 1], ErrorKind::parameter,
                "schedule: alpha_bar not strictly decreasing");
    }
    return s;
}

/// x_t = sqrt(alpha_bar) x0' + sqrt(1 - alpha_bar) z for an explicit alpha_bar in [0,1].
inline LatentGrid forward_noise(const LatentGrid& x0p, double alpha_bar, const LatentGrid& z) {
    require(x0p.same_shape(z), ErrorKind::parameter, "forward_noise: noise shape differs from x0'");
    require(alpha_bar >= 0.0 && alpha_bar <= 1.0, ErrorKind::parameter,
            "forward_noise: alpha_bar must be in [0,1]");
    const double a = std::sqrt(alpha_bar), b = std::sqrt(1.0 - alpha_bar);
    LatentGrid out = x0p;
    auto zv = z.values();
    auto ov = out.values();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = a * ov[i] + b * zv[i];
    return out;
}

inline LatentGrid forward_noise(const LatentGrid& x0p, int t, const NoiseSchedule& schedule,
                                const LatentGrid& z) {
    return forward_noise(x0p, schedule.alpha_bar(t), z);
}

}  // namespace lineart
