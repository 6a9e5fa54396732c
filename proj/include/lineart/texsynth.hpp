#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lineart/linefusion.hpp"
#include "lineart/raster.hpp"
#include "lineart/rng.hpp"

namespace lineart {

struct AppearanceImage {
    RgbImage rgb;         // invalid pixels hold (0,0,0)
    BinaryMask validity;  // 1 = material pixel
};

struct PatchGrid {
    struct Origin {
        int x, y;
        friend bool operator==(const Origin&, const Origin&) = default;
    };

    int patch_size = 0;
    std::vector<RgbImage> patches;
    std::vector<Origin> source_coords;
};

enum class SamplingMode { with_replacement, without_replacement };

inline std::string to_string(SamplingMode m) {
    return m == SamplingMode::with_replacement ? "with_replacement" : "without_replacement";
}

inline SamplingMode parse_sampling_mode(const std::string& s) {
    if (s == "with_replacement") return SamplingMode::with_replacement;
    if (s == "without_replacement") return SamplingMode::without_replacement;
    fail(ErrorKind::parameter, "unknown sampling mode '" + s + "'");
}

struct TextureReference {
    RgbImage image;
    std::uint64_t seed = 0;
    int patch_size = 0;
    int source_patch_count = 0;
    SamplingMode mode = SamplingMode::with_replacement;
};

inline constexpr double kBackgroundColorTolerance = 0.08;

namespace detail {

inline double median(std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

// Border-connected pixels close to the median border color.
inline BinaryMask border_color_background(const RgbImage& photo, double tolerance) {
    const auto border = border_pixels(photo.width(), photo.height());
    std::vector<double> r, g, b;
    for (const auto& p : border) {
        r.push_back(photo(p.x, p.y).r);
        g.push_back(photo(p.x, p.y).g);
        b.push_back(photo(p.x, p.y).b);
    }
    const Rgb ref{median(r), median(g), median(b)};
    BinaryMask similar(photo.width(), photo.height());
    for (std::size_t i = 0; i < photo.size(); ++i) {
        const Rgb& p = photo.pixels()[i];
        const double d = std::sqrt((p.r - ref.r) * (p.r - ref.r) + (p.g - ref.g) * (p.g - ref.g) +
                                   (p.b - ref.b) * (p.b - ref.b));
        similar.pixels()[i] = d <= tolerance;
    }
    return flood(similar, border, false);
}

}  // namespace detail

/// Keeps only the material pixels of the reference photo. With no mask, the
/// border-color flood heuristic decides what is background.
inline AppearanceImage remove_background(const RgbImage& photo,
                                         const std::optional<BinaryMask>& mask = std::nullopt) {
    AppearanceImage out{photo, BinaryMask(photo.width(), photo.height())};
    if (mask) {
        require_same_shape(photo, *mask, "remove_background");
        require_binary(*mask, "remove_background");
        out.validity = *mask;
    } else {
        const BinaryMask bg = detail::border_color_background(photo, kBackgroundColorTolerance);
        for (std::size_t i = 0; i < bg.size(); ++i) out.validity.pixels()[i] = !bg.pixels()[i];
    }
    require(count_nonzero(out.validity) > 0, ErrorKind::input,
            "appearance mask covers zero pixels");
    for (std::size_t i = 0; i < out.rgb.size(); ++i)
        if (!out.validity.pixels()[i]) out.rgb.pixels()[i] = Rgb{};
    return out;
}

/// Non-overlapping patch_size tiles whose pixels are all valid, in raster order.
inline PatchGrid extract_patches(const AppearanceImage& img, int patch_size = 64) {
    require(patch_size >= 4, ErrorKind::parameter, "patch_size must be >= 4");
    PatchGrid grid;
    grid.patch_size = patch_size;
    for (int ty = 0; ty + patch_size <= img.rgb.height(); ty += patch_size)
        for (int tx = 0; tx + patch_size <= img.rgb.width(); tx += patch_size) {
            bool valid = true;
            for (int y = ty; y < ty + patch_size && valid; ++y)
                for (int x = tx; x < tx + patch_size && valid; ++x) valid = img.validity(x, y) != 0;
            if (!valid) continue;
            grid.patches.push_back(crop(img.rgb, {tx, ty, patch_size, patch_size}));
            grid.source_coords.push_back({tx, ty});
        }
    require(!grid.patches.empty(), ErrorKind::input, "appearance region too small for patch size");
    return grid;
}

/// Fills a target_w x target_h canvas with source patches drawn by a seeded
/// mt19937_64. Without replacement, each patch is used at most once.
inline TextureReference reassemble(const PatchGrid& grid, int target_w, int target_h,
                                   std::uint64_t seed,
                                   SamplingMode mode = SamplingMode::with_replacement) {
    const int ps = grid.patch_size;
    require(!grid.patches.empty(), ErrorKind::parameter, "reassemble: empty patch grid");
    require(target_w >= ps && target_h >= ps && target_w % ps == 0 && target_h % ps == 0,
            ErrorKind::parameter, "texture dimensions must be positive multiples of patch_size");
    const std::size_t cells = static_cast<std::size_t>(target_w / ps) * (target_h / ps);

    std::mt19937_64 gen(seed);
    std::vector<std::size_t> picks(cells);
    if (mode == SamplingMode::with_replacement) {
        for (auto& p : picks) p = static_cast<std::size_t>(uniform_below(gen, grid.patches.size()));
    } else {
        require(cells <= grid.patches.size(), ErrorKind::parameter,
                "without-replacement sampling needs at least as many patches as target cells");
        std::vector<std::size_t> order(grid.patches.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        portable_shuffle(order, gen);
        std::copy_n(order.begin(), cells, picks.begin());
    }

    TextureReference ref;
    ref.image = RgbImage(target_w, target_h);
    ref.seed = seed;
    ref.patch_size = ps;
    ref.source_patch_count = static_cast<int>(grid.patches.size());
    ref.mode = mode;
    const int cols = target_w / ps;
    for (std::size_t c = 0; c < cells; ++c) {
        const int ox = static_cast<int>(c % static_cast<std::size_t>(cols)) * ps;
        const int oy = static_cast<int>(c / static_cast<std::size_t>(cols)) * ps;
        const RgbImage& src = grid.patches[picks[c]];
        for (int y = 0; y < ps; ++y)
            for (int x = 0; x < ps; ++x) ref.image(ox + x, oy + y) = src(x, y);
    }
    return ref;
}

}  // namespace lineart
