#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "lineart/lineart.hpp"

namespace fixture {

namespace fs = std::filesystem;
using namespace lineart;

inline fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lineart_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// Dark strokes on white: a closed box, a crossbar and a loose diagonal.
inline GrayImage drawing(int w = 64, int h = 64) {
    GrayImage g(w, h, 1.0);
    const int x0 = w / 8, x1 = w - w / 8, y0 = h / 8, y1 = h - h / 8;
    for (int x = x0; x <= x1; ++x)
        for (int t = 0; t < 2; ++t) g(x, y0 + t) = g(x, y1 - t) = 0.0;
    for (int y = y0; y <= y1; ++y)
        for (int t = 0; t < 2; ++t) g(x0 + t, y) = g(x1 - t, y) = 0.0;
    for (int x = x0; x <= x1; ++x) g(x, h / 2) = 0.0;
    for (int t = 0; t < (y1 - y0) / 2; ++t) g(x0 + 3 + t, y0 + 3 + t) = 0.0;
    return g;
}

// Smoothly lit textured material.
inline RgbImage appearance(std::uint64_t seed, int w = 64, int h = 64) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RgbImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double light = 0.4 + 0.5 * double(x + y) / (w + h);
            const double grain = 0.15 * u(gen);
            img(x, y) = {std::min(1.0, light + grain), std::min(1.0, 0.8 * light + grain), 0.5 * light + grain};
        }
    return img;
}

inline GrayImage first_pass(std::uint64_t seed, int w = 64, int h = 64) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GrayImage g(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) g(x, y) = 0.5 + 0.3 * std::sin(x * 0.4) * std::cos(y * 0.3) + 0.1 * u(gen);
    return g;
}

inline PipelineConfig small_config(std::uint64_t seed = 7) {
    PipelineConfig c;
    c.seed = seed;
    c.texsynth.patch_size = 16;
    c.texsynth.output_width = 64;
    c.texsynth.output_height = 48;
    return c;
}

struct Inputs {
    BundleInputs bundle;
    fs::path dir;
};

inline Inputs write_inputs(const fs::path& dir, bool with_first_pass = true) {
    write_png(dir / "drawing.png", drawing());
    write_png(dir / "appearance.png", appearance(11));
    Inputs in{{dir / "drawing.png", dir / "appearance.png", std::nullopt, std::nullopt}, dir};
    if (with_first_pass) {
        write_png(dir / "g_initial.png", first_pass(5));
        in.bundle.g_initial = dir / "g_initial.png";
    }
    return in;
}

}  // namespace fixture
