#pragma once

#include <png.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lineart/raster.hpp"

namespace lineart {

inline std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

inline double from_byte(std::uint8_t v) { return v / 255.0; }

/// Any PNG, decoded to RGB in [0,1]; transparent pixels are composited onto white.
inline RgbImage read_png_rgb(const std::filesystem::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        fail(ErrorKind::input, path.string() + ": " + image.message);
    image.format = PNG_FORMAT_RGBA;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        fail(ErrorKind::input, path.string() + ": " + msg);
    }
    require(image.width >= 1 && image.height >= 1, ErrorKind::input,
            path.string() + ": empty image");
    RgbImage out(static_cast<int>(image.width), static_cast<int>(image.height));
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::uint8_t* px = &buf[4 * i];
        const double a = from_byte(px[3]);
        out.pixels()[i] = {from_byte(px[0]) * a + (1.0 - a), from_byte(px[1]) * a + (1.0 - a),
                           from_byte(px[2]) * a + (1.0 - a)};
    }
    return out;
}

inline GrayImage read_png_gray(const std::filesystem::path& path) {
    GrayImage g = luminance(read_png_rgb(path));
    // Round-trip 8-bit gray files exactly.
    for (double& v : g.pixels()) v = from_byte(to_byte(v));
    return g;
}

/// Any nonzero luminance counts as foreground.
inline BinaryMask read_png_mask(const std::filesystem::path& path) {
    return threshold_above(read_png_gray(path), 0.5);
}

inline void write_png(const std::filesystem::path& path, const GrayImage& img) {
    std::vector<std::uint8_t> buf(img.size());
    std::transform(img.pixels().begin(), img.pixels().end(), buf.begin(), to_byte);
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, buf.data(), 0, nullptr))
        fail(ErrorKind::input, path.string() + ": " + image.message);
}

inline void write_png(const std::filesystem::path& path, const BinaryMask& mask) {
    write_png(path, to_gray(mask));
}

inline void write_png(const std::filesystem::path& path, const RgbImage& img) {
    std::vector<std::uint8_t> buf(3 * img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        buf[3 * i] = to_byte(img.pixels()[i].r);
        buf[3 * i + 1] = to_byte(img.pixels()[i].g);
        buf[3 * i + 2] = to_byte(img.pixels()[i].b);
    }
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, buf.data(), 0, nullptr))
        fail(ErrorKind::input, path.string() + ": " + image.message);
}

}  // namespace lineart
