#include <catch2/catch_amalgamated.hpp>

#include <limits>

#include "lineart/baselayer.hpp"
#include "lineart/haar.hpp"
#include "support/oracles.hpp"

using namespace lineart;

namespace {

double max_abs_diff(const GrayImage& a, const GrayImage& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.pixels()[i] - b.pixels()[i]));
    return m;
}

// log-domain, min-max normalized single-scale illumination built from the 2-D oracle blur
GrayImage single_scale_oracle(const GrayImage& img, double sigma, double eps) {
    GrayImage out = oracle::gaussian_blur_2d(img, sigma);
    for (double& v : out.pixels()) v = std::log(v + eps);
    const auto [lo, hi] = std::minmax_element(out.pixels().begin(), out.pixels().end());
    const double l = *lo, h = *hi;
    for (double& v : out.pixels()) v = (v - l) / (h - l);
    return out;
}

LatentGrid random_latent(std::mt19937_64& gen, double mean, double spread) {
    std::normal_distribution<double> n(mean, spread);
    LatentGrid g(4, 8, 8);
    for (double& v : g.values()) v = n(gen);
    return g;
}

}  // namespace

TEST_CASE("gaussian blur matches the direct 2-D convolution") {
    std::mt19937_64 gen(1);
    const GrayImage img = oracle::random_gray(gen, 21, 17);
    for (double sigma : {0.8, 2.0, 9.0}) {  // 9.0: kernel wider than the image
        CHECK(max_abs_diff(gaussian_blur(img, sigma), oracle::gaussian_blur_2d(img, sigma)) <= 1e-12);
    }
    CHECK_THROWS_AS(gaussian_kernel(0.0), Error);
}

TEST_CASE("retinex_illumination examples") {
    SECTION("uniform image is a fixed point") {
        const auto m = retinex_illumination(GrayImage(40, 30, 0.63));
        for (double v : m.image.pixels()) REQUIRE(v == Catch::Approx(0.63).margin(1e-12));
    }
    SECTION("single scale equals the reference blur oracle") {
        std::mt19937_64 gen(2);
        const GrayImage img = oracle::random_gray(gen, 24, 20);
        const auto m = retinex_illumination(img, {{3.0}, {1.0}, 1e-4});
        CHECK(max_abs_diff(m.image, single_scale_oracle(img, 3.0, 1e-4)) <= 1e-6);
    }
    SECTION("weights (1,0) reduce to the first scale") {
        std::mt19937_64 gen(3);
        const GrayImage img = oracle::random_gray(gen, 24, 20);
        const auto two = retinex_illumination(img, {{2.0, 7.0}, {1.0, 0.0}, 1e-4});
        const auto one = retinex_illumination(img, {{2.0}, {1.0}, 1e-4});
        CHECK(two.image == one.image);
    }
    SECTION("parameter checks") {
        const GrayImage img(8, 8, 0.5);
        CHECK_THROWS_AS(retinex_illumination(img, {{2.0, 4.0}, {0.6, 0.6}, 1e-4}), Error);
        CHECK_THROWS_AS(retinex_illumination(img, {{4.0, 2.0}, {0.5, 0.5}, 1e-4}), Error);
        CHECK_THROWS_AS(retinex_illumination(img, {{2.0}, {0.5, 0.5}, 1e-4}), Error);
    }
    SECTION("output is normalized to [0,1]") {
        const auto m = retinex_illumination(oracle::fixture_photo(4, 64, 48));
        const auto [lo, hi] = std::minmax_element(m.image.pixels().begin(), m.image.pixels().end());
        CHECK(*lo == 0.0);
        CHECK(*hi == 1.0);
    }
}

// Detail energy at the default two-level soft-edge depth.
TEST_CASE("illumination is smoother than its input") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const GrayImage img = oracle::fixture_photo(seed, 64, 64);
        const int levels = 2;
        const auto m = retinex_illumination(img);
        CHECK(detail_energy(haar_decompose(m.image, levels)) <= detail_energy(haar_decompose(img, levels)));
    }
}

TEST_CASE("brightness_analysis examples") {
    SECTION("constant map") {
        const auto s = brightness_analysis(GrayImage(5, 5, 0.5));
        CHECK(s.l_mean == 0.5);
        CHECK(s.sigma2 == 0.0);
        CHECK(s.l_mean_255() == 127.5);
    }
    SECTION("equal halves of 0 and 1") {
        GrayImage g(4, 4);
        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 4; ++x) g(x, y) = 1.0;
        const auto s = brightness_analysis(g);
        CHECK(s.l_mean == 0.5);
        CHECK(s.sigma2 == 0.25);
    }
    SECTION("random 4x4 against a two-pass oracle") {
        std::mt19937_64 gen(6);
        const GrayImage g = oracle::random_gray(gen, 4, 4);
        long double sum = 0;
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) sum += g(x, y);
        const long double mean = sum / 16;
        long double ss = 0;
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) ss += (g(x, y) - mean) * (g(x, y) - mean);
        const auto s = brightness_analysis(g);
        CHECK(std::abs(s.l_mean - static_cast<double>(mean)) <= 1e-9);
        CHECK(std::abs(s.sigma2 - static_cast<double>(ss / 16)) <= 1e-9);
    }
}

TEST_CASE("shape_base_layer examples and identities") {
    std::mt19937_64 gen(21);
    SECTION("x0 equal to the target is a fixed point") {
        const LatentGrid x0(4, 8, 8, 0.7);
        CHECK(shape_base_layer(x0, 0.7) == x0);
    }
    SECTION("mean levels 0, 64, 128 in the 0-255 domain") {
        const LatentGrid x0 = random_latent(gen, 150.0, 30.0);
        const double m = x0.mean();
        const std::array<double, 3> expected{m / 2, 32 + m / 2, 64 + m / 2};
        const std::array<double, 3> levels{0.0, 64.0, 128.0};
        for (std::size_t i = 0; i < 3; ++i) {
            const LatentGrid out = shape_base_layer(x0, levels[i], 0.5);
            CHECK(out.mean() == Catch::Approx(expected[i]).epsilon(1e-12));
            CHECK(out.variance() == Catch::Approx(0.25 * x0.variance()).epsilon(1e-12));
        }
    }
    SECTION("factor 1 is the identity, factor 0 collapses") {
        const LatentGrid x0 = random_latent(gen, 0.0, 1.0);
        CHECK(shape_base_layer(x0, 0.3, 1.0) == x0);
        const LatentGrid flat = shape_base_layer(x0, 0.3, 0.0);
        for (double v : flat.values()) REQUIRE(v == 0.3);
    }
    SECTION("two applications with f equal one with f^2") {
        const LatentGrid x0 = random_latent(gen, 0.2, 1.0);
        const LatentGrid twice = shape_base_layer(shape_base_layer(x0, -0.4, 0.6), -0.4, 0.6);
        const LatentGrid once = shape_base_layer(x0, -0.4, 0.36);
        for (std::size_t i = 0; i < once.size(); ++i)
            REQUIRE(twice.values()[i] == Catch::Approx(once.values()[i]).margin(1e-12));
    }
    SECTION("non-finite input is rejected") {
        LatentGrid x0(1, 2, 2);
        x0.at(0, 1, 1) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(shape_base_layer(x0, 0.0), Error);
        CHECK_THROWS_AS(shape_base_layer(LatentGrid(1, 2, 2), 0.0, 1.5), Error);
    }
}

TEST_CASE("latent mapping") {
    const LatentMapping m{1.0};
    CHECK(m.to_latent(0.0) == -1.0);
    CHECK(m.to_latent(0.5) == 0.0);
    CHECK(m.to_latent(1.0) == 1.0);
    const LatentMapping s{0.18215};
    CHECK(s.to_pixel(s.to_latent(0.3)) == Catch::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("build_schedule examples") {
    CHECK(build_schedule(1, 0.01, 0.02).alpha_bar(1) == Catch::Approx(0.99).epsilon(1e-15));
    const auto two = build_schedule(2, 0.1, 0.2);
    CHECK(two.alpha_bar(1) == Catch::Approx(0.9).epsilon(1e-15));
    CHECK(two.alpha_bar(2) == Catch::Approx(0.72).epsilon(1e-15));

    const auto def = build_schedule();
    REQUIRE(def.num_steps == 1000);
    for (int t = 2; t <= 1000; ++t) REQUIRE(def.alpha_bar(t) < def.alpha_bar(t - 1));
    CHECK(def.alpha_bar(1000) < 1e-4);
    CHECK(def.alpha_bar(1) == Catch::Approx(1.0 - 1e-4).epsilon(1e-15));

    CHECK_THROWS_AS(build_schedule(0), Error);
    CHECK_THROWS_AS(build_schedule(10, 0.2, 0.1), Error);
    CHECK_THROWS_AS(build_schedule(10, 0.0, 0.1), Error);
    CHECK_THROWS_AS(build_schedule(10, 0.1, 1.0), Error);
    CHECK_THROWS_AS(def.alpha_bar(0), Error);
    CHECK_THROWS_AS(def.alpha_bar(1001), Error);
}

TEST_CASE("forward_noise") {
    std::mt19937_64 gen(31);
    const LatentGrid x = random_latent(gen, 0.5, 1.0), z = random_latent(gen, 0.0, 1.0);
    SECTION("noiseless and pure-noise limits") {
        CHECK(forward_noise(x, 1.0, z) == x);
        CHECK(forward_noise(x, 0.0, z) == z);
    }
    SECTION("shape and timestep checks") {
        const auto sched = build_schedule(10, 0.01, 0.02);
        CHECK_THROWS_AS(forward_noise(x, 1, sched, LatentGrid(4, 8, 7)), Error);
        CHECK_THROWS_AS(forward_noise(x, 11, sched, z), Error);
        CHECK_THROWS_AS(forward_noise(x, 0, sched, z), Error);
    }
    SECTION("Monte-Carlo mean and variance") {
        const auto sched = build_schedule();
        const int t = 300;
        const double mu = 2.0, ab = sched.alpha_bar(t);
        std::normal_distribution<double> n(0.0, 1.0);
        LatentGrid z0(1, 1000, 100);
        for (double& v : z0.values()) v = n(gen);
        const LatentGrid xt = forward_noise(LatentGrid(1, 1000, 100, mu), t, sched, z0);
        CHECK(std::abs(xt.mean() - std::sqrt(ab) * mu) <= 0.02 * std::sqrt(ab) * mu);
        CHECK(std::abs(xt.variance() - (1.0 - ab)) <= 0.02 * (1.0 - ab));
    }
}
