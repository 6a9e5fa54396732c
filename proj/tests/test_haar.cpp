#include <catch2/catch_amalgamated.hpp>

#include "lineart/haar.hpp"
#include "support/oracles.hpp"

using namespace lineart;

namespace {

double max_abs_diff(const GrayImage& a, const GrayImage& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.pixels()[i] - b.pixels()[i]));
    return m;
}

}  // namespace

TEST_CASE("2x2 orthonormal butterfly in closed form") {
    const double a = 0.9, b = 0.25, c = 0.6, d = 0.05;
    const GrayImage img(2, 2, std::vector<double>{a, b, c, d});
    const HaarPyramid p = haar_decompose(img, 1);
    REQUIRE(p.approx.width() == 1);
    CHECK(p.approx(0, 0) == (a + b + c + d) / 2);
    CHECK(p.levels[0].lh(0, 0) == (a + b - c - d) / 2);
    CHECK(p.levels[0].hl(0, 0) == (a - b + c - d) / 2);
    CHECK(p.levels[0].hh(0, 0) == (a - b - c + d) / 2);
}

TEST_CASE("constant image has no detail") {
    const HaarPyramid p = haar_decompose(GrayImage(16, 12, 0.42), 3);
    CHECK(detail_energy(p) == 0.0);
}

TEST_CASE("perfect reconstruction, including odd sizes") {
    std::mt19937_64 gen(99);
    for (auto [w, h] : {std::pair{16, 16}, {17, 9}, {33, 64}, {5, 5}, {64, 31}}) {
        const GrayImage img = oracle::random_gray(gen, w, h);
        for (int levels = 1; levels <= max_haar_levels(w, h); ++levels) {
            const GrayImage back = haar_reconstruct(haar_decompose(img, levels));
            REQUIRE(back.same_shape(img));
            REQUIRE(max_abs_diff(back, img) <= 1e-6);
        }
    }
}

TEST_CASE("Parseval on dyadic sizes") {
    std::mt19937_64 gen(5);
    const GrayImage img = oracle::random_gray(gen, 32, 16);
    for (int levels = 1; levels <= 4; ++levels) {
        const HaarPyramid p = haar_decompose(img, levels);
        CHECK(std::abs(energy(p.approx) + detail_energy(p) - energy(img)) <= 1e-5);
    }
}

TEST_CASE("level count is validated") {
    const GrayImage img(16, 8);
    CHECK(max_haar_levels(16, 8) == 3);
    CHECK_THROWS_AS(haar_decompose(img, 0), Error);
    CHECK_THROWS_AS(haar_decompose(img, 4), Error);
    CHECK_THROWS_AS(haar_decompose(GrayImage(1, 9), 1), Error);
}
