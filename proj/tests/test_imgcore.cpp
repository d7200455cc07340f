#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "glyphwarp/image.hpp"
#include "glyphwarp/kernels.hpp"
#include "glyphwarp/rng.hpp"
#include "support.hpp"

using namespace glyphwarp;

namespace {

// Reference splitmix64 and xoshiro256** written out from the published algorithms.
struct RefSplitMix {
    std::uint64_t s;
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

struct RefXoshiro {
    std::uint64_t s[4];
    explicit RefXoshiro(std::uint64_t seed) {
        RefSplitMix sm{seed};
        for (auto& w : s) w = sm.next();
    }
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t next() {
        const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }
};

}  // namespace

TEST_CASE("splitmix64 reference value") {
    RefSplitMix sm{0};
    CHECK(sm.next() == 0xE220A8397B1DCDAFULL);
    CHECK(mix64(0x9E3779B97F4A7C15ULL) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("rng golden sequence matches reference xoshiro256**") {
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xFFFFFFFFFFFFFFFFULL}) {
        RngStream rng(seed);
        RefXoshiro ref(seed);
        for (int i = 0; i < 100; ++i) REQUIRE(rng.next_u64() == ref.next());
    }
}

TEST_CASE("rng draws are reproducible and cost a fixed number of outputs") {
    RngStream a(7);
    RngStream b(7);
    for (int i = 0; i < 50; ++i) {
        CHECK(a.uniform(-2.0, 3.0) == b.uniform(-2.0, 3.0));
        CHECK(a.normal() == b.normal());
    }

    RngStream x(9);
    RngStream y(9);
    x.uniform01();
    x.uniform_int(0, 5);
    x.bernoulli(0.3);
    x.normal();
    x.fork();
    for (int i = 0; i < 6; ++i) y.next_u64();
    CHECK(x == y);
}

TEST_CASE("rng ranges") {
    RngStream rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const auto k = rng.uniform_int(-2, 4);
        REQUIRE(k >= -2);
        REQUIRE(k <= 4);
    }
    CHECK(rng.uniform_int(5, 5) == 5);
    CHECK(rng.uniform_int(5, 1) == 5);
}

TEST_CASE("substreams are pure functions of seed and key") {
    RngStream parent(11);
    const auto s1 = parent.substream(3);
    parent.next_u64();
    parent.next_u64();
    const auto s2 = parent.substream(3);
    CHECK(s1 == s2);
    CHECK(!(parent.substream(3) == parent.substream(4)));
    CHECK(!(RngStream(11).substream(3) == RngStream(12).substream(3)));
}

TEST_CASE("image construction clamps") {
    CHECK(GreyImage(2.0)(0, 0) == 1.0);
    CHECK(GreyImage(-1.0)(31, 31) == 0.0);
    Field f{};
    f[5] = 1.7;
    f[6] = -0.2;
    GreyImage img(f);
    CHECK(img[5] == 1.0);
    CHECK(img[6] == 0.0);
    CHECK(img.at_or(-1, 0, 0.5) == 0.5);
    CHECK(pixel_index(3, 2) == 67u);
}

TEST_CASE("bilinear sampling") {
    const auto img = testutil::random_image(1);
    SUBCASE("lattice points are exact") {
        for (int y = 0; y < kSide; y += 5)
            for (int x = 0; x < kSide; x += 3) CHECK(bilinear_sample(img, x, y) == img(x, y));
    }
    SUBCASE("constant image") {
        const GreyImage c(0.37);
        CHECK(bilinear_sample(c, 4.3, 17.8) == doctest::Approx(0.37).epsilon(1e-12));
    }
    SUBCASE("2x2 checker patch centre") {
        GreyImage p;
        p(10, 10) = 0.0;
        p(11, 10) = 1.0;
        p(10, 11) = 1.0;
        p(11, 11) = 0.0;
        CHECK(bilinear_sample(p, 10.5, 10.5) == doctest::Approx(0.5));
    }
    SUBCASE("outside reads background 0") {
        const GreyImage c(1.0);
        CHECK(bilinear_sample(c, -3.0, 4.0) == 0.0);
        CHECK(bilinear_sample(c, 4.0, 40.0) == 0.0);
    }
}

TEST_CASE("bicubic sampling") {
    const auto img = testutil::random_image(2);
    for (int y = 0; y < kSide; y += 7)
        for (int x = 0; x < kSide; x += 4) CHECK(bicubic_sample(img, x, y) == img(x, y));

    const GreyImage c(0.6);
    CHECK(bicubic_sample(c, 12.25, 9.75) == doctest::Approx(0.6).epsilon(1e-12));

    // Cubic convolution reproduces linear functions away from the border.
    GreyImage ramp;
    for (int y = 0; y < kSide; ++y)
        for (int x = 0; x < kSide; ++x) ramp(x, y) = x / 31.0;
    CHECK(bicubic_sample(ramp, 10.5, 12.0) == doctest::Approx((10.0 / 31 + 11.0 / 31) / 2).epsilon(1e-12));
    CHECK(bicubic_sample(ramp, 20.25, 7.5) == doctest::Approx(20.25 / 31).epsilon(1e-12));
}

TEST_CASE("gaussian convolution") {
    SUBCASE("size 1 is the identity") {
        const auto img = testutil::random_image(3);
        CHECK(convolve_gaussian(img, 1, 2.0) == img);
    }
    SUBCASE("single pixel gives the normalized 5x5 bump") {
        const auto out = convolve_gaussian(testutil::single_pixel(15, 15), 5, 2.0);
        double z = 0.0;
        for (int dy = -2; dy <= 2; ++dy)
            for (int dx = -2; dx <= 2; ++dx) z += std::exp(-(dx * dx + dy * dy) / 4.0);
        for (int dy = -3; dy <= 3; ++dy)
            for (int dx = -3; dx <= 3; ++dx) {
                const double expect =
                    std::abs(dx) <= 2 && std::abs(dy) <= 2 ? std::exp(-(dx * dx + dy * dy) / 4.0) / z : 0.0;
                CHECK(out(15 + dx, 15 + dy) == doctest::Approx(expect).epsilon(1e-12));
            }
    }
    SUBCASE("constant image stays constant away from the border") {
        const auto out = convolve_gaussian(GreyImage(0.8), 7, 3.0);
        for (int y = 3; y < kSide - 3; ++y)
            for (int x = 3; x < kSide - 3; ++x) REQUIRE(out(x, y) == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(out(0, 0) < 0.8);
    }
    SUBCASE("mass is preserved for interior support") {
        GreyImage img;
        for (int y = 12; y < 20; ++y)
            for (int x = 12; x < 20; ++x) img(x, y) = 0.5 + 0.05 * (x - y);
        double before = 0.0;
        double after = 0.0;
        const auto out = convolve_gaussian(img, 9, 4.0);
        for (std::size_t i = 0; i < kPixels; ++i) {
            before += img[i];
            after += out[i];
        }
        CHECK(after == doctest::Approx(before).epsilon(1e-9));
    }
    SUBCASE("invalid arguments") {
        const GreyImage img;
        CHECK_THROWS_AS(convolve_gaussian(img, 4, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(convolve_gaussian(img, 0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(convolve_gaussian(img, -3, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(convolve_gaussian(img, 3, 0.0), std::invalid_argument);
    }
    SUBCASE("taps are normalized") {
        const auto taps = gaussian_taps(9, 2.5);
        double s = 0.0;
        for (double t : taps) s += t;
        CHECK(taps.size() == 9u);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("structuring element ladder") {
    std::size_t prev = 0;
    for (int r = 0; r < kStructuringElementCount; ++r) {
        const auto& e = structuring_element(r);
        CHECK(e.rank == r);
        CHECK(e.size <= 5);
        CHECK(e.active_count() >= prev);
        prev = e.active_count();
        for (const auto& o : e.active) {
            CHECK(std::abs(o.dx) <= 2);
            CHECK(std::abs(o.dy) <= 2);
        }
    }
    CHECK(structuring_element(0).active_count() == 1u);
    CHECK(structuring_element(3).active_count() == 9u);
    CHECK(structuring_element(9).active_count() == 25u);
    CHECK(structuring_element(9).size == 5);
    CHECK_THROWS_AS(structuring_element(10), std::out_of_range);
    CHECK_THROWS_AS(structuring_element(-1), std::out_of_range);
}

namespace {

GreyImage brute_morph(const GreyImage& img, const StructuringElement& e, MorphMode mode) {
    GreyImage out;
    for (int y = 0; y < kSide; ++y)
        for (int x = 0; x < kSide; ++x) {
            double acc = mode == MorphMode::dilate ? 0.0 : 1.0;
            for (const auto& o : e.active) {
                const double v = img.at_or(x + o.dx, y + o.dy, mode == MorphMode::dilate ? 0.0 : 1.0);
                acc = mode == MorphMode::dilate ? std::max(acc, v) : std::min(acc, v);
            }
            out(x, y) = acc;
        }
    return out;
}

}  // namespace

TEST_CASE("morphology") {
    SUBCASE("neutral element") {
        const auto img = testutil::random_image(4);
        CHECK(morph(img, structuring_element(0), MorphMode::dilate) == img);
        CHECK(morph(img, structuring_element(0), MorphMode::erode) == img);
    }
    SUBCASE("dilating a pixel with the full 3x3 element") {
        const auto out = morph(testutil::single_pixel(8, 9), structuring_element(3), MorphMode::dilate);
        for (int y = 0; y < kSide; ++y)
            for (int x = 0; x < kSide; ++x) {
                const bool block = std::abs(x - 8) <= 1 && std::abs(y - 9) <= 1;
                REQUIRE(out(x, y) == (block ? 1.0 : 0.0));
            }
    }
    SUBCASE("eroding white keeps white everywhere") {
        for (int r = 0; r < kStructuringElementCount; ++r)
            CHECK(morph(GreyImage(1.0), structuring_element(r), MorphMode::erode) == GreyImage(1.0));
    }
    SUBCASE("agrees with a brute-force neighbourhood search") {
        const auto img = testutil::random_image(5);
        for (int r = 0; r < kStructuringElementCount; ++r)
            for (auto mode : {MorphMode::dilate, MorphMode::erode})
                CHECK(morph(img, structuring_element(r), mode) == brute_morph(img, structuring_element(r), mode));
    }
    SUBCASE("monotone in the input") {
        const auto a = testutil::random_image(6);
        auto b = a;
        RngStream rng(60);
        for (std::size_t i = 0; i < kPixels; ++i) b[i] = std::min(1.0, a[i] + rng.uniform(0.0, 0.3));
        for (int r = 0; r < kStructuringElementCount; ++r)
            for (auto mode : {MorphMode::dilate, MorphMode::erode}) {
                const auto ma = morph(a, structuring_element(r), mode);
                const auto mb = morph(b, structuring_element(r), mode);
                for (std::size_t i = 0; i < kPixels; ++i) REQUIRE(ma[i] <= mb[i]);
            }
    }
}

TEST_CASE("kernels keep outputs in [0,1]") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto img = testutil::random_image(100 + s);
        CHECK(testutil::in_unit_range(convolve_gaussian(img, 5, 1.5)));
        CHECK(testutil::in_unit_range(morph(img, structuring_element(static_cast<int>(s)), MorphMode::dilate)));
        RngStream rng(s);
        for (int i = 0; i < 200; ++i) {
            const double x = rng.uniform(-2.0, 33.0);
            const double y = rng.uniform(-2.0, 33.0);
            const double b = bicubic_sample(img, x, y);
            const double l = bilinear_sample(img, x, y);
            REQUIRE(b >= 0.0);
            REQUIRE(b <= 1.0);
            REQUIRE(l >= 0.0);
            REQUIRE(l <= 1.0);
        }
    }
}
