// Procedural stand-ins for the natural-image backgrounds and the bank of
// handwritten "1" strokes used by the scratch module.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "glyphwarp/transforms.hpp"

namespace glyphwarp {

namespace {

constexpr std::uint64_t kTextureSeed = 0x5EED7E87u;
constexpr std::uint64_t kStrokeSeed = 0x5EED5742u;

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

/// One octave of value noise on a (cells+1)^2 lattice.
Field value_noise(RngStream& rng, int cells) {
    const int n = cells + 1;
    std::vector<double> lattice(static_cast<std::size_t>(n * n));
    for (auto& v : lattice) v = rng.uniform01();
    auto node = [&](int i, int j) { return lattice[static_cast<std::size_t>(j * n + i)]; };

    Field out{};
    const double step = static_cast<double>(cells) / kSide;
    for (int y = 0; y < kSide; ++y) {
        for (int x = 0; x < kSide; ++x) {
            const double gx = x * step;
            const double gy = y * step;
            const int i = std::min(static_cast<int>(gx), cells - 1);
            const int j = std::min(static_cast<int>(gy), cells - 1);
            const double tx = smoothstep(gx - i);
            const double ty = smoothstep(gy - j);
            const double top = node(i, j) + tx * (node(i + 1, j) - node(i, j));
            const double bot = node(i, j + 1) + tx * (node(i + 1, j + 1) - node(i, j + 1));
            out[pixel_index(x, y)] = top + ty * (bot - top);
        }
    }
    return out;
}

double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
    const double vx = bx - ax;
    const double vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(px - (ax + t * vx), py - (ay + t * vy));
}

std::vector<GreyImage> build_bank(std::size_t count, std::uint64_t base, GreyImage (*make)(std::uint64_t)) {
    std::vector<GreyImage> bank;
    bank.reserve(count);
    for (std::size_t i = 0; i < count; ++i) bank.push_back(make(mix64(base + i)));
    return bank;
}

}  // namespace

GreyImage make_texture(std::uint64_t seed) {
    RngStream rng(seed);
    Field acc{};
    double amplitude = 1.0;
    for (int cells : {2, 4, 8, 16}) {
        const Field octave = value_noise(rng, cells);
        for (std::size_t i = 0; i < kPixels; ++i) acc[i] += amplitude * octave[i];
        amplitude *= 0.5;
    }
    // linear gradient in a random direction
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double weight = rng.uniform(0.0, 1.0);
    for (int y = 0; y < kSide; ++y)
        for (int x = 0; x < kSide; ++x)
            acc[pixel_index(x, y)] +=
                weight * ((x - 15.5) * std::cos(theta) + (y - 15.5) * std::sin(theta)) / 16.0;

    const auto [lo, hi] = std::minmax_element(acc.begin(), acc.end());
    const double low = *lo;
    const double range = *hi - *lo;
    for (auto& v : acc) v = range > 0.0 ? (v - low) / range : 0.0;
    return GreyImage(acc);
}

GreyImage make_stroke(std::uint64_t seed) {
    RngStream rng(seed);
    const double cx = rng.uniform(10.0, 22.0);
    const double cy = rng.uniform(10.0, 22.0);
    const double theta = rng.uniform(0.0, std::numbers::pi);
    const double length = rng.uniform(20.0, 30.0);
    const double width = rng.uniform(5.0, 7.0);
    const double bend = rng.uniform(-3.0, 3.0);

    const double ux = std::cos(theta);
    const double uy = std::sin(theta);
    const double ax = cx - ux * length / 2;
    const double ay = cy - uy * length / 2;
    const double bx = cx + ux * length / 2;
    const double by = cy + uy * length / 2;
    // control point pushed along the normal gives the slight curvature
    const double qx = cx - uy * bend * 2;
    const double qy = cy + ux * bend * 2;

    constexpr int kSegments = 24;
    std::vector<std::pair<double, double>> curve;
    for (int s = 0; s <= kSegments; ++s) {
        const double t = static_cast<double>(s) / kSegments;
        const double a = (1 - t) * (1 - t);
        const double b = 2 * (1 - t) * t;
        const double c = t * t;
        curve.emplace_back(a * ax + b * qx + c * bx, a * ay + b * qy + c * by);
    }

    GreyImage img;
    for (int y = 0; y < kSide; ++y) {
        for (int x = 0; x < kSide; ++x) {
            double d = 1e9;
            for (std::size_t s = 0; s + 1 < curve.size(); ++s)
                d = std::min(d, segment_distance(x, y, curve[s].first, curve[s].second,
                                                 curve[s + 1].first, curve[s + 1].second));
            img(x, y) = std::clamp(width / 2.0 + 0.5 - d, 0.0, 1.0);
        }
    }
    return img;
}

std::span<const GreyImage> texture_bank() {
    static const auto bank = build_bank(kTextureBankSize, kTextureSeed, &make_texture);
    return bank;
}

std::span<const GreyImage> stroke_bank() {
    static const auto bank = build_bank(kStrokeBankSize, kStrokeSeed, &make_stroke);
    return bank;
}

}  // namespace glyphwarp
