#include "glyphwarp/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace glyphwarp {

namespace {

constexpr double kMaxCoord = kSide - 1;

bool outside_grid(double x, double y) {
    return !(x >= 0.0 && x <= kMaxCoord && y >= 0.0 && y <= kMaxCoord);
}

double keys_weight(double t) {
    constexpr double a = -0.5;
    t = std::abs(t);
    if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

void check_gaussian_args(int kernel_size, double variance) {
    if (kernel_size < 1 || kernel_size % 2 == 0)
        throw std::invalid_argument("gaussian kernel size must be odd and positive, got " +
                                    std::to_string(kernel_size));
    if (!(variance > 0.0))
        throw std::invalid_argument("gaussian variance must be positive");
}

StructuringElement make_element(int rank, int size, auto&& keep) {
    StructuringElement e;
    e.rank = rank;
    e.size = size;
    const int lo = -(size - 1) / 2;
    for (int dy = lo; dy < lo + size; ++dy)
        for (int dx = lo; dx < lo + size; ++dx)
            if (keep(dx, dy)) e.active.push_back({dx, dy});
    return e;
}

std::array<StructuringElement, kStructuringElementCount> build_ladder() {
    auto full = [](int, int) { return true; };
    auto plus = [](int dx, int dy) { return dx == 0 || dy == 0; };
    // 2-wide cross in a 4x4 box whose offsets run -1..2
    auto wide_plus = [](int dx, int dy) { return (dx == 0 || dx == 1) || (dy == 0 || dy == 1); };
    auto diamond = [](int dx, int dy) { return std::abs(dx) + std::abs(dy) <= 2; };
    auto disc = [](int dx, int dy) { return dx * dx + dy * dy <= 5; };
    return {
        make_element(0, 1, full),       // 1
        make_element(1, 2, full),       // 4
        make_element(2, 3, plus),       // 5
        make_element(3, 3, full),       // 9
        make_element(4, 5, plus),       // 9
        make_element(5, 4, wide_plus),  // 12
        make_element(6, 5, diamond),    // 13
        make_element(7, 4, full),       // 16
        make_element(8, 5, disc),       // 21
        make_element(9, 5, full),       // 25
    };
}

}  // namespace

double bilinear_sample(const GreyImage& img, double x, double y) {
    if (outside_grid(x, y)) return 0.0;
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    const double p00 = img.at_or(x0, y0, 0.0);
    const double p10 = img.at_or(x0 + 1, y0, 0.0);
    const double p01 = img.at_or(x0, y0 + 1, 0.0);
    const double p11 = img.at_or(x0 + 1, y0 + 1, 0.0);
    const double top = fx == 0.0 ? p00 : p00 + fx * (p10 - p00);
    const double bottom = fx == 0.0 ? p01 : p01 + fx * (p11 - p01);
    return fy == 0.0 ? top : top + fy * (bottom - top);
}

double bicubic_sample(const GreyImage& img, double x, double y) {
    if (outside_grid(x, y)) return 0.0;
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    if (fx == 0.0 && fy == 0.0) return img(x0, y0);

    std::array<double, 4> wx{};
    std::array<double, 4> wy{};
    for (int k = 0; k < 4; ++k) {
        wx[k] = keys_weight(fx - (k - 1));
        wy[k] = keys_weight(fy - (k - 1));
    }
    double acc = 0.0;
    for (int j = 0; j < 4; ++j) {
        double row = 0.0;
        for (int i = 0; i < 4; ++i) row += wx[i] * img.at_or(x0 + i - 1, y0 + j - 1, 0.0);
        acc += wy[j] * row;
    }
    return std::clamp(acc, 0.0, 1.0);
}

std::vector<double> gaussian_taps(int kernel_size, double variance) {
    check_gaussian_args(kernel_size, variance);
    const int radius = kernel_size / 2;
    std::vector<double> taps(static_cast<std::size_t>(kernel_size));
    double total = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        const double w = std::exp(-(k * k) / (2.0 * variance));
        taps[static_cast<std::size_t>(k + radius)] = w;
        total += w;
    }
    for (auto& w : taps) w /= total;
    return taps;
}

Field gaussian_filter(const Field& in, int kernel_size, double variance, Border border) {
    const auto taps = gaussian_taps(kernel_size, variance);
    const int radius = kernel_size / 2;

    // prefix[i] = sum of taps[0..i), for the in-bounds weight at borders.
    std::vector<double> prefix(taps.size() + 1, 0.0);
    for (std::size_t i = 0; i < taps.size(); ++i) prefix[i + 1] = prefix[i] + taps[i];
    auto in_bounds_weight = [&](int pos) {
        const int lo = std::max(-radius, -pos);
        const int hi = std::min(radius, kSide - 1 - pos);
        return prefix[static_cast<std::size_t>(hi + radius + 1)] - prefix[static_cast<std::size_t>(lo + radius)];
    };

    // Each pass accumulates whole shifted rows so the inner loops vectorize.
    auto pass = [&](const Field& src, bool horizontal) {
        Field dst{};
        for (int y = 0; y < kSide; ++y) {
            double* out = dst.data() + pixel_index(0, y);
            for (int k = -radius; k <= radius; ++k) {
                const double w = taps[static_cast<std::size_t>(k + radius)];
                if (horizontal) {
                    const double* row = src.data() + pixel_index(0, y);
                    const int x0 = std::max(0, -k);
                    const int x1 = std::min(kSide, kSide - k);
                    for (int x = x0; x < x1; ++x) out[x] += w * row[x + k];
                } else {
                    const int sy = y + k;
                    if (sy < 0 || sy >= kSide) continue;
                    const double* row = src.data() + pixel_index(0, sy);
                    for (int x = 0; x < kSide; ++x) out[x] += w * row[x];
                }
            }
            if (border == Border::renormalize) {
                for (int x = 0; x < kSide; ++x) {
                    const double weight = in_bounds_weight(horizontal ? x : y);
                    if (weight > 0.0) out[x] /= weight;
                }
            }
        }
        return dst;
    };
    return pass(pass(in, true), false);
}

GreyImage convolve_gaussian(const GreyImage& img, int kernel_size, double variance) {
    check_gaussian_args(kernel_size, variance);
    if (kernel_size == 1) return img;
    return GreyImage(gaussian_filter(img.field(), kernel_size, variance, Border::zero));
}

const StructuringElement& structuring_element(int rank) {
    static const auto ladder = build_ladder();
    if (rank < 0 || rank >= kStructuringElementCount)
        throw std::out_of_range("structuring element rank must be in 0..9, got " +
                                std::to_string(rank));
    return ladder[static_cast<std::size_t>(rank)];
}

GreyImage morph(const GreyImage& img, const StructuringElement& elem, MorphMode mode) {
    const bool dilate = mode == MorphMode::dilate;
    const double outside = dilate ? 0.0 : 1.0;
    GreyImage out;
    for (int y = 0; y < kSide; ++y) {
        for (int x = 0; x < kSide; ++x) {
            double v = dilate ? 0.0 : 1.0;
            for (const auto& o : elem.active) {
                const double n = img.at_or(x + o.dx, y + o.dy, outside);
                v = dilate ? std::max(v, n) : std::min(v, n);
            }
            out(x, y) = v;
        }
    }
    return out;
}

}  // namespace glyphwarp
