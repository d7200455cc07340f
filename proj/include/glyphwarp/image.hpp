#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>

namespace glyphwarp {

inline constexpr int kSide = 32;
inline constexpr std::size_t kPixels = kSide * kSide;

/// Row-major 32x32 real-valued plane. Used for intensities and for
/// displacement fields alike; only GreyImage carries the [0,1] contract.
using Field = std::array<double, kPixels>;

constexpr std::size_t pixel_index(int x, int y) {
    return static_cast<std::size_t>(y) * kSide + static_cast<std::size_t>(x);
}

constexpr bool in_bounds(int x, int y) { return x >= 0 && x < kSide && y >= 0 && y < kSide; }

/// 32x32 grey-level image with intensities in [0,1].
class GreyImage {
public:
    GreyImage() { pixels_.fill(0.0); }
    explicit GreyImage(double fill_value) { pixels_.fill(std::clamp(fill_value, 0.0, 1.0)); }
    /// Takes a raw plane; values are clamped into [0,1].
    explicit GreyImage(const Field& values) : pixels_(values) { clamp(); }

    static constexpr int width() { return kSide; }
    static constexpr int height() { return kSide; }

    double operator()(int x, int y) const { return pixels_[pixel_index(x, y)]; }
    double& operator()(int x, int y) { return pixels_[pixel_index(x, y)]; }

    /// Pixel value, or `outside` when (x,y) is off the grid.
    double at_or(int x, int y, double outside) const {
        return in_bounds(x, y) ? pixels_[pixel_index(x, y)] : outside;
    }

    double operator[](std::size_t i) const { return pixels_[i]; }
    double& operator[](std::size_t i) { return pixels_[i]; }

    std::span<const double, kPixels> pixels() const { return pixels_; }
    std::span<double, kPixels> pixels() { return pixels_; }
    const Field& field() const { return pixels_; }

    void clamp() {
        for (auto& v : pixels_) v = std::clamp(v, 0.0, 1.0);
    }

    friend bool operator==(const GreyImage&, const GreyImage&) = default;

private:
    Field pixels_;
};

}  // namespace glyphwarp
