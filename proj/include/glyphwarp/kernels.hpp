#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "glyphwarp/image.hpp"

namespace glyphwarp {

// Interpolation. Coordinates are in pixel units with pixel (x,y) at the
// integer lattice point; anything outside [0,31]^2 reads as background 0.
double bilinear_sample(const GreyImage& img, double x, double y);
/// Keys cubic convolution (a = -0.5), zero-padded, clamped into [0,1].
double bicubic_sample(const GreyImage& img, double x, double y);

enum class Border {
    zero,         // pixels beyond the edge contribute 0
    renormalize,  // kernel weights re-normalized over in-bounds taps
};

/// Normalized 1-D Gaussian taps exp(-k^2 / (2 variance)) / Z, k = -r..r.
std::vector<double> gaussian_taps(int kernel_size, double variance);

/// Separable Gaussian filter of an unconstrained plane (no clamping).
Field gaussian_filter(const Field& in, int kernel_size, double variance,
                      Border border = Border::zero);

/// Isotropic Gaussian blur with zero padding; output clamped into [0,1].
/// Throws std::invalid_argument on even or non-positive kernel_size or
/// non-positive variance.
GreyImage convolve_gaussian(const GreyImage& img, int kernel_size, double variance);

struct Offset {
    int dx;
    int dy;
    friend bool operator==(const Offset&, const Offset&) = default;
};

/// Binary structuring element, stored as its list of active offsets.
struct StructuringElement {
    int rank = 0;
    int size = 1;  // bounding box side
    std::vector<Offset> active;

    std::size_t active_count() const { return active.size(); }
};

inline constexpr int kStructuringElementCount = 10;

/// Element of the fixed 10-step ladder; rank 0 is the single center cell.
/// Throws std::out_of_range for ranks outside 0..9.
const StructuringElement& structuring_element(int rank);

enum class MorphMode : std::uint8_t { dilate, erode };

/// Grey-scale dilation (max) or erosion (min) over the active cells.
/// Off-grid neighbours read 0 for dilation and 1 for erosion.
GreyImage morph(const GreyImage& img, const StructuringElement& elem, MorphMode mode);

}  // namespace glyphwarp
