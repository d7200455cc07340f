#pragma once

#include <cstdint>

#include "glyphwarp/image.hpp"
#include "glyphwarp/rng.hpp"

namespace testutil {

inline glyphwarp::GreyImage random_image(std::uint64_t seed) {
    glyphwarp::RngStream rng(seed);
    glyphwarp::GreyImage img;
    for (std::size_t i = 0; i < glyphwarp::kPixels; ++i) img[i] = rng.uniform01();
    return img;
}

inline glyphwarp::GreyImage single_pixel(int x, int y, double v = 1.0) {
    glyphwarp::GreyImage img;
    img(x, y) = v;
    return img;
}

inline bool in_unit_range(const glyphwarp::GreyImage& img) {
    for (double v : img.pixels())
        if (!(v >= 0.0 && v <= 1.0)) return false;
    return true;
}

inline double max_abs_diff(const glyphwarp::GreyImage& a, const glyphwarp::GreyImage& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < glyphwarp::kPixels; ++i) {
        const double d = a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
        if (d > m) m = d;
    }
    return m;
}

}  // namespace testutil
