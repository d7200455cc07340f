#include "glyphwarp/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace glyphwarp {

namespace {

constexpr double kCenter = (kSide - 1) / 2.0;
constexpr double kTol = 1e-12;

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

bool finite_field(const Field& f) {
    return std::all_of(f.begin(), f.end(), [](double v) { return std::isfinite(v); });
}

bool within(double v, double lo, double hi) { return v >= lo - kTol && v <= hi + kTol; }

bool rect_inside(const Rect& r) {
    return r.width >= 1 && r.height >= 1 && r.x >= 0 && r.y >= 0 && r.x + r.width <= kSide &&
           r.y + r.height <= kSide;
}

/// First `count` entries of a partial Fisher-Yates shuffle of 0..1023.
std::vector<int> distinct_pixels(RngStream& rng, std::size_t count) {
    std::vector<int> order(kPixels);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(kPixels) - 1));
        std::swap(order[i], order[j]);
    }
    order.resize(count);
    return order;
}

bool all_distinct(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) == v.end();
}

bool valid_pixel_index(int i) { return i >= 0 && i < static_cast<int>(kPixels); }

double cbrt_complexity(Complexity k) { return std::cbrt(k.value()); }

int elastic_kernel_size(double sigma) { return 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1; }

std::size_t permute_count(Complexity k) {
    return static_cast<std::size_t>(std::lround(k.value() / 3.0 * kPixels));
}

std::size_t salt_pepper_count(double fraction) {
    return static_cast<std::size_t>(std::lround(fraction * kPixels));
}

int occlusion_max_side(Complexity k) { return 2 + static_cast<int>(std::lround(14.0 * k.value())); }

int smoothing_max_centers(Complexity k) {
    return 3 + static_cast<int>(std::floor(10.0 * k.value() + 1e-9));
}

}  // namespace

Complexity::Complexity(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0))
        throw std::invalid_argument("complexity must lie in [0,1], got " + std::to_string(value));
}

// ------------------------------------------------------------------ helpers

int max_thickness_rank(MorphMode mode, Complexity k) {
    const double m = mode == MorphMode::dilate ? 10.0 : 6.0;
    const auto n = static_cast<int>(std::lround(m * k.value()));
    return std::min(n, kStructuringElementCount - 1);
}

int slant_shift(const SlantParams& p, int y) {
    const double height = kCenter - y;  // signed, positive above the center row
    const auto shift = static_cast<int>(std::lround(p.slant * height));
    return p.direction == SlantDirection::right ? shift : -shift;
}

double pinch_source_distance(double d1, double radius, double pinch) {
    return std::pow(std::sin(std::numbers::pi * d1 / (2.0 * radius)), -pinch) * d1;
}

int round_up_to_odd(double size) {
    auto k = static_cast<int>(std::ceil(size));
    if (k < 1) k = 1;
    return k % 2 == 0 ? k + 1 : k;
}

GreyImage rotate_bicubic(const GreyImage& img, double angle_deg) {
    if (angle_deg == 0.0) return img;
    const double theta = angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    GreyImage out;
    for (int y = 0; y < kSide; ++y) {
        for (int x = 0; x < kSide; ++x) {
            const double xr = x - kCenter;
            const double yr = y - kCenter;
            out(x, y) = bicubic_sample(img, kCenter + c * xr + s * yr, kCenter - s * xr + c * yr);
        }
    }
    return out;
}

double smoothing_window(int dx, int dy, int kernel_size) {
    const int half = kernel_size / 2;
    if (std::abs(dx) > half || std::abs(dy) > half) return 0.0;
    if (half == 0) return 1.0;
    const double r = std::hypot(static_cast<double>(dx), static_cast<double>(dy));
    return std::max(0.0, 1.0 - r / half);
}

// ----------------------------------------------------------------- samplers

ThicknessParams sample_thickness(RngStream& rng, Complexity k) {
    ThicknessParams p;
    p.mode = rng.bernoulli(0.5) ? MorphMode::dilate : MorphMode::erode;
    p.elem_rank = static_cast<int>(rng.uniform_int(0, max_thickness_rank(p.mode, k)));
    return p;
}

SlantParams sample_slant(RngStream& rng, Complexity k) {
    SlantParams p;
    p.slant = rng.uniform(-k.value(), k.value());
    p.direction = rng.bernoulli(0.5) ? SlantDirection::right : SlantDirection::left;
    return p;
}

AffineParams sample_affine(RngStream& rng, Complexity k) {
    const double c = k.value();
    AffineParams p;
    p.scale_x = rng.uniform(1.0 - 3.0 * c, 1.0 + 3.0 * c);
    p.shear_x = rng.uniform(-3.0 * c, 3.0 * c);
    p.shift_x = rng.uniform(-4.0 * c, 4.0 * c);
    p.scale_y = rng.uniform(1.0 - 3.0 * c, 1.0 + 3.0 * c);
    p.shear_y = rng.uniform(-3.0 * c, 3.0 * c);
    p.shift_y = rng.uniform(-4.0 * c, 4.0 * c);
    return p;
}

ElasticParams sample_elastic(RngStream& rng, Complexity k) {
    ElasticParams p;
    p.alpha = cbrt_complexity(k) * 10.0;
    p.sigma = 10.0 - 7.0 * cbrt_complexity(k);
    Field raw_x{};
    Field raw_y{};
    for (auto& v : raw_x) v = rng.uniform(-1.0, 1.0);
    for (auto& v : raw_y) v = rng.uniform(-1.0, 1.0);

    const int size = elastic_kernel_size(p.sigma);
    auto smooth_and_scale = [&](const Field& raw, Field& out) {
        out = gaussian_filter(raw, size, p.sigma * p.sigma, Border::zero);
        double peak = 0.0;
        for (double v : out) peak = std::max(peak, std::abs(v));
        const double scale = peak > 0.0 ? p.alpha / peak : 0.0;
        for (auto& v : out) v *= scale;
    };
    smooth_and_scale(raw_x, p.dx);
    smooth_and_scale(raw_y, p.dy);
    return p;
}

PinchParams sample_pinch(RngStream& rng, Complexity k) {
    PinchParams p;
    p.pinch = rng.uniform(-k.value(), 0.7 * k.value());
    return p;
}

MotionBlurParams sample_motion_blur(RngStream& rng, Complexity k) {
    MotionBlurParams p;
    p.angle_deg = rng.uniform(0.0, 360.0);
    p.length = std::abs(rng.normal(0.0, 3.0 * k.value()));
    return p;
}

OcclusionParams sample_occlusion(RngStream& rng, Complexity k, const OccluderSource& occluders) {
    OcclusionParams p;
    p.applied = !rng.bernoulli(kOcclusionSkip);
    if (!p.applied) return p;
    RngStream occluder_rng = rng.fork();
    p.occluder = occluders(occluder_rng);
    const int max_side = occlusion_max_side(k);
    p.src_rect.width = static_cast<int>(rng.uniform_int(2, max_side));
    p.src_rect.height = static_cast<int>(rng.uniform_int(2, max_side));
    p.src_rect.x = static_cast<int>(rng.uniform_int(0, kSide - p.src_rect.width));
    p.src_rect.y = static_cast<int>(rng.uniform_int(0, kSide - p.src_rect.height));
    auto place = [&](int side) {
        const double mid = (kSide - side) / 2.0;
        const auto pos = static_cast<int>(std::lround(rng.normal(mid, 5.0)));
        return std::clamp(pos, 0, kSide - side);
    };
    p.dst_pos.x = place(p.src_rect.width);
    p.dst_pos.y = place(p.src_rect.height);
    return p;
}

SmoothingParams sample_smoothing(RngStream& rng, Complexity k) {
    const double c = k.value();
    SmoothingParams p;
    p.applied = !rng.bernoulli(kSmoothingSkip);
    if (!p.applied) return p;
    p.kernel_size = round_up_to_odd(rng.uniform(12.0, 12.0 + 20.0 * c));
    p.variance = rng.uniform(2.0, 2.0 + 6.0 * c);
    const auto count = rng.uniform_int(3, smoothing_max_centers(k));
    p.centers.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        Point pt;
        pt.x = static_cast<int>(rng.uniform_int(0, kSide - 1));
        pt.y = static_cast<int>(rng.uniform_int(0, kSide - 1));
        p.centers.push_back(pt);
    }
    return p;
}

PermuteParams sample_permute(RngStream& rng, Complexity k) {
    PermuteParams p;
    p.applied = !rng.bernoulli(kPermuteSkip);
    if (!p.applied) return p;
    p.selected = distinct_pixels(rng, permute_count(k));
    p.swaps.reserve(p.selected.size());
    for (std::size_t i = 0; i < p.selected.size(); ++i)
        p.swaps.push_back(static_cast<Neighbour>(rng.uniform_int(0, 3)));
    return p;
}

GaussianNoiseParams sample_gaussian_noise(RngStream& rng, Complexity k) {
    GaussianNoiseParams p;
    p.applied = !rng.bernoulli(kGaussianNoiseSkip);
    if (!p.applied) return p;
    p.sigma = k.value() / 10.0;
    for (auto& z : p.noise) z = rng.normal();
    return p;
}

BackgroundParams sample_background(RngStream& rng, Complexity k,
                                   std::span<const GreyImage> textures) {
    require(!textures.empty(), "background texture bank is empty");
    BackgroundParams p;
    const auto index = rng.uniform_int(0, static_cast<std::int64_t>(textures.size()) - 1);
    p.background = textures[static_cast<std::size_t>(index)];
    p.strength = 0.8 * k.value() * rng.uniform(0.5, 1.0);
    return p;
}

BackgroundParams sample_background(RngStream& rng, Complexity k) {
    return sample_background(rng, k, texture_bank());
}

SaltPepperParams sample_salt_pepper(RngStream& rng, Complexity k) {
    SaltPepperParams p;
    p.applied = !rng.bernoulli(kSaltPepperSkip);
    if (!p.applied) return p;
    p.fraction = 0.2 * k.value();
    p.pixels = distinct_pixels(rng, salt_pepper_count(p.fraction));
    p.values.reserve(p.pixels.size());
    for (std::size_t i = 0; i < p.pixels.size(); ++i) p.values.push_back(rng.uniform01());
    return p;
}

ScratchParams sample_scratches(RngStream& rng, Complexity k, std::span<const GreyImage> strokes) {
    require(!strokes.empty(), "scratch stroke bank is empty");
    ScratchParams p;
    p.applied = !rng.bernoulli(kScratchesSkip);
    if (!p.applied) return p;
    const double u = rng.uniform01();
    const int count = u < 0.5 ? 1 : (u < 0.8 ? 2 : 3);
    for (int i = 0; i < count; ++i) {
        ScratchPatch patch;
        const auto index = rng.uniform_int(0, static_cast<std::int64_t>(strokes.size()) - 1);
        patch.stroke = strokes[static_cast<std::size_t>(index)];
        patch.rotation_deg = rng.normal(0.0, 100.0 * k.value());
        patch.crop.width = static_cast<int>(rng.uniform_int(12, kSide));
        patch.crop.height = static_cast<int>(rng.uniform_int(12, kSide));
        patch.crop.x = static_cast<int>(rng.uniform_int(0, kSide - patch.crop.width));
        patch.crop.y = static_cast<int>(rng.uniform_int(0, kSide - patch.crop.height));
        p.patches.push_back(std::move(patch));
    }
    return p;
}

ScratchParams sample_scratches(RngStream& rng, Complexity k) {
    return sample_scratches(rng, k, stroke_bank());
}

ContrastParams sample_contrast(RngStream& rng, Complexity k) {
    ContrastParams p;
    p.contrast = rng.uniform(1.0 - 0.85 * k.value(), 1.0);
    p.invert = rng.bernoulli(0.5);
    return p;
}

// ------------------------------------------------------------- applications

GreyImage apply_thickness(const GreyImage& img, const ThicknessParams& p) {
    require(p.elem_rank >= 0 && p.elem_rank < kStructuringElementCount,
            "thickness: structuring element rank out of range");
    return morph(img, structuring_element(p.elem_rank), p.mode);
}

GreyImage apply_slant(const GreyImage& img, const SlantParams& p) {
    require(std::isfinite(p.slant), "slant: non-finite shear");
    GreyImage out;
    for (int y = 0; y < kSide; ++y) {
        const int shift = slant_shift(p, y);
        for (int x = 0; x < kSide; ++x) out(x, y) = img.at_or(x - shift, y, 0.0);
    }
    return out;
}

GreyImage apply_affine(const GreyImage& img, const AffineParams& p) {
    require(std::isfinite(p.scale_x) && std::isfinite(p.shear_x) && std::isfinite(p.shift_x) &&
                std::isfinite(p.scale_y) && std::isfinite(p.shear_y) && std::isfinite(p.shift_y),
            "affine: non-finite coefficient");
    GreyImage out;
    for (int y = 0; y < kSide; ++y) {
        for (int x = 0; x < kSide; ++x) {
            const double xr = x - kCenter;
            const double yr = y - kCenter;
            const double sx = p.scale_x * xr + p.shear_x * yr + p.shift_x + kCenter;
            const double sy = p.shear_y * xr + p.scale_y * yr + p.shift_y + kCenter;
            if (!(std::abs(sx) < 1e6 && std::abs(sy) < 1e6)) continue;
            const auto ix = static_cast<int>(std::floor(sx + 0.5));
            const auto iy = static_cast<int>(std::floor(sy + 0.5));
            out(x, y) = img.at_or(ix, iy, 0.0);
        }
    }
    return out;
}

GreyImage apply_elastic(const GreyImage& img, const ElasticParams& p) {
    require(finite_field(p.dx) && finite_field(p.dy), "elastic: non-finite displacement");
    GreyImage out;
    for (int y = 0; y < kSide; ++y)
        for (int x = 0; x < kSide; ++x) {
            const auto i = pixel_index(x, y);
            out(x, y) = bilinear_sample(img, x + p.dx[i], y + p.dy[i]);
        }
    return out;
}

GreyImage apply_pinch(const GreyImage& img, const PinchParams& p) {
    require(std::isfinite(p.pinch), "pinch: non-finite exponent");
    require(p.radius > 0.0, "pinch: radius must be positive");
    if (p.pinch == 0.0) return img;
    GreyImage out = img;
    for (int y = 0; y < kSide; ++y) {
        for (int x = 0; x < kSide; ++x) {
            const double vx = x - p.center_x;
            const double vy = y - p.center_y;
            const double d1 = std::hypot(vx, vy);
            if (d1 == 0.0 || d1 >= p.radius) continue;
            const double ratio = pinch_source_distance(d1, p.radius, p.pinch) / d1;
            out(x, y) = bilinear_sample(img, p.center_x + vx * ratio, p.center_y + vy * ratio);
        }
    }
    return out;
}

GreyImage apply_motion_blur(const GreyImage& img, const MotionBlurParams& p) {
    require(std::isfinite(p.angle_deg), "motion blur: non-finite angle");
    require(std::isfinite(p.length) && p.length >= 0.0, "motion blur: length must be >= 0");
    if (p.length < 1.0) return img;
    const int steps = static_cast<int>(std::ceil(p.length));
    const double theta = p.angle_deg * std::numbers::pi / 180.0;
    const double ux = std::cos(theta);
    const double uy = -std::sin(theta);  // y grows downwards
    GreyImage out;
    for (int y = 0; y < kSide; ++y) {
        for (int x = 0; x < kSide; ++x) {
            double acc = 0.0;
            for (int s = 0; s <= steps; ++s) {
                const auto sx = static_cast<int>(std::lround(x + s * ux));
                const auto sy = static_cast<int>(std::lround(y + s * uy));
                acc += img.at_or(sx, sy, 0.0);
            }
            out(x, y) = acc / (steps + 1);
        }
    }
    out.clamp();
    return out;
}

GreyImage apply_occlusion(const GreyImage& img, const OcclusionParams& p) {
    if (!p.applied) return img;
    require(rect_inside(p.src_rect), "occlusion: source rectangle outside occluder");
    GreyImage out = img;
    for (int j = 0; j < p.src_rect.height; ++j) {
        for (int i = 0; i < p.src_rect.width; ++i) {
            const int ox = p.dst_pos.x + i;
            const int oy = p.dst_pos.y + j;
            if (!in_bounds(ox, oy)) continue;
            out(ox, oy) = std::max(out(ox, oy), p.occluder(p.src_rect.x + i, p.src_rect.y + j));
        }
    }
    return out;
}

GreyImage apply_smoothing(const GreyImage& img, const SmoothingParams& p) {
    if (!p.applied) return img;
    require(p.kernel_size >= 1 && p.kernel_size % 2 == 1, "smoothing: kernel size must be odd");
    require(p.variance > 0.0, "smoothing: variance must be positive");
    for (const auto& c : p.centers)
        require(in_bounds(c.x, c.y), "smoothing: averaging center outside the image");

    Field filtered = gaussian_filter(img.field(), p.kernel_size, p.variance, Border::renormalize);
    const auto [lo, hi] = std::minmax_element(filtered.begin(), filtered.end());
    const double low = *lo;
    const double range = *hi - *lo;
    if (range > 1e-12)
        for (auto& v : filtered) v = (v - low) / range;

    Field mask{};
    const int half = p.kernel_size / 2;
    for (const auto& c : p.centers)
        for (int dy = -half; dy <= half; ++dy)
            for (int dx = -half; dx <= half; ++dx)
                if (in_bounds(c.x + dx, c.y + dy))
                    mask[pixel_index(c.x + dx, c.y + dy)] += smoothing_window(dx, dy, p.kernel_size);

    Field out{};
    for (std::size_t i = 0; i < kPixels; ++i)
        out[i] = (img[i] + filtered[i] * mask[i]) / (mask[i] + 1.0);
    return GreyImage(out);
}

GreyImage apply_permute(const GreyImage& img, const PermuteParams& p) {
    if (!p.applied) return img;
    require(p.selected.size() == p.swaps.size(), "permute: selection and swap lists differ in size");
    GreyImage out = img;
    for (std::size_t i = 0; i < p.selected.size(); ++i) {
        const int idx = p.selected[i];
        require(valid_pixel_index(idx), "permute: pixel index out of range");
        const int x = idx % kSide;
        const int y = idx / kSide;
        int nx = x;
        int ny = y;
        switch (p.swaps[i]) {
            case Neighbour::left: --nx; break;
            case Neighbour::right: ++nx; break;
            case Neighbour::up: --ny; break;
            case Neighbour::down: ++ny; break;
        }
        if (!in_bounds(nx, ny)) continue;
        std::swap(out(x, y), out(nx, ny));
    }
    return out;
}

GreyImage apply_gaussian_noise(const GreyImage& img, const GaussianNoiseParams& p) {
    if (!p.applied) return img;
    require(std::isfinite(p.sigma) && p.sigma >= 0.0, "gaussian noise: sigma must be >= 0");
    require(finite_field(p.noise), "gaussian noise: non-finite draws");
    Field out{};
    for (std::size_t i = 0; i < kPixels; ++i) out[i] = img[i] + p.sigma * p.noise[i];
    return GreyImage(out);
}

GreyImage apply_background(const GreyImage& img, const BackgroundParams& p) {
    require(p.strength >= 0.0 && p.strength <= 1.0, "background: strength must lie in [0,1]");
    GreyImage out;
    for (std::size_t i = 0; i < kPixels; ++i) out[i] = std::max(img[i], p.background[i] * p.strength);
    return out;
}

GreyImage apply_salt_pepper(const GreyImage& img, const SaltPepperParams& p) {
    if (!p.applied) return img;
    require(p.fraction >= 0.0 && p.fraction <= 1.0, "salt and pepper: fraction must lie in [0,1]");
    require(p.pixels.size() == p.values.size(), "salt and pepper: pixel and value lists differ");
    GreyImage out = img;
    for (std::size_t i = 0; i < p.pixels.size(); ++i) {
        require(valid_pixel_index(p.pixels[i]), "salt and pepper: pixel index out of range");
        require(p.values[i] >= 0.0 && p.values[i] <= 1.0, "salt and pepper: value outside [0,1]");
        out[static_cast<std::size_t>(p.pixels[i])] = p.values[i];
    }
    return out;
}

GreyImage apply_scratches(const GreyImage& img, const ScratchParams& p) {
    if (!p.applied) return img;
    require(!p.patches.empty() && p.patches.size() <= 3, "scratches: expected 1 to 3 patches");
    const auto& thin = structuring_element(2);
    GreyImage out = img;
    for (const auto& patch : p.patches) {
        require(rect_inside(patch.crop), "scratches: crop rectangle outside the image");
        require(patch.erosions >= 0, "scratches: negative erosion count");
        require(std::isfinite(patch.rotation_deg), "scratches: non-finite rotation");
        GreyImage layer = rotate_bicubic(patch.stroke, patch.rotation_deg);
        for (int y = 0; y < kSide; ++y)
            for (int x = 0; x < kSide; ++x)
                if (x < patch.crop.x || x >= patch.crop.x + patch.crop.width || y < patch.crop.y ||
                    y >= patch.crop.y + patch.crop.height)
                    layer(x, y) = 0.0;
        for (int e = 0; e < patch.erosions; ++e) layer = morph(layer, thin, MorphMode::erode);
        for (std::size_t i = 0; i < kPixels; ++i) out[i] = std::max(out[i], layer[i]);
    }
    return out;
}

GreyImage apply_contrast(const GreyImage& img, const ContrastParams& p) {
    require(p.contrast >= 0.0 && p.contrast <= 1.0, "contrast: C must lie in [0,1]");
    const double floor_level = (1.0 - p.contrast) / 2.0;
    Field out{};
    for (std::size_t i = 0; i < kPixels; ++i) {
        const double v = floor_level + p.contrast * img[i];
        out[i] = p.invert ? 1.0 - v : v;
    }
    return GreyImage(out);
}

// -------------------------------------------------------------- conformance

bool conforms(const ThicknessParams& p, Complexity k) {
    return p.elem_rank >= 0 && p.elem_rank <= max_thickness_rank(p.mode, k);
}

bool conforms(const SlantParams& p, Complexity k) { return std::abs(p.slant) <= k.value() + kTol; }

bool conforms(const AffineParams& p, Complexity k) {
    const double c = k.value();
    return within(p.scale_x, 1 - 3 * c, 1 + 3 * c) && within(p.scale_y, 1 - 3 * c, 1 + 3 * c) &&
           within(p.shear_x, -3 * c, 3 * c) && within(p.shear_y, -3 * c, 3 * c) &&
           within(p.shift_x, -4 * c, 4 * c) && within(p.shift_y, -4 * c, 4 * c);
}

bool conforms(const ElasticParams& p, Complexity k) {
    const double root = cbrt_complexity(k);
    if (std::abs(p.alpha - root * 10.0) > kTol || std::abs(p.sigma - (10.0 - 7.0 * root)) > kTol)
        return false;
    auto bounded = [&](const Field& f) {
        return std::all_of(f.begin(), f.end(), [&](double v) { return std::abs(v) <= p.alpha + 1e-9; });
    };
    return bounded(p.dx) && bounded(p.dy);
}

bool conforms(const PinchParams& p, Complexity k) {
    return within(p.pinch, -k.value(), 0.7 * k.value()) && p.radius == kSide / 2.0;
}

bool conforms(const MotionBlurParams& p, Complexity k) {
    (void)k;
    return p.angle_deg >= 0.0 && p.angle_deg < 360.0 && p.length >= 0.0 && std::isfinite(p.length);
}

bool conforms(const OcclusionParams& p, Complexity k) {
    if (!p.applied) return true;
    const int max_side = occlusion_max_side(k);
    const auto& r = p.src_rect;
    return r.width >= 2 && r.width <= max_side && r.height >= 2 && r.height <= max_side &&
           rect_inside(r) && p.dst_pos.x >= 0 && p.dst_pos.x <= kSide - r.width &&
           p.dst_pos.y >= 0 && p.dst_pos.y <= kSide - r.height;
}

bool conforms(const SmoothingParams& p, Complexity k) {
    if (!p.applied) return true;
    const double c = k.value();
    const auto n = static_cast<int>(p.centers.size());
    return p.kernel_size % 2 == 1 && p.kernel_size >= round_up_to_odd(12.0) &&
           p.kernel_size <= round_up_to_odd(12.0 + 20.0 * c) && within(p.variance, 2.0, 2.0 + 6.0 * c) &&
           n >= 3 && n <= smoothing_max_centers(k) &&
           std::all_of(p.centers.begin(), p.centers.end(),
                       [](const Point& pt) { return in_bounds(pt.x, pt.y); });
}

bool conforms(const PermuteParams& p, Complexity k) {
    if (!p.applied) return true;
    return p.selected.size() == permute_count(k) && p.swaps.size() == p.selected.size() &&
           std::all_of(p.selected.begin(), p.selected.end(), valid_pixel_index) &&
           all_distinct(p.selected);
}

bool conforms(const GaussianNoiseParams& p, Complexity k) {
    if (!p.applied) return true;
    return std::abs(p.sigma - k.value() / 10.0) <= kTol && finite_field(p.noise);
}

bool conforms(const BackgroundParams& p, Complexity k) {
    return within(p.strength, 0.4 * k.value(), 0.8 * k.value());
}

bool conforms(const SaltPepperParams& p, Complexity k) {
    if (!p.applied) return true;
    return std::abs(p.fraction - 0.2 * k.value()) <= kTol &&
           p.pixels.size() == salt_pepper_count(p.fraction) && p.values.size() == p.pixels.size() &&
           std::all_of(p.pixels.begin(), p.pixels.end(), valid_pixel_index) &&
           all_distinct(p.pixels) &&
           std::all_of(p.values.begin(), p.values.end(), [](double v) { return v >= 0.0 && v < 1.0; });
}

bool conforms(const ScratchParams& p, Complexity k) {
    (void)k;
    if (!p.applied) return true;
    return !p.patches.empty() && p.patches.size() <= 3 &&
           std::all_of(p.patches.begin(), p.patches.end(), [](const ScratchPatch& s) {
               return s.erosions == 2 && rect_inside(s.crop) && s.crop.width >= 12 &&
                      s.crop.height >= 12 && std::isfinite(s.rotation_deg);
           });
}

bool conforms(const ContrastParams& p, Complexity k) {
    return within(p.contrast, 1.0 - 0.85 * k.value(), 1.0);
}

}  // namespace glyphwarp
