#pragma once

// Stochastic character perturbations. Each transform X is split into
//
//   sample_X(rng, complexity, ...) -> XParams   (the only place randomness enters)
//   apply_X(img, params)           -> GreyImage (pure)
//
// Samplers consume a fixed, documented sequence of draws (see rng.hpp for the
// per-call cost). Skippable transforms always spend their skip draw first and
// stop drawing when skipped.
//
// apply_X throws std::invalid_argument for parameters that no sampler could
// produce (out-of-range ranks, malformed rectangles, ...). The complexity
// dependent ranges are checked separately by conforms().

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "glyphwarp/image.hpp"
#include "glyphwarp/kernels.hpp"
#include "glyphwarp/rng.hpp"

namespace glyphwarp {

class Complexity {
public:
    /// Throws std::invalid_argument unless 0 <= value <= 1.
    explicit Complexity(double value);
    double value() const { return value_; }

private:
    double value_;
};

struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
    friend bool operator==(const Rect&, const Rect&) = default;
};

struct Point {
    int x = 0;
    int y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

// ---------------------------------------------------------------- geometry

struct ThicknessParams {
    MorphMode mode = MorphMode::dilate;
    int elem_rank = 0;
};

enum class SlantDirection : std::uint8_t { left, right };

struct SlantParams {
    double slant = 0.0;  // shear factor, |slant| <= complexity
    SlantDirection direction = SlantDirection::right;
};

/// Source position of output pixel (x,y), both relative to the image center:
///   src_x = scale_x * x + shear_x * y + shift_x
///   src_y = shear_y * x + scale_y * y + shift_y
struct AffineParams {
    double scale_x = 1.0;
    double shear_x = 0.0;
    double shift_x = 0.0;
    double scale_y = 1.0;
    double shear_y = 0.0;
    double shift_y = 0.0;
};

struct ElasticParams {
    double alpha = 0.0;  // displacement intensity, pixels
    double sigma = 0.0;  // smoothing std, pixels
    Field dx{};
    Field dy{};
};

struct PinchParams {
    double pinch = 0.0;
    double radius = kSide / 2.0;
    double center_x = (kSide - 1) / 2.0;
    double center_y = (kSide - 1) / 2.0;
};

// ------------------------------------------------------------------- noise

struct MotionBlurParams {
    double angle_deg = 0.0;  // [0,360)
    double length = 0.0;     // pixels, >= 0
};

struct OcclusionParams {
    bool applied = false;
    GreyImage occluder;
    Rect src_rect;
    Point dst_pos;
};

struct SmoothingParams {
    bool applied = false;
    int kernel_size = 1;  // odd
    double variance = 1.0;
    std::vector<Point> centers;
};

enum class Neighbour : std::uint8_t { left, right, up, down };

struct PermuteParams {
    bool applied = false;
    std::vector<int> selected;  // pixel indices, swapped in this order
    std::vector<Neighbour> swaps;
};

struct GaussianNoiseParams {
    bool applied = false;
    double sigma = 0.0;
    Field noise{};  // standard normal draws, scaled by sigma on application
};

struct BackgroundParams {
    GreyImage background;
    double strength = 0.0;
};

struct SaltPepperParams {
    bool applied = false;
    double fraction = 0.0;
    std::vector<int> pixels;
    std::vector<double> values;
};

struct ScratchPatch {
    GreyImage stroke;
    double rotation_deg = 0.0;
    Rect crop;
    int erosions = 2;
};

struct ScratchParams {
    bool applied = false;
    std::vector<ScratchPatch> patches;  // 1..3 when applied
};

struct ContrastParams {
    double contrast = 1.0;
    bool invert = false;
};

// Skip probabilities of the optional modules.
inline constexpr double kOcclusionSkip = 0.60;
inline constexpr double kSmoothingSkip = 0.75;
inline constexpr double kPermuteSkip = 0.80;
inline constexpr double kGaussianNoiseSkip = 0.70;
inline constexpr double kSaltPepperSkip = 0.75;
inline constexpr double kScratchesSkip = 0.85;

/// Produces an occluder character; called with a stream forked for the purpose.
using OccluderSource = std::function<GreyImage(RngStream&)>;

// ----------------------------------------------------------------- samplers

/// Draws: bernoulli(0.5) for the mode, then uniform_int over admissible ranks.
ThicknessParams sample_thickness(RngStream& rng, Complexity k);
/// Draws: uniform slant, bernoulli direction.
SlantParams sample_slant(RngStream& rng, Complexity k);
/// Draws: six uniforms in field order.
AffineParams sample_affine(RngStream& rng, Complexity k);
/// Draws: 1024 uniforms for dx then 1024 for dy.
ElasticParams sample_elastic(RngStream& rng, Complexity k);
/// Draws: one uniform.
PinchParams sample_pinch(RngStream& rng, Complexity k);
/// Draws: uniform angle, one normal.
MotionBlurParams sample_motion_blur(RngStream& rng, Complexity k);
/// Draws: skip; fork for the occluder; width, height, src x, src y; two normals.
OcclusionParams sample_occlusion(RngStream& rng, Complexity k, const OccluderSource& occluders);
/// Draws: skip; size, variance, center count; two ints per center.
SmoothingParams sample_smoothing(RngStream& rng, Complexity k);
/// Draws: skip; one int per selected pixel; one int per swap direction.
PermuteParams sample_permute(RngStream& rng, Complexity k);
/// Draws: skip; 1024 normals.
GaussianNoiseParams sample_gaussian_noise(RngStream& rng, Complexity k);
/// Draws: texture index, one uniform for the strength jitter.
BackgroundParams sample_background(RngStream& rng, Complexity k,
                                   std::span<const GreyImage> textures);
BackgroundParams sample_background(RngStream& rng, Complexity k);
/// Draws: skip; one int per selected pixel; one uniform per replacement value.
SaltPepperParams sample_salt_pepper(RngStream& rng, Complexity k);
/// Draws: skip; patch count; per patch stroke index, normal angle, 4 crop ints.
ScratchParams sample_scratches(RngStream& rng, Complexity k, std::span<const GreyImage> strokes);
ScratchParams sample_scratches(RngStream& rng, Complexity k);
/// Draws: uniform contrast, bernoulli invert.
ContrastParams sample_contrast(RngStream& rng, Complexity k);

// ------------------------------------------------------------- applications

GreyImage apply_thickness(const GreyImage& img, const ThicknessParams& p);
GreyImage apply_slant(const GreyImage& img, const SlantParams& p);
GreyImage apply_affine(const GreyImage& img, const AffineParams& p);
GreyImage apply_elastic(const GreyImage& img, const ElasticParams& p);
GreyImage apply_pinch(const GreyImage& img, const PinchParams& p);
GreyImage apply_motion_blur(const GreyImage& img, const MotionBlurParams& p);
GreyImage apply_occlusion(const GreyImage& img, const OcclusionParams& p);
GreyImage apply_smoothing(const GreyImage& img, const SmoothingParams& p);
GreyImage apply_permute(const GreyImage& img, const PermuteParams& p);
GreyImage apply_gaussian_noise(const GreyImage& img, const GaussianNoiseParams& p);
GreyImage apply_background(const GreyImage& img, const BackgroundParams& p);
GreyImage apply_salt_pepper(const GreyImage& img, const SaltPepperParams& p);
GreyImage apply_scratches(const GreyImage& img, const ScratchParams& p);
GreyImage apply_contrast(const GreyImage& img, const ContrastParams& p);

// ----------------------------------------------------------------- helpers

/// Highest admissible structuring-element rank for the given mode.
int max_thickness_rank(MorphMode mode, Complexity k);
/// Row shift used by apply_slant for image row y.
int slant_shift(const SlantParams& p, int y);
/// Source distance d2 for a pixel at distance d1 from the pinch center.
double pinch_source_distance(double d1, double radius, double pinch);
/// Odd kernel size obtained by rounding a continuous draw upwards.
int round_up_to_odd(double size);
/// Rotation about the image center, bicubic resampling.
GreyImage rotate_bicubic(const GreyImage& img, double angle_deg);
/// Center-peaked cone window of the given odd size; 1 at the center.
double smoothing_window(int dx, int dy, int kernel_size);

// Complexity-dependent range checks, used by the distribution tests.
bool conforms(const ThicknessParams& p, Complexity k);
bool conforms(const SlantParams& p, Complexity k);
bool conforms(const AffineParams& p, Complexity k);
bool conforms(const ElasticParams& p, Complexity k);
bool conforms(const PinchParams& p, Complexity k);
bool conforms(const MotionBlurParams& p, Complexity k);
bool conforms(const OcclusionParams& p, Complexity k);
bool conforms(const SmoothingParams& p, Complexity k);
bool conforms(const PermuteParams& p, Complexity k);
bool conforms(const GaussianNoiseParams& p, Complexity k);
bool conforms(const BackgroundParams& p, Complexity k);
bool conforms(const SaltPepperParams& p, Complexity k);
bool conforms(const ScratchParams& p, Complexity k);
bool conforms(const ContrastParams& p, Complexity k);

// Procedural resource banks, generated once from fixed seeds.
inline constexpr std::size_t kTextureBankSize = 64;
inline constexpr std::size_t kStrokeBankSize = 500;
std::span<const GreyImage> texture_bank();
std::span<const GreyImage> stroke_bank();
GreyImage make_texture(std::uint64_t seed);
GreyImage make_stroke(std::uint64_t seed);

}  // namespace glyphwarp
