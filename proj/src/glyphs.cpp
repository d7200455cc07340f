#include "glyphwarp/glyphs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace glyphwarp {

namespace {

// Skeletons on a 7 x 11 unit grid: x in [0,6], cap line y=0, x-height y=3,
// baseline y=8, descender y=10. Polylines are separated by '|'.
constexpr std::array<const char*, kClassCount> kSkeletons = {
    // 0-9
    "1,0 5,0 6,1 6,7 5,8 1,8 0,7 0,1 1,0 | 5.5,0.5 0.5,7.5",
    "1.5,1.5 3,0 3,8 | 1.5,8 4.5,8",
    "0,1.5 1,0 5,0 6,1 6,3 0,8 6,8",
    "0,0.5 1,0 5,0 6,1 6,3 5,4 2,4 | 5,4 6,5 6,7 5,8 1,8 0,7.5",
    "4.5,8 4.5,0 0,5.5 6,5.5",
    "6,0 0.5,0 0,4 4.5,3.5 6,4.5 6,7 5,8 1,8 0,7",
    "5.5,0 2,0 0,3 0,7 1,8 5,8 6,7 6,5 5,4 1,4 0,5",
    "0,0 6,0 2,8",
    "1,0 5,0 6,1 6,3 5,4 1,4 0,5 0,7 1,8 5,8 6,7 6,5 5,4 | 1,4 0,3 0,1 1,0",
    "6,4 1,4 0,3 0,1 1,0 5,0 6,1 6,5 4,8 0.5,8",
    // A-Z
    "0,8 3,0 6,8 | 1.1,5 4.9,5",
    "0,0 0,8 5,8 6,7 6,5 5,4 0,4 | 0,0 4.5,0 5.5,1 5.5,3 4.5,4",
    "6,1 5,0 1,0 0,1 0,7 1,8 5,8 6,7",
    "0,0 0,8 4,8 6,6 6,2 4,0 0,0",
    "6,0 0,0 0,8 6,8 | 0,4 4.5,4",
    "6,0 0,0 0,8 | 0,4 4.5,4",
    "6,1 5,0 1,0 0,1 0,7 1,8 5,8 6,7 6,4.5 3.5,4.5",
    "0,0 0,8 | 6,0 6,8 | 0,4 6,4",
    "1.5,0 4.5,0 | 3,0 3,8 | 1.5,8 4.5,8",
    "2,0 6,0 | 5,0 5,7 4,8 1,8 0,7 0,6",
    "0,0 0,8 | 6,0 0,5 | 2,3.5 6,8",
    "0,0 0,8 6,8",
    "0,8 0,0 3,5 6,0 6,8",
    "0,8 0,0 6,8 6,0",
    "2,0 4,0 6,2 6,6 4,8 2,8 0,6 0,2 2,0",
    "0,8 0,0 5,0 6,1 6,3 5,4 0,4",
    "2,0 4,0 6,2 6,6 4,8 2,8 0,6 0,2 2,0 | 3.5,5.5 6,8.5",
    "0,8 0,0 5,0 6,1 6,3 5,4 0,4 | 2.5,4 6,8",
    "6,1 5,0 1,0 0,1 0,3 1,4 5,4 6,5 6,7 5,8 1,8 0,7",
    "0,0 6,0 | 3,0 3,8",
    "0,0 0,7 1,8 5,8 6,7 6,0",
    "0,0 3,8 6,0",
    "0,0 1.5,8 3,3 4.5,8 6,0",
    "0,0 6,8 | 6,0 0,8",
    "0,0 3,4 6,0 | 3,4 3,8",
    "0,0 6,0 0,8 6,8",
    // a-z
    "1,3 5,3 5.5,3.5 5.5,8 | 5.5,5 1,5 0,6 0,7 1,8 4,8 5.5,7",
    "0,0 0,8 | 0,4.5 1.5,3 4.5,3 6,4.5 6,6.5 4.5,8 1.5,8 0,6.5",
    "5.5,3.5 5,3 1,3 0,4 0,7 1,8 5,8 5.5,7.5",
    "6,0 6,8 | 6,4.5 4.5,3 1.5,3 0,4.5 0,6.5 1.5,8 4.5,8 6,6.5",
    "0,5.5 6,5.5 6,4 5,3 1,3 0,4 0,7 1,8 5,8 6,7.5",
    "5,0.5 4,0 3,0 2,1 2,8 | 0,3 4.5,3",
    "6,3 6,9 5,10 1,10 0,9.5 | 6,4.5 4.5,3 1.5,3 0,4.5 0,6 1.5,7.5 4.5,7.5 6,6",
    "0,0 0,8 | 0,4.5 1.5,3 4.5,3 6,4.5 6,8",
    "3,3 3,8 | 3,1 3,1.6",
    "4,3 4,9 3,10 1,10 0,9.5 | 4,1 4,1.6",
    "0,0 0,8 | 5,3 0,6 | 1.8,5 5.5,8",
    "2,0 2,7 3,8 4,8",
    "0,8 0,3 | 0,4 1,3 2,3 3,4 3,8 | 3,4 4,3 5,3 6,4 6,8",
    "0,8 0,3 | 0,4.5 1.5,3 4.5,3 6,4.5 6,8",
    "1.5,3 4.5,3 6,4.5 6,6.5 4.5,8 1.5,8 0,6.5 0,4.5 1.5,3",
    "0,3 0,10 | 0,4.5 1.5,3 4.5,3 6,4.5 6,6.5 4.5,8 1.5,8 0,6.5",
    "6,3 6,10 | 6,4.5 4.5,3 1.5,3 0,4.5 0,6.5 1.5,8 4.5,8 6,6.5",
    "0,3 0,8 | 0,5 2,3 5,3",
    "5.5,3.5 5,3 1,3 0,4 0,5 1,5.5 5,5.5 6,6.5 6,7 5,8 1,8 0,7.5",
    "2.5,0.5 2.5,7 3.5,8 5,8 | 0.5,3 5,3",
    "0,3 0,6.5 1.5,8 4.5,8 6,6.5 | 6,3 6,8",
    "0,3 3,8 6,3",
    "0,3 1.5,8 3,4.5 4.5,8 6,3",
    "0,3 6,8 | 6,3 0,8",
    "0,3 3,8 | 6,3 2,10 0.5,10",
    "0,3 6,3 0,8 6,8",
};

constexpr double kUnit = 2.2;  // pixels per skeleton unit
constexpr double kGridCenterX = 3.0;
constexpr double kGridCenterY = 5.0;
constexpr double kImageCenter = (kSide - 1) / 2.0;

struct Vec2 {
    double x;
    double y;
};

using Polyline = std::vector<Vec2>;

std::vector<Polyline> parse_skeleton(const char* text) {
    std::vector<Polyline> lines(1);
    std::istringstream in(text);
    std::string token;
    while (in >> token) {
        if (token == "|") {
            lines.emplace_back();
            continue;
        }
        const auto comma = token.find(',');
        lines.back().push_back({std::stod(token.substr(0, comma)), std::stod(token.substr(comma + 1))});
    }
    return lines;
}

const std::vector<Polyline>& skeleton(int label) {
    static const auto table = [] {
        std::array<std::vector<Polyline>, kClassCount> t;
        for (int i = 0; i < kClassCount; ++i) t[static_cast<std::size_t>(i)] = parse_skeleton(kSkeletons[static_cast<std::size_t>(i)]);
        return t;
    }();
    if (label < 0 || label >= kClassCount)
        throw std::out_of_range("glyph label must be in 0..61, got " + std::to_string(label));
    return table[static_cast<std::size_t>(label)];
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const double vx = b.x - a.x;
    const double vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

struct Placement {
    double stroke_width;
    double scale;
    double dx;
    double dy;
    double rotation_deg;
};

GreyImage rasterize(const std::vector<Polyline>& lines, const Placement& at) {
    const double theta = at.rotation_deg * std::numbers::pi / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    std::vector<Polyline> pixels_space;
    pixels_space.reserve(lines.size());
    for (const auto& line : lines) {
        Polyline mapped;
        for (const auto& v : line) {
            const double gx = (v.x - kGridCenterX) * kUnit * at.scale;
            const double gy = (v.y - kGridCenterY) * kUnit * at.scale;
            mapped.push_back({kImageCenter + c * gx - s * gy + at.dx, kImageCenter + s * gx + c * gy + at.dy});
        }
        pixels_space.push_back(std::move(mapped));
    }

    const double half = at.stroke_width / 2.0;
    GreyImage img;
    for (int y = 0; y < kSide; ++y) {
        for (int x = 0; x < kSide; ++x) {
            double d = 1e9;
            const Vec2 p{static_cast<double>(x), static_cast<double>(y)};
            for (const auto& line : pixels_space)
                for (std::size_t i = 0; i + 1 < line.size(); ++i)
                    d = std::min(d, segment_distance(p, line[i], line[i + 1]));
            img(x, y) = std::clamp(half + 0.5 - d, 0.0, 1.0);
        }
    }
    return img;
}

}  // namespace

GreyImage render_glyph(int label, double stroke_width, double scale, double dx, double dy,
                       double rotation_deg) {
    return rasterize(skeleton(label), {stroke_width, scale, dx, dy, rotation_deg});
}

SyntheticSource::SyntheticSource(std::string name, GlyphStyle style, std::uint64_t seed)
    : name_(std::move(name)), style_(style), seed_(seed) {
    if (style_.stroke_width_min <= 0.0 || style_.stroke_width_max < style_.stroke_width_min)
        throw std::invalid_argument("glyph style: bad stroke width range");
}

Glyph SyntheticSource::draw(RngStream& rng) const {
    RngStream local(mix64(seed_ ^ rng.next_u64()));
    const auto range = class_range(style_.classes);
    Glyph g;
    g.label = static_cast<int>(local.uniform_int(range.first, range.first + range.count - 1));

    Placement at{};
    at.stroke_width = local.uniform(style_.stroke_width_min, style_.stroke_width_max);
    at.scale = 1.0 + local.uniform(-style_.scale_jitter, style_.scale_jitter);
    at.dx = local.uniform(-style_.translate_jitter, style_.translate_jitter);
    at.dy = local.uniform(-style_.translate_jitter, style_.translate_jitter);
    at.rotation_deg = local.uniform(-style_.rotation_jitter, style_.rotation_jitter);

    auto lines = skeleton(g.label);
    if (style_.vertex_wobble > 0.0)
        for (auto& line : lines)
            for (auto& v : line) {
                v.x += local.uniform(-style_.vertex_wobble, style_.vertex_wobble);
                v.y += local.uniform(-style_.vertex_wobble, style_.vertex_wobble);
            }
    g.image = rasterize(lines, at);
    return g;
}

std::shared_ptr<const GlyphSource> synthetic_source(ClassSet classes, std::uint64_t seed) {
    GlyphStyle style;
    style.classes = classes;
    return std::make_shared<SyntheticSource>("synthetic", style, seed);
}

std::shared_ptr<const GlyphSource> fonts_standin(std::uint64_t seed) {
    GlyphStyle style;
    style.stroke_width_min = 1.8;
    style.stroke_width_max = 2.6;
    return std::make_shared<SyntheticSource>("fonts", style, seed);
}

std::shared_ptr<const GlyphSource> captcha_standin(std::uint64_t seed) {
    GlyphStyle style;
    style.stroke_width_min = 2.0;
    style.stroke_width_max = 3.0;
    style.translate_jitter = 2.0;
    style.scale_jitter = 0.10;
    style.rotation_jitter = 12.0;
    return std::make_shared<SyntheticSource>("captcha", style, seed);
}

std::shared_ptr<const GlyphSource> ocr_standin(std::uint64_t seed) {
    GlyphStyle style;
    style.stroke_width_min = 1.5;
    style.stroke_width_max = 2.0;
    style.translate_jitter = 0.5;
    style.scale_jitter = 0.03;
    return std::make_shared<SyntheticSource>("ocr", style, seed);
}

std::shared_ptr<const GlyphSource> nist_standin(std::uint64_t seed) {
    GlyphStyle style;
    style.stroke_width_min = 1.6;
    style.stroke_width_max = 3.2;
    style.translate_jitter = 1.5;
    style.scale_jitter = 0.08;
    style.rotation_jitter = 6.0;
    style.vertex_wobble = 0.35;
    return std::make_shared<SyntheticSource>("nist", style, seed);
}

}  // namespace glyphwarp
