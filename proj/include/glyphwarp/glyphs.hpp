#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "glyphwarp/dataset.hpp"
#include "glyphwarp/image.hpp"
#include "glyphwarp/rng.hpp"

namespace glyphwarp {

struct Glyph {
    GreyImage image;
    int label = 0;
};

/// Anything that emits labeled clean characters.
class GlyphSource {
public:
    virtual ~GlyphSource() = default;
    virtual std::string_view name() const = 0;
    virtual Glyph draw(RngStream& rng) const = 0;
};

/// Rendering statistics of a synthetic source.
struct GlyphStyle {
    ClassSet classes = ClassSet::all;
    double stroke_width_min = 2.0;  // pixels
    double stroke_width_max = 2.0;
    double translate_jitter = 1.0;  // +/- pixels
    double scale_jitter = 0.05;     // +/- fraction
    double rotation_jitter = 0.0;   // +/- degrees
    double vertex_wobble = 0.0;     // +/- skeleton units per polyline vertex
};

/// Renders one character of the built-in stroke-skeleton alphabet.
/// `scale` multiplies the nominal glyph size; (dx, dy) translate in pixels.
GreyImage render_glyph(int label, double stroke_width, double scale = 1.0, double dx = 0.0,
                       double dy = 0.0, double rotation_deg = 0.0);

class SyntheticSource final : public GlyphSource {
public:
    SyntheticSource(std::string name, GlyphStyle style, std::uint64_t seed);

    std::string_view name() const override { return name_; }
    /// Draws a class uniformly from the style's class set, then the jitter.
    Glyph draw(RngStream& rng) const override;
    const GlyphStyle& style() const { return style_; }

private:
    std::string name_;
    GlyphStyle style_;
    std::uint64_t seed_;
};

/// Default-jitter source (+/-1 px, +/-5 % scale) over the given classes.
std::shared_ptr<const GlyphSource> synthetic_source(ClassSet classes, std::uint64_t seed);

/// The four desk-scale stand-ins for the fonts, captcha, OCR and NIST corpora.
std::shared_ptr<const GlyphSource> fonts_standin(std::uint64_t seed);
std::shared_ptr<const GlyphSource> captcha_standin(std::uint64_t seed);
std::shared_ptr<const GlyphSource> ocr_standin(std::uint64_t seed);
std::shared_ptr<const GlyphSource> nist_standin(std::uint64_t seed);

}  // namespace glyphwarp
