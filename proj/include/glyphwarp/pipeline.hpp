#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "glyphwarp/dataset.hpp"
#include "glyphwarp/glyphs.hpp"
#include "glyphwarp/transforms.hpp"

namespace glyphwarp {

/// Pipeline stages, enumerated in the order they are applied.
enum class Stage : std::uint8_t {
    thickness,
    slant,
    affine,
    elastic,
    pinch,
    motion_blur,
    occlusion,
    smoothing,
    permute,
    gaussian_noise,
    background,
    salt_pepper,
    scratches,
    contrast,
};

inline constexpr std::size_t kStageCount = 14;
const std::array<Stage, kStageCount>& canonical_stages();
const char* to_string(Stage s);
Stage parse_stage(const std::string& name);

enum class Preset : std::uint8_t { raw, nistp, p07, custom };
const char* to_string(Preset p);
/// Accepts raw|nistp|p07 (case-insensitive). Throws std::invalid_argument.
Preset parse_preset(const std::string& name);

struct ComplexityMode {
    enum class Kind : std::uint8_t { fixed, per_module_uniform };
    Kind kind = Kind::fixed;
    double lo = 0.0;  // fixed value when kind == fixed
    double hi = 0.0;

    static ComplexityMode fixed(double value);
    static ComplexityMode uniform(double lo, double hi);
};

class PipelineSpec {
public:
    /// raw: no stages; nistp: thickness..pinch; p07: all stages.
    /// Both nistp and p07 draw each module's complexity from U[0, 0.7].
    static PipelineSpec preset(Preset p);
    /// Stages are stored in canonical order whatever the registration order.
    static PipelineSpec custom(std::span<const Stage> stages, ComplexityMode mode);

    PipelineSpec with_mode(ComplexityMode mode) const;

    const std::vector<Stage>& stages() const { return stages_; }
    Preset preset_kind() const { return preset_; }
    const ComplexityMode& mode() const { return mode_; }
    bool has(Stage s) const;

private:
    std::vector<Stage> stages_;
    Preset preset_ = Preset::custom;
    ComplexityMode mode_;
};

/// External images the noise stages draw from.
struct PipelineResources {
    OccluderSource occluders;
    std::span<const GreyImage> textures;
    std::span<const GreyImage> strokes;
};

/// Occluders from the NIST stand-in, procedural texture and stroke banks.
const PipelineResources& default_resources();

/// Called after every enabled stage with the intermediate image.
using StageObserver = std::function<void(Stage, const GreyImage&)>;

/// Runs the enabled stages in canonical order. Stage s draws from
/// rng.substream(index of s), so enabling or disabling one stage never shifts
/// the randomness of the others.
GreyImage perturb(const GreyImage& img, const PipelineSpec& spec, const RngStream& rng,
                  const PipelineResources& resources = default_resources(),
                  const StageObserver& observer = {});

// ------------------------------------------------------------- data sources

class SourceMix {
public:
    /// fonts 0.10, captcha 0.25, ocr 0.25, nist 0.40.
    static SourceMix standard_mix();
    static SourceMix single(std::string name);
    /// "name:weight,name:weight,..." or a single bare name.
    static SourceMix parse(const std::string& text);

    explicit SourceMix(std::vector<std::pair<std::string, double>> weights);

    const std::vector<std::pair<std::string, double>>& weights() const { return weights_; }
    /// Throws std::invalid_argument unless weights are >= 0 and sum to 1 +/- 1e-9.
    void validate() const;
    /// Index into weights() chosen by one uniform draw.
    std::size_t pick(RngStream& rng) const;
    std::string to_string() const;

private:
    std::vector<std::pair<std::string, double>> weights_;
};

class SourceRegistry {
public:
    void add(std::shared_ptr<const GlyphSource> source);
    /// Throws std::invalid_argument for unknown names.
    const GlyphSource& get(const std::string& name) const;
    bool contains(const std::string& name) const;

private:
    std::map<std::string, std::shared_ptr<const GlyphSource>, std::less<>> sources_;
};

/// fonts, captcha, ocr and nist stand-ins plus the plain "synthetic" source.
const SourceRegistry& default_registry();

struct GenerateOptions {
    unsigned threads = 1;
    const SourceRegistry* registry = nullptr;      // default_registry() when null
    const PipelineResources* resources = nullptr;  // default_resources() when null
};

/// Item i is fully determined by (seed, i): a source is chosen by the mix,
/// a glyph drawn from it and then perturbed.
LabeledDataset generate_dataset(std::size_t n, const SourceMix& mix, const PipelineSpec& spec,
                                std::uint64_t seed, const GenerateOptions& options = {});

/// Index of the mix entry item i draws from; matches generate_dataset.
std::size_t item_source(const SourceMix& mix, std::uint64_t seed, std::size_t i);

}  // namespace glyphwarp
