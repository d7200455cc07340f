#include "glyphwarp/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace glyphwarp {

namespace {

constexpr std::uint64_t kItemSourceKey = 0;
constexpr std::uint64_t kItemGlyphKey = 1;
constexpr std::uint64_t kItemPerturbKey = 2;
constexpr std::uint64_t kOccluderSeed = 0x0CC1DE5ULL;

constexpr std::array<Stage, kStageCount> kCanonical = {
    Stage::thickness, Stage::slant,     Stage::affine,         Stage::elastic,
    Stage::pinch,     Stage::motion_blur, Stage::occlusion,    Stage::smoothing,
    Stage::permute,   Stage::gaussian_noise, Stage::background, Stage::salt_pepper,
    Stage::scratches, Stage::contrast,
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

GreyImage run_stage(Stage stage, const GreyImage& img, RngStream& rng, Complexity k,
                    const PipelineResources& res) {
    switch (stage) {
        case Stage::thickness: return apply_thickness(img, sample_thickness(rng, k));
        case Stage::slant: return apply_slant(img, sample_slant(rng, k));
        case Stage::affine: return apply_affine(img, sample_affine(rng, k));
        case Stage::elastic: return apply_elastic(img, sample_elastic(rng, k));
        case Stage::pinch: return apply_pinch(img, sample_pinch(rng, k));
        case Stage::motion_blur: return apply_motion_blur(img, sample_motion_blur(rng, k));
        case Stage::occlusion: return apply_occlusion(img, sample_occlusion(rng, k, res.occluders));
        case Stage::smoothing: return apply_smoothing(img, sample_smoothing(rng, k));
        case Stage::permute: return apply_permute(img, sample_permute(rng, k));
        case Stage::gaussian_noise: return apply_gaussian_noise(img, sample_gaussian_noise(rng, k));
        case Stage::background: return apply_background(img, sample_background(rng, k, res.textures));
        case Stage::salt_pepper: return apply_salt_pepper(img, sample_salt_pepper(rng, k));
        case Stage::scratches: return apply_scratches(img, sample_scratches(rng, k, res.strokes));
        case Stage::contrast: return apply_contrast(img, sample_contrast(rng, k));
    }
    return img;
}

}  // namespace

const std::array<Stage, kStageCount>& canonical_stages() { return kCanonical; }

const char* to_string(Stage s) {
    switch (s) {
        case Stage::thickness: return "thickness";
        case Stage::slant: return "slant";
        case Stage::affine: return "affine";
        case Stage::elastic: return "elastic";
        case Stage::pinch: return "pinch";
        case Stage::motion_blur: return "motion_blur";
        case Stage::occlusion: return "occlusion";
        case Stage::smoothing: return "smoothing";
        case Stage::permute: return "permute";
        case Stage::gaussian_noise: return "gaussian_noise";
        case Stage::background: return "background";
        case Stage::salt_pepper: return "salt_pepper";
        case Stage::scratches: return "scratches";
        case Stage::contrast: return "contrast";
    }
    return "?";
}

Stage parse_stage(const std::string& name) {
    for (Stage s : kCanonical)
        if (lower(name) == to_string(s)) return s;
    throw std::invalid_argument("unknown stage '" + name + "'");
}

const char* to_string(Preset p) {
    switch (p) {
        case Preset::raw: return "raw";
        case Preset::nistp: return "nistp";
        case Preset::p07: return "p07";
        case Preset::custom: break;
    }
    return "custom";
}

Preset parse_preset(const std::string& name) {
    const auto n = lower(name);
    if (n == "raw") return Preset::raw;
    if (n == "nistp") return Preset::nistp;
    if (n == "p07") return Preset::p07;
    throw std::invalid_argument("unknown preset '" + name + "' (expected raw, nistp or p07)");
}

ComplexityMode ComplexityMode::fixed(double value) {
    Complexity checked(value);
    return {Kind::fixed, checked.value(), checked.value()};
}

ComplexityMode ComplexityMode::uniform(double lo, double hi) {
    Complexity a(lo);
    Complexity b(hi);
    if (a.value() > b.value()) throw std::invalid_argument("complexity range has lo > hi");
    return {Kind::per_module_uniform, a.value(), b.value()};
}

PipelineSpec PipelineSpec::preset(Preset p) {
    PipelineSpec spec;
    spec.preset_ = p;
    spec.mode_ = ComplexityMode::uniform(0.0, 0.7);
    switch (p) {
        case Preset::raw: spec.mode_ = ComplexityMode::fixed(0.0); break;
        case Preset::nistp: spec.stages_.assign(kCanonical.begin(), kCanonical.begin() + 5); break;
        case Preset::p07: spec.stages_.assign(kCanonical.begin(), kCanonical.end()); break;
        case Preset::custom: throw std::invalid_argument("use PipelineSpec::custom for custom stage lists");
    }
    return spec;
}

PipelineSpec PipelineSpec::custom(std::span<const Stage> stages, ComplexityMode mode) {
    PipelineSpec spec;
    spec.preset_ = Preset::custom;
    spec.mode_ = mode;
    for (Stage s : kCanonical)
        if (std::find(stages.begin(), stages.end(), s) != stages.end()) spec.stages_.push_back(s);
    return spec;
}

PipelineSpec PipelineSpec::with_mode(ComplexityMode mode) const {
    PipelineSpec copy = *this;
    copy.mode_ = mode;
    return copy;
}

bool PipelineSpec::has(Stage s) const {
    return std::find(stages_.begin(), stages_.end(), s) != stages_.end();
}

const PipelineResources& default_resources() {
    static const PipelineResources res = [] {
        PipelineResources r;
        auto source = nist_standin(kOccluderSeed);
        r.occluders = [source](RngStream& rng) { return source->draw(rng).image; };
        r.textures = texture_bank();
        r.strokes = stroke_bank();
        return r;
    }();
    return res;
}

GreyImage perturb(const GreyImage& img, const PipelineSpec& spec, const RngStream& rng,
                  const PipelineResources& resources, const StageObserver& observer) {
    GreyImage current = img;
    for (Stage stage : spec.stages()) {
        RngStream stage_rng = rng.substream(static_cast<std::uint64_t>(stage));
        const auto& mode = spec.mode();
        const double k = mode.kind == ComplexityMode::Kind::fixed ? mode.lo
                                                                  : stage_rng.uniform(mode.lo, mode.hi);
        current = run_stage(stage, current, stage_rng, Complexity(k), resources);
        if (observer) observer(stage, current);
    }
    return current;
}

// ------------------------------------------------------------------ sources

SourceMix::SourceMix(std::vector<std::pair<std::string, double>> weights) : weights_(std::move(weights)) {}

SourceMix SourceMix::standard_mix() {
    return SourceMix({{"fonts", 0.10}, {"captcha", 0.25}, {"ocr", 0.25}, {"nist", 0.40}});
}

SourceMix SourceMix::single(std::string name) { return SourceMix({{std::move(name), 1.0}}); }

SourceMix SourceMix::parse(const std::string& text) {
    if (text.empty() || lower(text) == "standard") return standard_mix();
    std::vector<std::pair<std::string, double>> weights;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            weights.emplace_back(item, 1.0);
            continue;
        }
        try {
            weights.emplace_back(item.substr(0, colon), std::stod(item.substr(colon + 1)));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad source weight in '" + item + "'");
        }
    }
    SourceMix mix(std::move(weights));
    mix.validate();
    return mix;
}

void SourceMix::validate() const {
    if (weights_.empty()) throw std::invalid_argument("source mix is empty");
    double total = 0.0;
    for (const auto& [name, w] : weights_) {
        if (!(w >= 0.0)) throw std::invalid_argument("source weight for '" + name + "' is negative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("source weights sum to " + std::to_string(total) + ", expected 1");
}

std::size_t SourceMix::pick(RngStream& rng) const {
    const double u = rng.uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        acc += weights_[i].second;
        if (u < acc) return i;
    }
    // u landed in the rounding gap above the last cumulative weight
    for (std::size_t i = weights_.size(); i-- > 0;)
        if (weights_[i].second > 0.0) return i;
    return weights_.size() - 1;
}

std::string SourceMix::to_string() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        out << (i ? "," : "") << weights_[i].first << ":" << weights_[i].second;
    return out.str();
}

void SourceRegistry::add(std::shared_ptr<const GlyphSource> source) {
    std::string key(source->name());
    sources_[key] = std::move(source);
}

const GlyphSource& SourceRegistry::get(const std::string& name) const {
    const auto it = sources_.find(name);
    if (it == sources_.end()) throw std::invalid_argument("unknown glyph source '" + name + "'");
    return *it->second;
}

bool SourceRegistry::contains(const std::string& name) const { return sources_.contains(name); }

const SourceRegistry& default_registry() {
    static const SourceRegistry registry = [] {
        SourceRegistry r;
        r.add(fonts_standin(0xF0));
        r.add(captcha_standin(0xCA));
        r.add(ocr_standin(0x0C));
        r.add(nist_standin(0x19));
        r.add(synthetic_source(ClassSet::all, 0x5F));
        return r;
    }();
    return registry;
}

std::size_t item_source(const SourceMix& mix, std::uint64_t seed, std::size_t i) {
    RngStream pick_rng = RngStream(seed).substream(i).substream(kItemSourceKey);
    return mix.pick(pick_rng);
}

LabeledDataset generate_dataset(std::size_t n, const SourceMix& mix, const PipelineSpec& spec,
                                std::uint64_t seed, const GenerateOptions& options) {
    mix.validate();
    const SourceRegistry& registry = options.registry ? *options.registry : default_registry();
    const PipelineResources& resources = options.resources ? *options.resources : default_resources();
    std::vector<const GlyphSource*> sources;
    for (const auto& [name, w] : mix.weights()) sources.push_back(&registry.get(name));

    LabeledDataset ds;
    ds.items.resize(n);
    const RngStream root(seed);
    auto make_item = [&](std::size_t i) {
        const RngStream item_rng = root.substream(i);
        RngStream pick_rng = item_rng.substream(kItemSourceKey);
        const GlyphSource& src = *sources[mix.pick(pick_rng)];
        RngStream glyph_rng = item_rng.substream(kItemGlyphKey);
        Glyph g = src.draw(glyph_rng);
        ds.items[i].image = perturb(g.image, spec, item_rng.substream(kItemPerturbKey), resources);
        ds.items[i].label = static_cast<std::uint8_t>(g.label);
    };

    const unsigned threads = std::max(1u, options.threads);
    if (threads == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) make_item(i);
    } else {
        std::vector<std::jthread> workers;
        for (unsigned t = 0; t < threads; ++t)
            workers.emplace_back([&, t] {
                for (std::size_t i = t; i < n; i += threads) make_item(i);
            });
    }

    ds.meta["seed"] = std::to_string(seed);
    ds.meta["preset"] = to_string(spec.preset_kind());
    ds.meta["mix"] = mix.to_string();
    ds.meta["count"] = std::to_string(n);
    std::string stages;
    for (Stage s : spec.stages()) stages += std::string(stages.empty() ? "" : ",") + to_string(s);
    ds.meta["stages"] = stages;
    const auto& mode = spec.mode();
    ds.meta["complexity"] = mode.kind == ComplexityMode::Kind::fixed
                                ? "fixed:" + std::to_string(mode.lo)
                                : "uniform:" + std::to_string(mode.lo) + ":" + std::to_string(mode.hi);
    return ds;
}

}  // namespace glyphwarp
