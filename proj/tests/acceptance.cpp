// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <CLI11.hpp>
#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

#include "glyphwarp/dataset.hpp"
#include "glyphwarp/experiment.hpp"
#include "glyphwarp/glyphs.hpp"
#include "glyphwarp/metrics.hpp"
#include "glyphwarp/nnet.hpp"
#include "glyphwarp/pipeline.hpp"
#include "glyphwarp/transforms.hpp"
#include "gradcheck.hpp"
#include "support.hpp"

using namespace glyphwarp;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail = what;
            pass = false;
        }
    }
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    fmt::print("{} {} ({:.1f} s){}{}\n", o.pass ? "PASS" : "FAIL", name, seconds_since(t0),
               o.detail.empty() ? "" : ": ", o.detail);
    std::fflush(stdout);
}

// ------------------------------------------------------------------ identity

Outcome identity_suite() {
    Outcome o;
    const auto t0 = Clock::now();
    const Complexity zero(0.0);
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto img = testutil::random_image(s);
        RngStream rng(s);
        auto thick = sample_thickness(rng, zero);
        thick.elem_rank = 0;
        o.require(apply_thickness(img, thick) == img, "thickness");
        o.require(apply_slant(img, sample_slant(rng, zero)) == img, "slant");
        o.require(apply_affine(img, sample_affine(rng, zero)) == img, "affine");
        o.require(apply_elastic(img, sample_elastic(rng, zero)) == img, "elastic");
        o.require(apply_pinch(img, sample_pinch(rng, zero)) == img, "pinch");
        o.require(apply_motion_blur(img, sample_motion_blur(rng, zero)) == img, "motion blur");
        o.require(apply_gaussian_noise(img, sample_gaussian_noise(rng, zero)) == img, "gaussian noise");
        o.require(apply_permute(img, sample_permute(rng, zero)) == img, "permute");
        o.require(apply_salt_pepper(img, sample_salt_pepper(rng, zero)) == img, "salt and pepper");
        auto contrast = sample_contrast(rng, zero);
        contrast.invert = false;
        o.require(apply_contrast(img, contrast) == img, "contrast");
        o.require(apply_occlusion(img, OcclusionParams{}) == img, "occlusion skipped");
        o.require(apply_smoothing(img, SmoothingParams{}) == img, "smoothing skipped");
        o.require(apply_scratches(img, ScratchParams{}) == img, "scratches skipped");
        BackgroundParams bg;
        bg.background = testutil::random_image(s + 1000);
        o.require(apply_background(img, bg) == img, "background at zero strength");
    }
    const double t = seconds_since(t0);
    o.require(t < 1.0, fmt::format("took {:.2f} s", t));
    return o;
}

// -------------------------------------------------------------- distribution

struct Moments {
    double lo;
    double hi;
    double sum = 0.0;
    std::size_t n = 0;
    bool in_range = true;

    void add(double v) {
        sum += v;
        ++n;
        if (!(v >= lo && v <= hi)) in_range = false;
    }
};

void check_uniform(Outcome& o, const Moments& m, const std::string& name, double kappa) {
    o.require(m.in_range, fmt::format("{} out of range at k={}", name, kappa));
    const double width = m.hi - m.lo;
    if (width <= 0.0 || m.n == 0) return;
    const double mean = m.sum / static_cast<double>(m.n);
    const double mid = (m.lo + m.hi) / 2.0;
    o.require(std::abs(mean - mid) <= 0.01 * width,
              fmt::format("{} mean {:.5f} vs midpoint {:.5f} at k={}", name, mean, mid, kappa));
}

void check_skip(Outcome& o, std::size_t applied, std::size_t n, double skip, const std::string& name,
                double kappa) {
    const double rate = 1.0 - static_cast<double>(applied) / static_cast<double>(n);
    o.require(std::abs(rate - skip) <= 0.015,
              fmt::format("{} skip rate {:.4f} vs {:.2f} at k={}", name, rate, skip, kappa));
}

Outcome distribution_suite() {
    Outcome o;
    const auto t0 = Clock::now();
    const std::size_t n = 100000;
    const auto& res = default_resources();
    // Occluder pixels do not influence the sampled parameters; a blank
    // occluder avoids rendering 10^5 glyphs.
    const OccluderSource blank = [](RngStream&) { return GreyImage{}; };
    for (double kv : {0.35, 0.7, 1.0}) {
        const Complexity k(kv);
        RngStream root(static_cast<std::uint64_t>(kv * 1000));
        auto next = [&](std::uint64_t key) { return root.substream(key); };

        Moments slant{-kv, kv};
        Moments scale_x{1 - 3 * kv, 1 + 3 * kv}, scale_y{1 - 3 * kv, 1 + 3 * kv};
        Moments shear_x{-3 * kv, 3 * kv}, shear_y{-3 * kv, 3 * kv};
        Moments shift_x{-4 * kv, 4 * kv}, shift_y{-4 * kv, 4 * kv};
        Moments pinch{-kv, 0.7 * kv};
        Moments angle{0.0, 360.0};
        Moments variance{2.0, 2.0 + 6.0 * kv};
        Moments contrast{1.0 - 0.85 * kv, 1.0};
        Moments strength{0.4 * kv, 0.8 * kv};
        std::size_t occl = 0, smooth = 0, perm = 0, noise = 0, salt = 0, scratch = 0;

        auto r_thick = next(1), r_slant = next(2), r_aff = next(3), r_el = next(4), r_pinch = next(5);
        auto r_mb = next(6), r_occ = next(7), r_sm = next(8), r_perm = next(9), r_gn = next(10);
        auto r_bg = next(11), r_sp = next(12), r_scr = next(13), r_con = next(14);
        for (std::size_t i = 0; i < n; ++i) {
            const auto th = sample_thickness(r_thick, k);
            o.require(conforms(th, k), "thickness params");

            const auto sl = sample_slant(r_slant, k);
            slant.add(sl.slant);

            const auto af = sample_affine(r_aff, k);
            scale_x.add(af.scale_x);
            scale_y.add(af.scale_y);
            shear_x.add(af.shear_x);
            shear_y.add(af.shear_y);
            shift_x.add(af.shift_x);
            shift_y.add(af.shift_y);

            o.require(conforms(sample_elastic(r_el, k), k), "elastic params");

            pinch.add(sample_pinch(r_pinch, k).pinch);

            const auto mb = sample_motion_blur(r_mb, k);
            angle.add(mb.angle_deg);
            o.require(conforms(mb, k), "motion blur params");

            const auto oc = sample_occlusion(r_occ, k, blank);
            occl += oc.applied;
            o.require(conforms(oc, k), "occlusion params");

            const auto sm = sample_smoothing(r_sm, k);
            smooth += sm.applied;
            if (sm.applied) variance.add(sm.variance);
            o.require(conforms(sm, k), "smoothing params");

            const auto pm = sample_permute(r_perm, k);
            perm += pm.applied;
            o.require(conforms(pm, k), "permute params");

            const auto gn = sample_gaussian_noise(r_gn, k);
            noise += gn.applied;
            o.require(conforms(gn, k), "gaussian noise params");

            const auto bg = sample_background(r_bg, k, res.textures);
            strength.add(bg.strength);

            const auto sp = sample_salt_pepper(r_sp, k);
            salt += sp.applied;
            o.require(conforms(sp, k), "salt and pepper params");

            const auto sc = sample_scratches(r_scr, k, res.strokes);
            scratch += sc.applied;
            o.require(conforms(sc, k), "scratch params");

            contrast.add(sample_contrast(r_con, k).contrast);
        }
        check_uniform(o, slant, "slant", kv);
        check_uniform(o, scale_x, "affine a", kv);
        check_uniform(o, scale_y, "affine d", kv);
        check_uniform(o, shear_x, "affine b", kv);
        check_uniform(o, shear_y, "affine e", kv);
        check_uniform(o, shift_x, "affine c", kv);
        check_uniform(o, shift_y, "affine f", kv);
        check_uniform(o, pinch, "pinch", kv);
        check_uniform(o, angle, "motion angle", kv);
        check_uniform(o, variance, "smoothing variance", kv);
        check_uniform(o, contrast, "contrast", kv);
        check_uniform(o, strength, "background strength", kv);
        check_skip(o, occl, n, kOcclusionSkip, "occlusion", kv);
        check_skip(o, smooth, n, kSmoothingSkip, "smoothing", kv);
        check_skip(o, perm, n, kPermuteSkip, "permute", kv);
        check_skip(o, noise, n, kGaussianNoiseSkip, "gaussian noise", kv);
        check_skip(o, salt, n, kSaltPepperSkip, "salt and pepper", kv);
        check_skip(o, scratch, n, kScratchesSkip, "scratches", kv);
    }
    const double t = seconds_since(t0);
    o.require(t < 30.0, fmt::format("took {:.1f} s", t));
    return o;
}

// --------------------------------------------------------------------- pinch

Outcome pinch_suite() {
    Outcome o;
    const double r = 16.0;
    for (double p : {-1.0, -0.35, 0.2, 0.7, 1.0})
        o.require(std::abs(pinch_source_distance(r, r, p) - r) <= 1e-9, fmt::format("boundary at pinch {}", p));
    o.require(std::abs(pinch_source_distance(r / 2, r, 1.0) - r / std::numbers::sqrt2) <= 1e-9, "half radius");
    return o;
}

// ------------------------------------------------------------------ gradient

Outcome gradient_suite() {
    Outcome o;
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        worst = std::max(worst, testutil::mlp_gradient_check(8, 6, 3, seed).max_rel_error);
        worst = std::max(worst, testutil::da_gradient_check(8, 6, true, seed).max_rel_error);
        worst = std::max(worst, testutil::da_gradient_check(8, 6, false, seed).max_rel_error);
    }
    o.require(worst < 1e-4, fmt::format("max relative error {:.2e}", worst));
    const double t = seconds_since(t0);
    o.require(t < 5.0, fmt::format("took {:.2f} s", t));
    if (o.pass) o.detail = fmt::format("max relative error {:.2e}", worst);
    return o;
}

// --------------------------------------------------------------- pretraining

double pretrain_ratio() {
    const auto ds = generate_dataset(500, SourceMix::single("synthetic"), PipelineSpec::preset(Preset::raw), 21);
    const auto images = nnet::to_matrix(ds);
    RngStream rng(22);
    nnet::SdaModel sda;
    sda.layers.push_back(nnet::make_da_layer(kPixels, 64, 0.2, true, rng));
    nnet::TrainConfig cfg;
    cfg.pretrain_epochs = 50;
    cfg.seed = 23;
    const auto r = nnet::pretrain(sda, images, cfg);
    return r.final_loss[0] / r.initial_loss[0];
}

Outcome pretraining_suite() {
    Outcome o;
    const double a = pretrain_ratio();
    const double b = pretrain_ratio();
    o.require(a <= 0.8, fmt::format("final/initial loss {:.3f}", a));
    o.require(a == b, "two seeded runs differ");
    if (o.pass) o.detail = fmt::format("final/initial loss {:.3f}", a);
    return o;
}

// ----------------------------------------------------------- published-table arithmetic

Outcome arithmetic_suite(const fs::path& fixture) {
    Outcome o;
    const auto t = load_results(fixture);
    auto e = [&](const char* model, const char* task, const char* setting = "multi") {
        const auto* r = t.find(model, "nist", task, setting);
        if (r == nullptr) throw std::runtime_error(fmt::format("fixture lacks {} {} {}", model, task, setting));
        return r->error;
    };
    auto near = [&](double got, double want, const std::string& what) {
        o.require(std::abs(got - want) <= 0.7, fmt::format("{}: {:.2f} vs {}", what, got, want));
    };
    const char* perturbed[] = {"SDA1", "SDA2", "MLP1", "MLP2"};
    const char* clean[] = {"SDA0", "SDA0", "MLP0", "MLP0"};
    const double nist_col[] = {38, 27, 5.2, -0.4};
    const double digit_col[] = {93, 59, -10, -29};
    for (int i = 0; i < 4; ++i) {
        near(rel_ood_change(e(clean[i], "all"), e(perturbed[i], "all")), nist_col[i],
             fmt::format("{}/{} NIST", clean[i], perturbed[i]));
        near(rel_ood_change(e(clean[i], "digits"), e(perturbed[i], "digits")), digit_col[i],
             fmt::format("{}/{} digits", clean[i], perturbed[i]));
    }
    const std::pair<const char*, const char*> rows[] = {{"SDA", "digits"}, {"SDA", "lower"}, {"SDA", "upper"},
                                                        {"MLP", "digits"}, {"MLP", "lower"}, {"MLP", "upper"}};
    const double magnitudes[] = {27, 15, 13, 5.6, 4.1, 3.6};
    for (int i = 0; i < 6; ++i) {
        const auto [model, task] = rows[i];
        near(std::abs(rel_multitask_improvement(e(model, task, "single"), e(model, task, "multi"))),
             magnitudes[i], fmt::format("{}-{} multi-task", model, task));
    }
    const double se = stderr_of_rate(0.171, 82587);
    o.require(se >= 0.0012 && se <= 0.0014, fmt::format("stderr {:.5f}", se));
    return o;
}

// --------------------------------------------------------------- determinism

std::vector<char> file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism_suite(const std::string& cli, const fs::path& work) {
    Outcome o;
    const auto spec = PipelineSpec::preset(Preset::p07);
    const auto mix = SourceMix::standard_mix();
    const auto serial = encode_cds(generate_dataset(1000, mix, spec, 7));
    GenerateOptions par;
    par.threads = 4;
    o.require(serial == encode_cds(generate_dataset(1000, mix, spec, 7, par)), "serial and parallel differ");
    o.require(serial == encode_cds(generate_dataset(1000, mix, spec, 7)), "two library runs differ");

    if (!cli.empty()) {
        fs::create_directories(work);
        const auto a = work / "a.cds";
        const auto b = work / "b.cds";
        for (const auto& out : {a, b}) {
            const auto cmd = fmt::format("\"{}\" gen --preset p07 --n 1000 --seed 7 --out \"{}\" > /dev/null", cli,
                                         out.string());
            o.require(std::system(cmd.c_str()) == 0, "gen command failed");
        }
        const auto fa = file_bytes(a);
        o.require(!fa.empty() && fa == file_bytes(b), "gen outputs differ");
        o.require(fa.size() == serial.size() && std::equal(fa.begin(), fa.end(), serial.begin(),
                                                           [](char x, std::uint8_t y) {
                                                               return static_cast<std::uint8_t>(x) == y;
                                                           }),
                  "gen output differs from the library encoding");
    }
    return o;
}

// ---------------------------------------------------------------- end to end

Outcome grid_suite(const fs::path& out_dir) {
    Outcome o;
    const auto t0 = Clock::now();
    const ExperimentGrid grid;
    const auto table = run_grid(grid);
    const double minutes = seconds_since(t0) / 60.0;
    const auto text = render_report(table);
    fs::create_directories(out_dir);
    save_results(table, out_dir / "results.tsv");
    std::ofstream(out_dir / "report.txt") << text;

    o.require(minutes < 15.0, fmt::format("took {:.1f} min", minutes));
    const double chance = 61.0 / 62.0;
    double worst = 0.0;
    for (const char* family : {"MLP", "SDA"})
        for (int i = 0; i < 3; ++i) {
            const auto name = fmt::format("{}{}", family, i);
            for (const char* eval : {"nist", "nistp", "p07"}) {
                const auto* r = table.find(name, eval, "all");
                o.require(r != nullptr && r->status == "ok", fmt::format("{} on {} missing", name, eval));
            }
        }
    for (const auto& r : table.rows) {
        if (r.status != "ok") continue;
        worst = std::max(worst, r.task == "all" ? r.error : 0.0);
        o.require(r.error < chance, fmt::format("{} {} {} error {:.4f} not below chance", r.model, r.eval_set,
                                                r.task, r.error));
    }
    for (const char* title : {"Test error rates", "Relative change from perturbed training data",
                              "Multi-task setting on clean data"})
        o.require(text.find(title) != std::string::npos, fmt::format("report lacks '{}'", title));
    if (o.pass)
        o.detail = fmt::format("{:.1f} min, worst 62-class error {:.4f} < {:.4f}; report in {}", minutes, worst,
                               chance, (out_dir / "report.txt").string());
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"glyphwarp acceptance checks"};
    std::string cli;
    std::string fixture;
    std::string work = (fs::temp_directory_path() / "glyphwarp_acceptance").string();
    bool skip_grid = false;
    app.add_option("--cli", cli, "glyphwarp executable for the CLI determinism check");
    app.add_option("--fixture", fixture, "published error-rate table (TSV)")->required();
    app.add_option("--work-dir", work, "scratch directory");
    app.add_flag("--skip-grid", skip_grid, "skip the end-to-end grid run");
    CLI11_PARSE(app, argc, argv);

    report("identity at zero complexity", identity_suite);
    report("sampler distributions", distribution_suite);
    report("pinch formula", pinch_suite);
    report("gradients vs finite differences", gradient_suite);
    report("pretraining efficacy", pretraining_suite);
    report("published-table arithmetic", [&] { return arithmetic_suite(fixture); });
    report("determinism", [&] { return determinism_suite(cli, fs::path(work) / "gen"); });
    if (skip_grid)
        fmt::print("SKIP end-to-end desk grid\n");
    else
        report("end-to-end desk grid", [&] { return grid_suite(fs::path(work) / "grid"); });

    fmt::print("{} criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
