#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "glyphwarp/config.hpp"
#include "glyphwarp/dataset.hpp"
#include "glyphwarp/experiment.hpp"
#include "glyphwarp/metrics.hpp"
#include "glyphwarp/nnet.hpp"
#include "glyphwarp/pipeline.hpp"

namespace fs = std::filesystem;
using namespace glyphwarp;

namespace {

struct GenArgs {
    std::string preset = "raw";
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string mix = "standard";
    std::string out;
    unsigned threads = 1;
};

int run_gen(const GenArgs& a) {
    const auto mix = SourceMix::parse(a.mix);
    mix.validate();
    GenerateOptions opts;
    opts.threads = a.threads;
    const auto ds = generate_dataset(a.n, mix, PipelineSpec::preset(parse_preset(a.preset)), a.seed, opts);
    write_cds(ds, a.out);
    std::cout << fmt::format("wrote {} images to {}\n", ds.size(), a.out);
    return 0;
}

struct ShowArgs {
    std::string data;
    int rows = 8;
    int cols = 8;
    std::string out;
};

int run_show(const ShowArgs& a) {
    const auto ds = read_cds(a.data);
    export_contact_sheet(ds, a.rows, a.cols, a.out);
    std::cout << fmt::format("wrote {}x{} contact sheet to {}\n", a.rows, a.cols, a.out);
    return 0;
}

struct TrainArgs {
    std::string model = "mlp";
    std::string train;
    std::string valid;
    std::string config;
    std::string out;
    std::uint64_t seed = 1;
};

int run_train(const TrainArgs& a) {
    const auto cfg = a.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(a.config);
    const auto hyper = ExperimentGrid::from_config(cfg).hyper;
    const auto train = read_cds(a.train);
    const auto valid = read_cds(a.valid);
    const auto family = parse_model_family(a.model);
    const auto trained = train_model(family, train, valid, valid, kClassCount, hyper, a.seed);

    nnet::Checkpoint ckpt;
    ckpt.kind = trained.kind;
    ckpt.network = trained.network;
    ckpt.recon_biases = trained.recon_biases;
    nnet::save_checkpoint(ckpt, a.out);
    std::cout << fmt::format("{} trained: learning rate {}, validation error {:.4f}; saved to {}\n", a.model,
                             trained.learning_rate, trained.selection_error, a.out);
    return 0;
}

struct EvalArgs {
    std::string model_file;
    std::string data;
    std::string classes = "all";
};

int run_eval(const EvalArgs& a) {
    const auto ckpt = nnet::load_checkpoint(a.model_file);
    const auto set = parse_class_set(a.classes);
    const auto range = class_range(set);
    const auto ds = read_cds(a.data);
    const auto outputs = ckpt.network.class_count();

    LabeledDataset test;
    std::optional<ClassRange> subset;
    if (outputs == kClassCount) {
        test = set == ClassSet::all ? ds : filter_classes(ds, set, false);
        if (set != ClassSet::all) subset = range;
    } else if (outputs == range.count && set != ClassSet::all) {
        test = filter_classes(ds, set, true);
    } else {
        throw std::invalid_argument(
            fmt::format("model has {} outputs, which does not fit class set '{}'", outputs, a.classes));
    }
    if (test.empty()) throw std::invalid_argument("no test images in the requested classes");
    const double err = nnet::evaluate(ckpt.network, nnet::to_matrix(test), nnet::to_labels(test), subset);
    std::cout << fmt::format("classes={} n={} error={:.4f} stderr={:.4f}\n", a.classes, test.size(), err,
                             stderr_of_rate(err, test.size()));
    return 0;
}

struct ExperimentArgs {
    std::string grid_config;
    std::string out_dir;
};

int run_experiment(const ExperimentArgs& a) {
    const auto cfg = a.grid_config.empty() ? KeyValueConfig{} : KeyValueConfig::load(a.grid_config);
    const auto grid = ExperimentGrid::from_config(cfg);
    fs::create_directories(a.out_dir);
    const auto table = run_grid(grid, [](const std::string& msg) { std::cerr << msg << '\n'; });
    const fs::path dir(a.out_dir);
    save_results(table, dir / "results.tsv");
    const auto report = render_report(table);
    std::ofstream(dir / "report.txt") << report;
    std::cout << report;
    return 0;
}

int run_report(const std::string& results) {
    std::cout << render_report(load_results(results));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perturbed character-image generator and classifier experiments"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a CDS data set");
    gen_cmd->add_option("--preset", gen.preset, "raw, nistp or p07")
        ->check(CLI::IsMember({"raw", "nistp", "p07"}, CLI::ignore_case));
    gen_cmd->add_option("--n", gen.n, "Number of images")->required();
    gen_cmd->add_option("--seed", gen.seed, "Random seed")->required();
    gen_cmd->add_option("--mix", gen.mix, "Source mix, e.g. fonts:0.1,captcha:0.25,ocr:0.25,nist:0.4");
    gen_cmd->add_option("--out", gen.out, "Output .cds file")->required();
    gen_cmd->add_option("--threads", gen.threads, "Worker threads")->check(CLI::PositiveNumber);

    ShowArgs show;
    auto* show_cmd = app.add_subcommand("show", "Write a contact sheet as PGM");
    show_cmd->add_option("--data", show.data, "Input .cds file")->required()->check(CLI::ExistingFile);
    show_cmd->add_option("--rows", show.rows)->check(CLI::PositiveNumber);
    show_cmd->add_option("--cols", show.cols)->check(CLI::PositiveNumber);
    show_cmd->add_option("--out", show.out, "Output .pgm file")->required();

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train an MLP or SDA classifier");
    train_cmd->add_option("--model", train.model)->check(CLI::IsMember({"mlp", "sda"}, CLI::ignore_case));
    train_cmd->add_option("--train", train.train)->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--valid", train.valid)->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--config", train.config, "key=value hyper-parameters")->check(CLI::ExistingFile);
    train_cmd->add_option("--out", train.out, "Output checkpoint")->required();
    train_cmd->add_option("--seed", train.seed);

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Error rate of a checkpoint on a data set");
    eval_cmd->add_option("--model-file", eval.model_file)->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--data", eval.data)->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--classes", eval.classes)
        ->check(CLI::IsMember({"all", "digits", "upper", "lower"}, CLI::ignore_case));

    ExperimentArgs exp;
    auto* exp_cmd = app.add_subcommand("experiment", "Run the model/data-set grid");
    exp_cmd->add_option("--grid-config", exp.grid_config)->check(CLI::ExistingFile);
    exp_cmd->add_option("--out-dir", exp.out_dir)->required();

    std::string results;
    auto* report_cmd = app.add_subcommand("report", "Render result tables");
    report_cmd->add_option("--results", results)->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen_cmd) return run_gen(gen);
        if (*show_cmd) return run_show(show);
        if (*train_cmd) return run_train(train);
        if (*eval_cmd) return run_eval(eval);
        if (*exp_cmd) return run_experiment(exp);
        if (*report_cmd) return run_report(results);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
