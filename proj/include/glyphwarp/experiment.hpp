#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "glyphwarp/config.hpp"
#include "glyphwarp/dataset.hpp"
#include "glyphwarp/nnet.hpp"
#include "glyphwarp/pipeline.hpp"

namespace glyphwarp {

enum class ModelFamily : std::uint8_t { mlp, sda };
const char* to_string(ModelFamily f);
ModelFamily parse_model_family(const std::string& name);

/// Data sets of the grid. Index i trains model family X as "Xi".
enum class DataSetId : std::uint8_t { nist = 0, nistp = 1, p07 = 2 };
const char* to_string(DataSetId d);
DataSetId parse_data_set(const std::string& name);

struct HyperParams {
    std::vector<double> learning_rates = {0.1};
    std::vector<double> pretrain_learning_rates = {0.01};
    int hidden_units = 64;
    int sda_width = 64;
    double corruption = 0.2;
    bool tied = true;
    int minibatch = 20;
    int epochs = 50;
    int pretrain_epochs = 20;
};

struct ExperimentGrid {
    std::vector<ModelFamily> models = {ModelFamily::mlp, ModelFamily::sda};
    std::vector<DataSetId> train_sets = {DataSetId::nist, DataSetId::nistp, DataSetId::p07};
    std::vector<DataSetId> eval_sets = {DataSetId::nist, DataSetId::nistp, DataSetId::p07};
    std::vector<ClassSet> tasks = {ClassSet::all, ClassSet::digits, ClassSet::upper, ClassSet::lower};
    /// Also train single-task models on the clean set for the multi-task table.
    bool single_task = true;
    std::size_t n_train = 5000;
    std::size_t n_valid = 1000;
    std::size_t n_test = 1000;
    HyperParams hyper;
    /// Source mix of the perturbed sets; the clean set always uses the nist stand-in.
    std::string mix = "standard";
    unsigned threads = 1;
    std::uint64_t seed = 1;

    static ExperimentGrid from_config(const KeyValueConfig& cfg);
};

/// Model name, e.g. "SDA1" for an SDA trained on NISTP.
std::string model_name(ModelFamily f, DataSetId trained_on);

struct ResultRow {
    std::string model;      // MLP0..SDA2, or MLP / SDA for the multi-task table
    std::string train_set;  // nist | nistp | p07
    std::string eval_set;
    std::string task;       // all | digits | upper | lower
    std::string setting;    // multi (62 outputs) | single (task outputs only)
    double error = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
    std::string status = "ok";  // ok | failed
};

struct ResultTable {
    std::vector<ResultRow> rows;

    const ResultRow* find(const std::string& model, const std::string& eval_set,
                          const std::string& task, const std::string& setting = "multi") const;
};

inline constexpr const char* kResultHeader = "model\ttrain_set\teval_set\ttask\tsetting\terror\tstderr\tn\tstatus";

void write_results(const ResultTable& table, std::ostream& out);
ResultTable read_results(std::istream& in);
void save_results(const ResultTable& table, const std::filesystem::path& path);
ResultTable load_results(const std::filesystem::path& path);

/// Plain-text report: overall error table, out-of-distribution relative
/// changes and the multi-task comparison.
std::string render_report(const ResultTable& table);

struct SplitData {
    LabeledDataset train;
    LabeledDataset valid;
    LabeledDataset test;
};

/// Train/valid/test data for one grid data set, fully determined by (grid seed, id).
SplitData make_grid_data(const ExperimentGrid& grid, DataSetId id);

/// Trains one classifier, picking learning rates by the error on `select_on`.
struct TrainedModel {
    nnet::Network network;
    nnet::ModelKind kind = nnet::ModelKind::mlp;
    std::vector<nnet::Vector> recon_biases;  // SDA only
    double learning_rate = 0.0;
    double pretrain_learning_rate = 0.0;
    double selection_error = 1.0;
};
TrainedModel train_model(ModelFamily family, const LabeledDataset& train, const LabeledDataset& valid,
                         const LabeledDataset& select_on, int classes, const HyperParams& hyper,
                         std::uint64_t seed);

using ProgressFn = std::function<void(const std::string&)>;

/// Runs every (model family, training set) cell and the optional single-task
/// models, evaluating each on all requested test sets and tasks. A cell whose
/// training diverges is recorded with status "failed" and the grid goes on.
ResultTable run_grid(const ExperimentGrid& grid, const ProgressFn& progress = {});

}  // namespace glyphwarp
