#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "glyphwarp/dataset.hpp"
#include "glyphwarp/rng.hpp"

namespace glyphwarp::nnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thrown when a loss turns non-finite during training.
class TrainingDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Activation : std::uint8_t { tanh, sigmoid };

struct Dense {
    Matrix weight;  // out x in
    Vector bias;    // out

    Eigen::Index fan_in() const { return weight.cols(); }
    Eigen::Index fan_out() const { return weight.rows(); }
};

/// Uniform in +/- sqrt(6 / (fan_in + fan_out)), zero bias.
Dense init_dense(Eigen::Index fan_in, Eigen::Index fan_out, RngStream& rng);

/// Feed-forward classifier: hidden layers sharing one activation, softmax on top.
/// A single tanh hidden layer is the MLP; sigmoid layers come from an SDA.
struct Network {
    Activation activation = Activation::tanh;
    std::vector<Dense> hidden;
    Dense output;

    Eigen::Index input_dim() const;
    Eigen::Index class_count() const { return output.weight.rows(); }

    /// Column-wise class probabilities for a batch stored one example per column.
    Matrix forward(const Matrix& inputs) const;
};

struct NetworkGradients {
    std::vector<Dense> hidden;
    Dense output;
};

Network make_mlp(Eigen::Index input_dim, Eigen::Index hidden_units, Eigen::Index classes,
                 RngStream& rng);

/// softmax(W2 tanh(W1 x + b1) + b2) for one example. Throws
/// std::invalid_argument on a dimension mismatch.
Vector mlp_forward(const Network& net, std::span<const double> x);

/// Mean negative log-likelihood over the batch; fills `grad` when non-null.
double nll_loss(const Network& net, const Matrix& inputs, std::span<const int> labels,
                NetworkGradients* grad);

// ------------------------------------------------------ denoising autoencoder

struct DaLayer {
    Matrix weight;                  // code x input, shared by the tied decoder
    Vector code_bias;               // code
    Vector recon_bias;              // input
    std::optional<Matrix> decoder;  // input x code, only when untied
    double corruption = 0.0;        // fraction of inputs zeroed

    Eigen::Index input_dim() const { return weight.cols(); }
    Eigen::Index code_dim() const { return weight.rows(); }
    bool tied() const { return !decoder.has_value(); }

    /// Deterministic code sigmoid(W x + b), one example per column.
    Matrix encode(const Matrix& inputs) const;
    /// Reconstruction sigmoid(W' y + b').
    Matrix decode(const Matrix& codes) const;
};

DaLayer make_da_layer(Eigen::Index input_dim, Eigen::Index code_dim, double corruption, bool tied,
                      RngStream& rng);

struct DaGradients {
    Matrix weight;
    Vector code_bias;
    Vector recon_bias;
    std::optional<Matrix> decoder;
};

struct DaLossResult {
    double loss = 0.0;  // summed cross-entropy L_H(x, z)
    DaGradients grad;
    std::vector<int> masked;  // coordinates zeroed by the corruption
};

/// Exactly round(fraction * dim) distinct coordinates, drawn without replacement.
std::vector<int> corruption_mask(Eigen::Index dim, double fraction, RngStream& rng);

/// Cross-entropy reconstruction loss with the given masked coordinates.
DaLossResult da_loss_masked(const DaLayer& layer, const Vector& x, std::span<const int> masked);
/// Draws the corruption mask from `rng`, then as da_loss_masked.
DaLossResult da_loss(const DaLayer& layer, const Vector& x, RngStream& rng);
/// Mean clean (uncorrupted) reconstruction loss over a batch of columns.
double reconstruction_loss(const DaLayer& layer, const Matrix& inputs);

// --------------------------------------------------------------------- SDA

inline constexpr int kSdaDepth = 3;

enum class SdaPhase : std::uint8_t { pretraining, finetuning };

struct SdaModel {
    std::vector<DaLayer> layers;  // kSdaDepth layers of equal width
    Dense top;                    // softmax classifier on the last code
    SdaPhase phase = SdaPhase::pretraining;

    /// Deep sigmoid classifier initialized from the stack.
    Network to_network() const;
};

SdaModel make_sda(Eigen::Index input_dim, Eigen::Index width, Eigen::Index classes,
                  double corruption, bool tied, RngStream& rng);

// ----------------------------------------------------------------- training

struct TrainConfig {
    double learning_rate = 0.1;
    double pretrain_learning_rate = 0.01;
    int minibatch = 20;
    int epochs = 50;
    int pretrain_epochs = 20;
    std::uint64_t seed = 1;
};

/// Learning rates the experiment grid may choose from.
inline constexpr std::array<double, 6> kLearningRates = {0.001, 0.01, 0.025, 0.075, 0.1, 0.5};
inline constexpr std::array<int, 5> kHiddenUnits = {300, 500, 800, 1000, 1500};
inline constexpr std::array<double, 3> kCorruptionFractions = {0.10, 0.20, 0.50};

/// Greedy layer-wise DA training on unlabeled images (one per column).
/// Layer k sees the clean codes of layer k-1. Returns per-layer initial and
/// final mean reconstruction losses.
struct PretrainReport {
    std::vector<double> initial_loss;
    std::vector<double> final_loss;
};
PretrainReport pretrain(SdaModel& sda, const Matrix& images, const TrainConfig& cfg);

struct FinetuneReport {
    std::vector<double> train_loss;   // per epoch
    std::vector<double> valid_error;  // per epoch
    int best_epoch = -1;              // -1 when no epoch ran
    double best_valid_error = 1.0;
};

/// Minibatch SGD on the softmax NLL with a constant learning rate. `net` ends
/// up holding the epoch snapshot with the lowest validation error.
FinetuneReport finetune(Network& net, const Matrix& inputs, std::span<const int> labels,
                        const Matrix& valid_inputs, std::span<const int> valid_labels,
                        const TrainConfig& cfg);

/// Builds the deep network from the stack, fine-tunes it and returns it.
Network finetune(SdaModel& sda, const Matrix& inputs, std::span<const int> labels,
                 const Matrix& valid_inputs, std::span<const int> valid_labels,
                 const TrainConfig& cfg, FinetuneReport* report = nullptr);

/// Predicted class per column; the argmax can be restricted to a contiguous
/// range of outputs. Ties go to the lowest index.
std::vector<int> predict(const Network& net, const Matrix& inputs,
                         std::optional<ClassRange> subset = std::nullopt);

/// Misclassification rate. Throws std::invalid_argument on an empty set.
double evaluate(const Network& net, const Matrix& inputs, std::span<const int> labels,
                std::optional<ClassRange> subset = std::nullopt);

// -------------------------------------------------------------- data glue

/// One image per column, intensities in [0,1].
Matrix to_matrix(const LabeledDataset& ds);
std::vector<int> to_labels(const LabeledDataset& ds);

// -------------------------------------------------------------- checkpoints
//
// CNM1 layout, little-endian:
//   "CNM1" | u16 version=1 | u16 kind (0 mlp, 1 sda)
//   u32 activation (0 tanh, 1 sigmoid) | u32 input_dim | u32 hidden_count
//   u32 width[hidden_count] | u32 class_count | u32 flags (bit 0: recon biases)
//   per hidden layer: f32 weight[width x fan_in] row-major, f32 bias[width]
//   if flags bit 0, per hidden layer: f32 recon_bias[fan_in]
//   f32 output weight[classes x width] row-major, f32 output bias[classes]

enum class ModelKind : std::uint16_t { mlp = 0, sda = 1 };

struct Checkpoint {
    ModelKind kind = ModelKind::mlp;
    Network network;
    std::vector<Vector> recon_biases;  // empty for MLPs
};

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace glyphwarp::nnet
