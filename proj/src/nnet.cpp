#include "glyphwarp/nnet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

namespace glyphwarp::nnet {

namespace {

Matrix sigmoid(const Matrix& a) {
    return a.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

Matrix activate(const Matrix& a, Activation act) {
    if (act == Activation::tanh) return a.array().tanh().matrix();
    return sigmoid(a);
}

/// d activation / d pre-activation, expressed through the activation value.
Matrix activation_slope(const Matrix& h, Activation act) {
    if (act == Activation::tanh) return (1.0 - h.array().square()).matrix();
    return (h.array() * (1.0 - h.array())).matrix();
}

Matrix affine(const Dense& layer, const Matrix& inputs) {
    return (layer.weight * inputs).colwise() + layer.bias;
}

/// Column-wise log-softmax.
Matrix log_softmax(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
        const double peak = logits.col(c).maxCoeff();
        const double lse = peak + std::log((logits.col(c).array() - peak).exp().sum());
        out.col(c) = logits.col(c).array() - lse;
    }
    return out;
}

void check_labels(std::span<const int> labels, Eigen::Index cols, Eigen::Index classes) {
    if (static_cast<Eigen::Index>(labels.size()) != cols)
        throw std::invalid_argument("label count does not match the number of inputs");
    for (int y : labels)
        if (y < 0 || y >= classes) throw std::invalid_argument("label outside the output range");
}

std::vector<std::size_t> shuffled_indices(std::size_t n, RngStream& rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

Matrix gather_columns(const Matrix& m, std::span<const std::size_t> cols) {
    Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i)
        out.col(static_cast<Eigen::Index>(i)) = m.col(static_cast<Eigen::Index>(cols[i]));
    return out;
}

/// Summed reconstruction loss of a batch whose corrupted copy is `corrupted`.
double da_batch(const DaLayer& layer, const Matrix& clean, const Matrix& corrupted, DaGradients* grad) {
    const Matrix codes = sigmoid(affine(Dense{layer.weight, layer.code_bias}, corrupted));
    const Matrix dec = layer.decoder ? *layer.decoder : Matrix(layer.weight.transpose());
    const Matrix recon_pre = (dec * codes).colwise() + layer.recon_bias;

    double loss = 0.0;
    for (Eigen::Index c = 0; c < clean.cols(); ++c)
        for (Eigen::Index r = 0; r < clean.rows(); ++r) {
            const double x = clean(r, c);
            const double a = recon_pre(r, c);
            loss += x * softplus(-a) + (1.0 - x) * softplus(a);
        }
    if (!grad) return loss;

    const Matrix d_recon = sigmoid(recon_pre) - clean;
    const Matrix d_codes = (dec.transpose() * d_recon).cwiseProduct(activation_slope(codes, Activation::sigmoid));
    grad->recon_bias = d_recon.rowwise().sum();
    grad->code_bias = d_codes.rowwise().sum();
    grad->weight = d_codes * corrupted.transpose();
    if (layer.decoder) {
        grad->decoder = d_recon * codes.transpose();
    } else {
        grad->weight += codes * d_recon.transpose();
        grad->decoder.reset();
    }
    return loss;
}

void apply_mask(Eigen::Ref<Vector> column, std::span<const int> masked) {
    for (int i : masked) column(i) = 0.0;
}

// ------------------------------------------------------------ binary I/O

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, double v) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

void put_matrix(std::vector<std::uint8_t>& out, const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) put_f32(out, m(r, c));
}

void put_vector(std::vector<std::uint8_t>& out, const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) put_f32(out, v(i));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 4;
        return v;
    }
    std::uint16_t u16() {
        need(2);
        const auto v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    double f32() { return static_cast<double>(std::bit_cast<float>(u32())); }
    Matrix matrix(Eigen::Index rows, Eigen::Index cols) {
        need(static_cast<std::size_t>(rows * cols) * 4);
        Matrix m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = f32();
        return m;
    }
    Vector vector(Eigen::Index n) {
        need(static_cast<std::size_t>(n) * 4);
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = f32();
        return v;
    }
    bool at_end() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw CheckpointError("checkpoint is truncated");
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

// ------------------------------------------------------------------ network

Dense init_dense(Eigen::Index fan_in, Eigen::Index fan_out, RngStream& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Dense d;
    d.weight.resize(fan_out, fan_in);
    for (Eigen::Index r = 0; r < fan_out; ++r)
        for (Eigen::Index c = 0; c < fan_in; ++c) d.weight(r, c) = rng.uniform(-bound, bound);
    d.bias = Vector::Zero(fan_out);
    return d;
}

Eigen::Index Network::input_dim() const {
    return hidden.empty() ? output.weight.cols() : hidden.front().weight.cols();
}

Matrix Network::forward(const Matrix& inputs) const {
    if (inputs.rows() != input_dim())
        throw std::invalid_argument("input has " + std::to_string(inputs.rows()) +
                                    " rows, network expects " + std::to_string(input_dim()));
    Matrix h = inputs;
    for (const auto& layer : hidden) h = activate(affine(layer, h), activation);
    return log_softmax(affine(output, h)).array().exp().matrix();
}

Network make_mlp(Eigen::Index input_dim, Eigen::Index hidden_units, Eigen::Index classes,
                 RngStream& rng) {
    Network net;
    net.activation = Activation::tanh;
    net.hidden.push_back(init_dense(input_dim, hidden_units, rng));
    net.output = init_dense(hidden_units, classes, rng);
    return net;
}

Vector mlp_forward(const Network& net, std::span<const double> x) {
    if (static_cast<Eigen::Index>(x.size()) != net.input_dim())
        throw std::invalid_argument("input length " + std::to_string(x.size()) + " does not match " +
                                    std::to_string(net.input_dim()));
    const Eigen::Map<const Vector> column(x.data(), static_cast<Eigen::Index>(x.size()));
    return net.forward(Matrix(column)).col(0);
}

double nll_loss(const Network& net, const Matrix& inputs, std::span<const int> labels,
                NetworkGradients* grad) {
    check_labels(labels, inputs.cols(), net.class_count());
    if (inputs.rows() != net.input_dim()) throw std::invalid_argument("input dimension mismatch");
    const auto batch = static_cast<double>(inputs.cols());

    std::vector<Matrix> acts;
    acts.reserve(net.hidden.size() + 1);
    acts.push_back(inputs);
    for (const auto& layer : net.hidden) acts.push_back(activate(affine(layer, acts.back()), net.activation));
    const Matrix logp = log_softmax(affine(net.output, acts.back()));

    double loss = 0.0;
    for (Eigen::Index c = 0; c < inputs.cols(); ++c) loss -= logp(labels[static_cast<std::size_t>(c)], c);
    loss /= batch;
    if (!grad) return loss;

    Matrix delta = logp.array().exp().matrix();
    for (Eigen::Index c = 0; c < inputs.cols(); ++c) delta(labels[static_cast<std::size_t>(c)], c) -= 1.0;
    delta /= batch;

    grad->output.weight = delta * acts.back().transpose();
    grad->output.bias = delta.rowwise().sum();
    grad->hidden.resize(net.hidden.size());
    Matrix upstream = net.output.weight.transpose() * delta;
    for (std::size_t l = net.hidden.size(); l-- > 0;) {
        const Matrix d_pre = upstream.cwiseProduct(activation_slope(acts[l + 1], net.activation));
        grad->hidden[l].weight = d_pre * acts[l].transpose();
        grad->hidden[l].bias = d_pre.rowwise().sum();
        if (l > 0) upstream = net.hidden[l].weight.transpose() * d_pre;
    }
    return loss;
}

// ----------------------------------------------------- denoising autoencoder

Matrix DaLayer::encode(const Matrix& inputs) const {
    return sigmoid(affine(Dense{weight, code_bias}, inputs));
}

Matrix DaLayer::decode(const Matrix& codes) const {
    const Matrix pre = decoder ? Matrix((*decoder * codes).colwise() + recon_bias)
                               : Matrix((weight.transpose() * codes).colwise() + recon_bias);
    return sigmoid(pre);
}

DaLayer make_da_layer(Eigen::Index input_dim, Eigen::Index code_dim, double corruption, bool tied,
                      RngStream& rng) {
    if (!(corruption >= 0.0 && corruption <= 1.0))
        throw std::invalid_argument("corruption fraction must lie in [0,1]");
    DaLayer layer;
    Dense enc = init_dense(input_dim, code_dim, rng);
    layer.weight = std::move(enc.weight);
    layer.code_bias = std::move(enc.bias);
    layer.recon_bias = Vector::Zero(input_dim);
    layer.corruption = corruption;
    if (!tied) layer.decoder = init_dense(code_dim, input_dim, rng).weight;
    return layer;
}

std::vector<int> corruption_mask(Eigen::Index dim, double fraction, RngStream& rng) {
    const auto count = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(dim)));
    std::vector<int> order(static_cast<std::size_t>(dim));
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(dim) - 1));
        std::swap(order[i], order[j]);
    }
    order.resize(count);
    return order;
}

DaLossResult da_loss_masked(const DaLayer& layer, const Vector& x, std::span<const int> masked) {
    if (x.size() != layer.input_dim()) throw std::invalid_argument("DA input dimension mismatch");
    for (int i : masked)
        if (i < 0 || i >= x.size()) throw std::invalid_argument("mask index out of range");
    Vector corrupted = x;
    apply_mask(corrupted, masked);
    DaLossResult result;
    result.masked.assign(masked.begin(), masked.end());
    result.loss = da_batch(layer, x, corrupted, &result.grad);
    if (!std::isfinite(result.loss)) throw TrainingDiverged("denoising autoencoder loss is not finite");
    return result;
}

DaLossResult da_loss(const DaLayer& layer, const Vector& x, RngStream& rng) {
    const auto mask = corruption_mask(layer.input_dim(), layer.corruption, rng);
    return da_loss_masked(layer, x, mask);
}

double reconstruction_loss(const DaLayer& layer, const Matrix& inputs) {
    if (inputs.cols() == 0) return 0.0;
    return da_batch(layer, inputs, inputs, nullptr) / static_cast<double>(inputs.cols());
}

Network SdaModel::to_network() const {
    Network net;
    net.activation = Activation::sigmoid;
    for (const auto& layer : layers) net.hidden.push_back(Dense{layer.weight, layer.code_bias});
    net.output = top;
    return net;
}

SdaModel make_sda(Eigen::Index input_dim, Eigen::Index width, Eigen::Index classes,
                  double corruption, bool tied, RngStream& rng) {
    SdaModel sda;
    Eigen::Index fan_in = input_dim;
    for (int l = 0; l < kSdaDepth; ++l) {
        sda.layers.push_back(make_da_layer(fan_in, width, corruption, tied, rng));
        fan_in = width;
    }
    sda.top = init_dense(width, classes, rng);
    return sda;
}

// ----------------------------------------------------------------- training

PretrainReport pretrain(SdaModel& sda, const Matrix& images, const TrainConfig& cfg) {
    if (cfg.minibatch < 1) throw std::invalid_argument("minibatch must be >= 1");
    RngStream rng = RngStream(cfg.seed).substream(0xDA);
    PretrainReport report;
    Matrix inputs = images;
    const auto n = static_cast<std::size_t>(inputs.cols());
    for (std::size_t l = 0; l < sda.layers.size(); ++l) {
        DaLayer& layer = sda.layers[l];
        if (inputs.rows() != layer.input_dim()) throw std::invalid_argument("pretraining input dimension mismatch");
        report.initial_loss.push_back(reconstruction_loss(layer, inputs));
        RngStream layer_rng = rng.substream(l);
        DaGradients grad;
        for (int epoch = 0; epoch < cfg.pretrain_epochs; ++epoch) {
            const auto order = shuffled_indices(n, layer_rng);
            for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.minibatch)) {
                const std::size_t stop = std::min(n, start + static_cast<std::size_t>(cfg.minibatch));
                const std::span<const std::size_t> cols(order.data() + start, stop - start);
                const Matrix clean = gather_columns(inputs, cols);
                Matrix corrupted = clean;
                for (Eigen::Index c = 0; c < corrupted.cols(); ++c)
                    apply_mask(corrupted.col(c), corruption_mask(layer.input_dim(), layer.corruption, layer_rng));
                const double loss = da_batch(layer, clean, corrupted, &grad);
                if (!std::isfinite(loss)) throw TrainingDiverged("pretraining loss is not finite");
                const double step = cfg.pretrain_learning_rate / static_cast<double>(cols.size());
                layer.weight -= step * grad.weight;
                layer.code_bias -= step * grad.code_bias;
                layer.recon_bias -= step * grad.recon_bias;
                if (layer.decoder) *layer.decoder -= step * *grad.decoder;
            }
        }
        report.final_loss.push_back(reconstruction_loss(layer, inputs));
        inputs = layer.encode(inputs);
    }
    return report;
}

FinetuneReport finetune(Network& net, const Matrix& inputs, std::span<const int> labels,
                        const Matrix& valid_inputs, std::span<const int> valid_labels,
                        const TrainConfig& cfg) {
    if (cfg.minibatch < 1) throw std::invalid_argument("minibatch must be >= 1");
    check_labels(labels, inputs.cols(), net.class_count());
    check_labels(valid_labels, valid_inputs.cols(), net.class_count());
    if (inputs.cols() == 0) throw std::invalid_argument("fine-tuning needs at least one example");

    RngStream rng = RngStream(cfg.seed).substream(0xF7);
    FinetuneReport report;
    Network best = net;
    const auto n = static_cast<std::size_t>(inputs.cols());
    NetworkGradients grad;
    std::vector<int> batch_labels;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto order = shuffled_indices(n, rng);
        double total = 0.0;
        int batches = 0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.minibatch)) {
            const std::size_t stop = std::min(n, start + static_cast<std::size_t>(cfg.minibatch));
            const std::span<const std::size_t> cols(order.data() + start, stop - start);
            batch_labels.clear();
            for (auto c : cols) batch_labels.push_back(labels[c]);
            const double loss = nll_loss(net, gather_columns(inputs, cols), batch_labels, &grad);
            if (!std::isfinite(loss)) throw TrainingDiverged("fine-tuning loss is not finite");
            total += loss;
            ++batches;
            const double lr = cfg.learning_rate;
            for (std::size_t l = 0; l < net.hidden.size(); ++l) {
                net.hidden[l].weight -= lr * grad.hidden[l].weight;
                net.hidden[l].bias -= lr * grad.hidden[l].bias;
            }
            net.output.weight -= lr * grad.output.weight;
            net.output.bias -= lr * grad.output.bias;
        }
        report.train_loss.push_back(total / batches);
        const double err = valid_inputs.cols() > 0 ? evaluate(net, valid_inputs, valid_labels) : report.train_loss.back();
        report.valid_error.push_back(err);
        if (report.best_epoch < 0 || err < report.best_valid_error) {
            report.best_epoch = epoch;
            report.best_valid_error = err;
            best = net;
        }
    }
    net = std::move(best);
    return report;
}

Network finetune(SdaModel& sda, const Matrix& inputs, std::span<const int> labels,
                 const Matrix& valid_inputs, std::span<const int> valid_labels,
                 const TrainConfig& cfg, FinetuneReport* report) {
    Network net = sda.to_network();
    sda.phase = SdaPhase::finetuning;
    auto r = finetune(net, inputs, labels, valid_inputs, valid_labels, cfg);
    for (std::size_t l = 0; l < sda.layers.size(); ++l) {
        sda.layers[l].weight = net.hidden[l].weight;
        sda.layers[l].code_bias = net.hidden[l].bias;
    }
    sda.top = net.output;
    if (report) *report = std::move(r);
    return net;
}

std::vector<int> predict(const Network& net, const Matrix& inputs, std::optional<ClassRange> subset) {
    const ClassRange range = subset.value_or(ClassRange{0, static_cast<int>(net.class_count())});
    if (range.first < 0 || range.count < 1 || range.first + range.count > net.class_count())
        throw std::invalid_argument("class subset outside the network outputs");
    const Matrix probs = net.forward(inputs);
    std::vector<int> out(static_cast<std::size_t>(inputs.cols()));
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
        int best = range.first;
        for (int k = range.first + 1; k < range.first + range.count; ++k)
            if (probs(k, c) > probs(best, c)) best = k;
        out[static_cast<std::size_t>(c)] = best;
    }
    return out;
}

double evaluate(const Network& net, const Matrix& inputs, std::span<const int> labels,
                std::optional<ClassRange> subset) {
    if (inputs.cols() == 0) throw std::invalid_argument("cannot evaluate on an empty dataset");
    if (static_cast<Eigen::Index>(labels.size()) != inputs.cols())
        throw std::invalid_argument("label count does not match the number of inputs");
    const auto predicted = predict(net, inputs, subset);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) wrong += predicted[i] != labels[i];
    return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

Matrix to_matrix(const LabeledDataset& ds) {
    Matrix m(static_cast<Eigen::Index>(kPixels), static_cast<Eigen::Index>(ds.size()));
    for (std::size_t c = 0; c < ds.size(); ++c)
        for (std::size_t i = 0; i < kPixels; ++i)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = ds.items[c].image[i];
    return m;
}

std::vector<int> to_labels(const LabeledDataset& ds) {
    std::vector<int> labels;
    labels.reserve(ds.size());
    for (const auto& s : ds.items) labels.push_back(s.label);
    return labels;
}

// ---------------------------------------------------------------- checkpoint

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
    const Network& net = ckpt.network;
    if (!ckpt.recon_biases.empty() && ckpt.recon_biases.size() != net.hidden.size())
        throw CheckpointError("one reconstruction bias per hidden layer is required");
    std::vector<std::uint8_t> out = {'C', 'N', 'M', '1'};
    put_u16(out, 1);
    put_u16(out, static_cast<std::uint16_t>(ckpt.kind));
    put_u32(out, net.activation == Activation::tanh ? 0u : 1u);
    put_u32(out, static_cast<std::uint32_t>(net.input_dim()));
    put_u32(out, static_cast<std::uint32_t>(net.hidden.size()));
    for (const auto& layer : net.hidden) put_u32(out, static_cast<std::uint32_t>(layer.fan_out()));
    put_u32(out, static_cast<std::uint32_t>(net.class_count()));
    put_u32(out, ckpt.recon_biases.empty() ? 0u : 1u);
    for (const auto& layer : net.hidden) {
        put_matrix(out, layer.weight);
        put_vector(out, layer.bias);
    }
    for (const auto& b : ckpt.recon_biases) put_vector(out, b);
    put_matrix(out, net.output.weight);
    put_vector(out, net.output.bias);
    return out;
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || !std::equal(bytes.begin(), bytes.begin() + 4, "CNM1"))
        throw CheckpointError("missing CNM1 magic");
    Reader in(bytes.subspan(4));
    if (in.u16() != 1) throw CheckpointError("unsupported checkpoint version");
    Checkpoint ckpt;
    const auto kind = in.u16();
    if (kind > 1) throw CheckpointError("unknown model kind");
    ckpt.kind = static_cast<ModelKind>(kind);
    const auto act = in.u32();
    if (act > 1) throw CheckpointError("unknown activation");
    ckpt.network.activation = act == 0 ? Activation::tanh : Activation::sigmoid;
    const auto input_dim = static_cast<Eigen::Index>(in.u32());
    const auto depth = in.u32();
    if (depth > 64) throw CheckpointError("implausible hidden layer count");
    std::vector<Eigen::Index> widths;
    for (std::uint32_t i = 0; i < depth; ++i) widths.push_back(in.u32());
    const auto classes = static_cast<Eigen::Index>(in.u32());
    const auto flags = in.u32();

    Eigen::Index fan_in = input_dim;
    for (auto w : widths) {
        Dense d;
        d.weight = in.matrix(w, fan_in);
        d.bias = in.vector(w);
        ckpt.network.hidden.push_back(std::move(d));
        fan_in = w;
    }
    if (flags & 1u) {
        Eigen::Index prev = input_dim;
        for (auto w : widths) {
            ckpt.recon_biases.push_back(in.vector(prev));
            prev = w;
        }
    }
    ckpt.network.output.weight = in.matrix(classes, fan_in);
    ckpt.network.output.bias = in.vector(classes);
    if (!in.at_end()) throw CheckpointError("unexpected bytes after the output layer");
    return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    const auto bytes = encode_checkpoint(ckpt);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open " + path.string());
    const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return decode_checkpoint(bytes);
}

}  // namespace glyphwarp::nnet
