#pragma once

// Central finite-difference checks for the MLP and DA gradients.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "glyphwarp/nnet.hpp"
#include "glyphwarp/rng.hpp"

namespace testutil {

using glyphwarp::nnet::Matrix;
using glyphwarp::nnet::Vector;

struct GradCheck {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
};

/// Relative error |a - n| / max(|a|, |n|), with the denominator floored at
/// 1e-6 so that gradients that are zero up to rounding do not blow up.
inline double rel_error(double analytic, double numeric) {
    const double den = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    return std::abs(analytic - numeric) / den;
}

inline void check_entries(double* data, const double* analytic, std::size_t n,
                          const std::function<double()>& loss, double eps, GradCheck& out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double saved = data[i];
        data[i] = saved + eps;
        const double up = loss();
        data[i] = saved - eps;
        const double down = loss();
        data[i] = saved;
        out.max_rel_error = std::max(out.max_rel_error, rel_error(analytic[i], (up - down) / (2 * eps)));
        ++out.checked;
    }
}

/// Softmax NLL gradients of any network on a random batch. Biases are
/// randomized first so their gradients are not trivially symmetric.
inline GradCheck network_gradient_check(glyphwarp::nnet::Network net, std::uint64_t seed, double eps = 1e-4) {
    glyphwarp::RngStream rng(seed);
    for (auto& layer : net.hidden)
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = rng.uniform(-0.5, 0.5);
    for (Eigen::Index i = 0; i < net.output.bias.size(); ++i) net.output.bias(i) = rng.uniform(-0.5, 0.5);
    const int batch = 5;
    const auto classes = net.class_count();
    Matrix x(net.input_dim(), batch);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform01();
    std::vector<int> labels;
    for (int b = 0; b < batch; ++b) labels.push_back(static_cast<int>(rng.uniform_int(0, classes - 1)));

    glyphwarp::nnet::NetworkGradients g;
    glyphwarp::nnet::nll_loss(net, x, labels, &g);
    const auto loss = [&] { return glyphwarp::nnet::nll_loss(net, x, labels, nullptr); };

    GradCheck out;
    for (std::size_t l = 0; l < net.hidden.size(); ++l) {
        check_entries(net.hidden[l].weight.data(), g.hidden[l].weight.data(),
                      static_cast<std::size_t>(net.hidden[l].weight.size()), loss, eps, out);
        check_entries(net.hidden[l].bias.data(), g.hidden[l].bias.data(),
                      static_cast<std::size_t>(net.hidden[l].bias.size()), loss, eps, out);
    }
    check_entries(net.output.weight.data(), g.output.weight.data(),
                  static_cast<std::size_t>(net.output.weight.size()), loss, eps, out);
    check_entries(net.output.bias.data(), g.output.bias.data(), static_cast<std::size_t>(net.output.bias.size()),
                  loss, eps, out);
    return out;
}

/// MLP with tanh hidden layer and softmax output.
inline GradCheck mlp_gradient_check(int inputs, int hidden, int classes, std::uint64_t seed,
                                    double eps = 1e-4) {
    glyphwarp::RngStream rng(seed);
    return network_gradient_check(glyphwarp::nnet::make_mlp(inputs, hidden, classes, rng), seed + 1, eps);
}

/// Denoising autoencoder layer with a fixed corruption mask.
inline GradCheck da_gradient_check(int inputs, int code, bool tied, std::uint64_t seed, double eps = 1e-4) {
    glyphwarp::RngStream rng(seed);
    auto layer = glyphwarp::nnet::make_da_layer(inputs, code, 0.25, tied, rng);
    for (Eigen::Index i = 0; i < layer.code_bias.size(); ++i) layer.code_bias(i) = rng.uniform(-0.5, 0.5);
    for (Eigen::Index i = 0; i < layer.recon_bias.size(); ++i) layer.recon_bias(i) = rng.uniform(-0.5, 0.5);
    Vector x(inputs);
    for (Eigen::Index i = 0; i < inputs; ++i) x(i) = rng.uniform01();
    const auto mask = glyphwarp::nnet::corruption_mask(inputs, layer.corruption, rng);

    const auto res = glyphwarp::nnet::da_loss_masked(layer, x, mask);
    const auto loss = [&] { return glyphwarp::nnet::da_loss_masked(layer, x, mask).loss; };

    GradCheck out;
    check_entries(layer.weight.data(), res.grad.weight.data(), static_cast<std::size_t>(layer.weight.size()), loss,
                  eps, out);
    check_entries(layer.code_bias.data(), res.grad.code_bias.data(),
                  static_cast<std::size_t>(layer.code_bias.size()), loss, eps, out);
    check_entries(layer.recon_bias.data(), res.grad.recon_bias.data(),
                  static_cast<std::size_t>(layer.recon_bias.size()), loss, eps, out);
    if (layer.decoder)
        check_entries(layer.decoder->data(), res.grad.decoder->data(),
                      static_cast<std::size_t>(layer.decoder->size()), loss, eps, out);
    return out;
}

}  // namespace testutil
