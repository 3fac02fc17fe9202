#pragma once

#include <cstdint>
#include <vector>

#include "pedcross/features.hpp"

namespace pedcross {

enum class Task { classify, regress };

// Fully connected feedforward network with ReLU hidden layers and a single
// output unit: sigmoid + binary cross-entropy when classifying, linear +
// squared error when regressing. Losses are means over samples, so the
// output-layer residual gradient is mean(prediction - target) in both modes.

struct MlpLayer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> w;  // row-major, out x in
    std::vector<double> b;  // out

    bool operator==(const MlpLayer&) const = default;
};

struct MlpParams {
    std::vector<MlpLayer> layers;

    bool operator==(const MlpParams&) const = default;
};

// Glorot-uniform weights, zero biases, drawn deterministically from seed.
MlpParams mlp_init(std::size_t inputs, const std::vector<int>& hidden, std::uint64_t seed);

std::vector<double> mlp_forward(const MlpParams& net, const Matrix& X, Task task);

double mlp_loss(const MlpParams& net, const Matrix& X, const std::vector<double>& y, Task task);

// Exact backpropagation gradient of mlp_loss w.r.t. every weight and bias;
// result mirrors the parameter structure.
MlpParams mlp_gradient(const MlpParams& net, const Matrix& X, const std::vector<double>& y,
                       Task task);

// Parameter vector helpers (gradient checking, serialization).
std::vector<double> mlp_flatten(const MlpParams& net);
void mlp_unflatten(MlpParams& net, const std::vector<double>& theta);

struct MlpTrainConfig {
    std::vector<int> hidden = {16, 4};
    double learning_rate = 0.01;
    int epochs = 500;
    double beta1 = 0.9;
    double beta2 = 0.999;
    std::uint64_t seed = 0;
};

struct MlpTrainResult {
    MlpParams net;
    int epochs_run = 0;
    double final_loss = 0.0;
};

// Full-batch adaptive-moment updates.
MlpTrainResult mlp_train(const Matrix& X, const std::vector<double>& y, Task task,
                         const MlpTrainConfig& config);

}  // namespace pedcross
