#pragma once

#include <cstddef>
#include <vector>

#include "pedcross/features.hpp"
#include "pedcross/mlp.hpp"  // Task

namespace pedcross {

// Weights plus intercept for logistic (classify) or ordinary linear (regress)
// regression.  Trained by full-batch gradient descent on the mean loss with an
// L2 penalty applied to the weights only, never the intercept.
struct LinearParams {
    std::vector<double> weights;
    double bias = 0.0;

    bool operator==(const LinearParams&) const = default;
};

struct LinearConfig {
    double learning_rate = 0.1;
    int max_iterations = 2000;
    double l2 = 1e-4;
    double tolerance = 1e-8;  // stop when |loss delta| < tolerance
};

struct LinearFit {
    LinearParams params;
    int iterations_run = 0;
    double final_loss = 0.0;
};

// Mean loss over rows: BCE for classify, 0.5 * squared error for regress,
// plus 0.5 * l2 * ||w||^2.
double linear_loss(const LinearParams& params, const Matrix& X, const std::vector<double>& y,
                   Task task, double l2);

// Raw score per row: sigmoid(w.x + b) for classify, w.x + b for regress.
std::vector<double> linear_predict(const LinearParams& params, const Matrix& X, Task task);

LinearFit linear_train(const Matrix& X, const std::vector<double>& y, Task task,
                       const LinearConfig& config);

}  // namespace pedcross
