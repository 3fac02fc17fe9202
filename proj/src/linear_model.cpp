#include "pedcross/linear_model.hpp"

#include <algorithm>
#include <cmath>

#include "pedcross/errors.hpp"

namespace pedcross {

namespace {
double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}  // namespace

double linear_loss(const LinearParams& params, const Matrix& X, const std::vector<double>& y,
                   Task task, double l2) {
    const double n = static_cast<double>(X.rows());
    double loss = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double* row = X.row(i);
        double z = params.bias;
        for (std::size_t j = 0; j < X.cols(); ++j) z += params.weights[j] * row[j];
        if (task == Task::classify) {
            const double p = std::clamp(sigmoid(z), 1e-12, 1.0 - 1e-12);
            loss += -(y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p));
        } else {
            const double e = z - y[i];
            loss += 0.5 * e * e;
        }
    }
    loss /= n;
    double wsq = 0.0;
    for (double w : params.weights) wsq += w * w;
    return loss + 0.5 * l2 * wsq;
}

std::vector<double> linear_predict(const LinearParams& params, const Matrix& X, Task task) {
    if (params.weights.size() != X.cols()) {
        throw ShapeError("linear_predict: weight/column count mismatch");
    }
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double* row = X.row(i);
        double z = params.bias;
        for (std::size_t j = 0; j < X.cols(); ++j) z += params.weights[j] * row[j];
        out[i] = task == Task::classify ? sigmoid(z) : z;
    }
    return out;
}

LinearFit linear_train(const Matrix& X, const std::vector<double>& y, Task task,
                       const LinearConfig& config) {
    if (X.rows() == 0) throw TrainingError("linear_train: empty data");
    if (X.rows() != y.size()) throw ShapeError("linear_train: row/target count mismatch");
    if (config.max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
    if (config.learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");

    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    const double inv_n = 1.0 / static_cast<double>(n);

    LinearFit fit;
    fit.params.weights.assign(d, 0.0);
    fit.final_loss = linear_loss(fit.params, X, y, task, config.l2);

    std::vector<double> grad_w(d);
    for (int it = 0; it < config.max_iterations; ++it) {
        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = X.row(i);
            double z = fit.params.bias;
            for (std::size_t j = 0; j < d; ++j) z += fit.params.weights[j] * row[j];
            const double pred = task == Task::classify ? sigmoid(z) : z;
            const double delta = (pred - y[i]) * inv_n;
            grad_b += delta;
            for (std::size_t j = 0; j < d; ++j) grad_w[j] += delta * row[j];
        }
        for (std::size_t j = 0; j < d; ++j) {
            fit.params.weights[j] -=
                config.learning_rate * (grad_w[j] + config.l2 * fit.params.weights[j]);
        }
        fit.params.bias -= config.learning_rate * grad_b;
        fit.iterations_run = it + 1;

        const double loss = linear_loss(fit.params, X, y, task, config.l2);
        if (!std::isfinite(loss)) throw TrainingError("linear_train: loss diverged");
        const double delta = std::abs(fit.final_loss - loss);
        fit.final_loss = loss;
        if (delta < config.tolerance) break;
    }
    return fit;
}

}  // namespace pedcross
