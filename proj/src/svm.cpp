#include "pedcross/svm.hpp"

#include <algorithm>
#include <cmath>

#include "pedcross/errors.hpp"

namespace pedcross {

double svm_objective(const LinearParams& params, const Matrix& X,
                     const std::vector<double>& y01, double lambda) {
    double hinge = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double* row = X.row(i);
        double z = params.bias;
        for (std::size_t j = 0; j < X.cols(); ++j) z += params.weights[j] * row[j];
        const double ypm = y01[i] > 0.5 ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - ypm * z);
    }
    hinge /= static_cast<double>(X.rows());
    double wsq = 0.0;
    for (double w : params.weights) wsq += w * w;
    return 0.5 * lambda * wsq + hinge;
}

std::vector<double> svm_predict(const LinearParams& params, const Matrix& X) {
    if (params.weights.size() != X.cols()) {
        throw ShapeError("svm_predict: weight/column count mismatch");
    }
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double* row = X.row(i);
        double z = params.bias;
        for (std::size_t j = 0; j < X.cols(); ++j) z += params.weights[j] * row[j];
        out[i] = 1.0 / (1.0 + std::exp(-z));
    }
    return out;
}

SvmFit svm_train(const Matrix& X, const std::vector<double>& y01, const SvmConfig& config) {
    if (X.rows() == 0) throw TrainingError("svm_train: empty data");
    if (X.rows() != y01.size()) throw ShapeError("svm_train: row/target count mismatch");
    if (config.C <= 0.0) throw ConfigError("C must be positive");
    if (config.epochs < 0) throw ConfigError("epochs must be >= 0");

    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double lambda = 1.0 / (config.C * static_cast<double>(n));

    SvmFit fit;
    fit.params.weights.assign(d, 0.0);

    std::vector<double> grad_w(d);
    for (int t = 1; t <= config.epochs; ++t) {
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = X.row(i);
            double z = fit.params.bias;
            for (std::size_t j = 0; j < d; ++j) z += fit.params.weights[j] * row[j];
            const double ypm = y01[i] > 0.5 ? 1.0 : -1.0;
            if (ypm * z < 1.0) {
                grad_b -= ypm * inv_n;
                for (std::size_t j = 0; j < d; ++j) grad_w[j] -= ypm * row[j] * inv_n;
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            fit.params.weights[j] -= eta * (lambda * fit.params.weights[j] + grad_w[j]);
        }
        fit.params.bias -= eta * grad_b;
        fit.epochs_run = t;
    }
    fit.final_objective = svm_objective(fit.params, X, y01, lambda);
    if (!std::isfinite(fit.final_objective)) throw TrainingError("svm_train: diverged");
    return fit;
}

}  // namespace pedcross
