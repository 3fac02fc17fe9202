#pragma once

#include <vector>

#include "pedcross/features.hpp"
#include "pedcross/linear_model.hpp"  // LinearParams

namespace pedcross {

// Linear soft-margin SVM trained in the primal by full-batch subgradient
// descent on the hinge loss with step size 1/(lambda*t), where
// lambda = 1 / (C * n).  The intercept is left unregularized.  Classification
// only; scores are reported as sigmoid(margin) so the 0.5 threshold coincides
// with the margin sign.
struct SvmConfig {
    double C = 1.0;
    int epochs = 2000;
};

struct SvmFit {
    LinearParams params;
    int epochs_run = 0;
    double final_objective = 0.0;
};

// Primal objective: 0.5 * lambda * ||w||^2 + mean hinge loss.
double svm_objective(const LinearParams& params, const Matrix& X,
                     const std::vector<double>& y01, double lambda);

// sigmoid(w.x + b) per row.
std::vector<double> svm_predict(const LinearParams& params, const Matrix& X);

SvmFit svm_train(const Matrix& X, const std::vector<double>& y01, const SvmConfig& config);

}  // namespace pedcross
