#include <doctest.h>

#include <cmath>
#include <vector>

#include "pedcross/errors.hpp"
#include "pedcross/features.hpp"
#include "pedcross/rng.hpp"
#include "pedcross/svm.hpp"

using namespace pedcross;

namespace {

void separable_blobs(Matrix& X, std::vector<double>& y, std::size_t n_per_class,
                     std::uint64_t seed) {
    X = Matrix(2 * n_per_class, 2);
    y.assign(2 * n_per_class, 0.0);
    Rng rng(seed);
    for (std::size_t i = 0; i < n_per_class; ++i) {
        X.at(i, 0) = 1.0 + rng.uniform01();
        X.at(i, 1) = 1.0 + rng.uniform01();
        y[i] = 1.0;
        X.at(n_per_class + i, 0) = -1.0 - rng.uniform01();
        X.at(n_per_class + i, 1) = -1.0 - rng.uniform01();
    }
}

}  // namespace

TEST_CASE("hinge-loss training separates separable blobs") {
    Matrix X;
    std::vector<double> y;
    separable_blobs(X, y, 100, 42);
    const SvmFit fit = svm_train(X, y, SvmConfig{});
    const auto scores = svm_predict(fit.params, X);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ok += ((scores[i] > 0.5 ? 1.0 : 0.0) == y[i]);
    }
    CHECK(double(ok) / double(y.size()) >= 0.99);
}

TEST_CASE("scores are squashed margins in (0,1), monotone in the margin") {
    LinearParams p;
    p.weights = {2.0};
    p.bias = 0.0;
    Matrix X(3, 1);
    X.at(0, 0) = -5.0;
    X.at(1, 0) = 0.0;
    X.at(2, 0) = 5.0;
    const auto s = svm_predict(p, X);
    CHECK(s[0] > 0.0);
    CHECK(s[0] < s[1]);
    CHECK(s[1] == 0.5);  // zero margin
    CHECK(s[1] < s[2]);
    CHECK(s[2] < 1.0);
}

TEST_CASE("objective decreases from the zero initializer") {
    Matrix X;
    std::vector<double> y;
    separable_blobs(X, y, 50, 9);
    const SvmConfig cfg;
    const SvmFit fit = svm_train(X, y, cfg);
    const double lambda = 1.0 / (cfg.C * double(X.rows()));
    const double initial =
        svm_objective(LinearParams{std::vector<double>(X.cols(), 0.0), 0.0}, X, y, lambda);
    CHECK(fit.final_objective < initial);
}

TEST_CASE("training is deterministic") {
    Matrix X;
    std::vector<double> y;
    separable_blobs(X, y, 30, 5);
    const SvmFit a = svm_train(X, y, SvmConfig{});
    const SvmFit b = svm_train(X, y, SvmConfig{});
    CHECK(a.params == b.params);
}

TEST_CASE("bad inputs are rejected with typed errors") {
    Matrix empty;
    std::vector<double> none;
    CHECK_THROWS_AS(svm_train(empty, none, SvmConfig{}), TrainingError);

    Matrix X(2, 1);
    std::vector<double> y = {0, 1, 1};
    CHECK_THROWS_AS(svm_train(X, y, SvmConfig{}), ShapeError);

    SvmConfig bad;
    bad.C = 0.0;
    std::vector<double> y2 = {0, 1};
    CHECK_THROWS_AS(svm_train(X, y2, bad), ConfigError);
}

TEST_CASE("a larger soft-margin budget fits the training data at least as tightly") {
    // With a near-zero C the regularizer dominates and the fit stays close
    // to the zero vector; with the default C the blobs are separated.
    Matrix X;
    std::vector<double> y;
    separable_blobs(X, y, 40, 13);
    SvmConfig tight;
    tight.C = 1e-6;
    const SvmFit small_c = svm_train(X, y, tight);
    const SvmFit default_c = svm_train(X, y, SvmConfig{});
    const auto norm = [](const std::vector<double>& w) {
        double s = 0.0;
        for (double v : w) s += v * v;
        return s;
    };
    CHECK(norm(small_c.params.weights) < norm(default_c.params.weights));
}
