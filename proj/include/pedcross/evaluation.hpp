#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pedcross/domain.hpp"
#include "pedcross/models.hpp"

namespace pedcross {

// Prediction targets. decision uses every trial; cit and cd are defined only
// for trials where the pedestrian crossed.
enum class Target { decision, cit, cd };

std::string to_string(Target t);
Target target_from_string(const std::string& s);  // throws ConfigError

Task task_for_target(Target t);

// --- metrics ---------------------------------------------------------------
// All metric functions reject empty or mismatched inputs with ShapeError.

double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Harmonic mean of precision and recall for class 1, computed as
// 2TP / (2TP + FP + FN); when that denominator is zero (no actual and no
// predicted positives) the score is defined as 1.
double f1_score(const std::vector<int>& y_true, const std::vector<int>& y_pred);

double mean_absolute_error(const std::vector<double>& y_true, const std::vector<double>& y_pred);
double root_mean_squared_error(const std::vector<double>& y_true,
                               const std::vector<double>& y_pred);

// --- fold assignment --------------------------------------------------------

struct FoldPlan {
    int k = 0;
    std::vector<int> assignment;  // fold index per row

    std::vector<std::size_t> test_rows(int fold) const;
    std::vector<std::size_t> train_rows(int fold) const;
};

// Rows are shuffled with the seeded generator and dealt round-robin, so fold
// sizes differ by at most one.
FoldPlan make_folds(std::size_t n, int k, std::uint64_t seed);

// Same dealing applied to distinct group keys; all rows of a group land in
// one fold. Guards against twins of the same participant pair straddling the
// train/test boundary.
FoldPlan make_grouped_folds(const std::vector<std::string>& group_keys, int k,
                            std::uint64_t seed);

// --- cross-validation --------------------------------------------------------

// Rows eligible for a target (indices into the trial list) plus their target
// values.
struct TargetRows {
    std::vector<std::size_t> rows;
    std::vector<double> y;
};

TargetRows extract_target(const std::vector<Trial>& trials, Target target);

using MetricMap = std::map<std::string, double>;

struct FoldMetrics {
    int fold = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    MetricMap metrics;
};

struct StratumMetrics {
    std::string name;
    std::size_t n = 0;
    MetricMap metrics;
};

struct TtaMetrics {
    double tta = 0.0;
    std::size_t n = 0;
    MetricMap metrics;
};

struct CvReport {
    std::string task;     // decision | cit | cd
    std::string model;    // lr | svm_linear | rf | mlp
    std::string feature_set;
    int k = 0;
    std::uint64_t fold_seed = 0;
    std::uint64_t model_seed = 0;
    std::size_t n_rows = 0;
    std::size_t n_positive = 0;  // trials in the eligible set where the pedestrian crossed
    std::vector<FoldMetrics> per_fold;
    MetricMap aggregate;  // unweighted mean of the per-fold metrics
    std::vector<StratumMetrics> strata;         // zebra / non_zebra / total, pooled
    std::vector<TtaMetrics> by_tta;             // pooled, ascending time to arrival
    std::vector<std::pair<std::string, double>> importance;  // mean over folds
    std::vector<std::string> warnings;
};

// Out-of-fold predictions in eligible-row order.
struct OofPredictions {
    std::vector<std::size_t> trial_rows;  // index into the input trial list
    std::vector<double> y;
    std::vector<double> score;
    std::vector<int> fold;
};

struct CvOptions {
    int k = 5;
    std::uint64_t fold_seed = 0;
    bool group_by_pair = false;
    double threshold = 0.5;
};

struct CvResult {
    CvReport report;
    std::vector<TrainedModel> fold_models;
    OofPredictions oof;
};

// Protocol per fold: standardization is fitted on the training rows only and
// applied to both splits, the model trains on the training split with rng
// seed derive_stream_seed(spec.rng_seed, fold), and metrics come from the
// held-out split. Aggregate metrics are the unweighted fold mean; strata and
// by-TTA breakdowns pool the out-of-fold predictions.
CvResult cross_validate(const std::vector<Trial>& trials, Target target, const ModelSpec& spec,
                        const FeatureSetSpec& features, const CvOptions& options);

nlohmann::ordered_json report_to_json(const CvReport& report);

}  // namespace pedcross
