#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pedcross/features.hpp"
#include "pedcross/forest.hpp"
#include "pedcross/linear_model.hpp"
#include "pedcross/mlp.hpp"
#include "pedcross/svm.hpp"

namespace pedcross {

enum class ModelFamily { lr, svm_linear, rf, mlp };

std::string to_string(ModelFamily f);
std::string to_string(Task t);
ModelFamily model_family_from_string(const std::string& s);  // throws ConfigError
Task task_from_string(const std::string& s);                 // throws ConfigError

// All tunables in one place; each family reads only its own block. The seed
// fields inside forest/mlp are overridden by ModelSpec::rng_seed.
struct Hyperparams {
    LinearConfig linear;
    SvmConfig svm;
    ForestConfig forest;
    MlpTrainConfig mlp;
};

struct ModelSpec {
    ModelFamily family = ModelFamily::lr;
    Task task = Task::classify;
    Hyperparams hp;
    std::uint64_t rng_seed = 0;

    void validate() const;  // throws ConfigError on any bad combination
};

struct TrainingInfo {
    int iterations = 0;
    double final_loss = 0.0;
};

// A fitted model plus the exact column layout it was trained against. Inputs
// at prediction time must carry byte-identical column metadata; anything else
// is a wiring bug and trips a ShapeError.
struct TrainedModel {
    ModelSpec spec;
    std::vector<ColumnMeta> columns;
    std::variant<LinearParams, ForestParams, MlpParams> params;
    TrainingInfo info;
};

TrainedModel train_model(const ModelSpec& spec, const DesignMatrix& dm,
                         const std::vector<double>& y);

// Scores per row: P(cross) in [0,1] for classification, seconds for
// regression.
std::vector<double> predict(const TrainedModel& model, const DesignMatrix& dm);

// Hard labels; score strictly above the threshold maps to 1.
std::vector<int> classify(const TrainedModel& model, const DesignMatrix& dm,
                          double threshold = 0.5);

// Per-feature importance ranked descending (ties keep feature order).
// One-hot groups collapse to one entry: linear families report the largest
// absolute coefficient in the group, forests the group's share of total
// impurity decrease (shares sum to 1). Not defined for mlp.
std::vector<std::pair<std::string, double>> feature_importance(const TrainedModel& model);

nlohmann::ordered_json model_spec_to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

nlohmann::ordered_json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);  // throws SerializationError

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace pedcross
