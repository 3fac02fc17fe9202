#include "pedcross/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pedcross/errors.hpp"

namespace pedcross {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(ModelFamily f) {
    switch (f) {
        case ModelFamily::lr: return "lr";
        case ModelFamily::svm_linear: return "svm_linear";
        case ModelFamily::rf: return "rf";
        case ModelFamily::mlp: return "mlp";
    }
    return "?";
}

std::string to_string(Task t) { return t == Task::classify ? "classify" : "regress"; }

ModelFamily model_family_from_string(const std::string& s) {
    if (s == "lr") return ModelFamily::lr;
    if (s == "svm_linear") return ModelFamily::svm_linear;
    if (s == "rf") return ModelFamily::rf;
    if (s == "mlp") return ModelFamily::mlp;
    throw ConfigError("unknown model family '" + s + "' (expected lr, svm_linear, rf, mlp)");
}

Task task_from_string(const std::string& s) {
    if (s == "classify") return Task::classify;
    if (s == "regress") return Task::regress;
    throw ConfigError("unknown task '" + s + "' (expected classify or regress)");
}

void ModelSpec::validate() const {
    switch (family) {
        case ModelFamily::lr:
            if (hp.linear.learning_rate <= 0.0) throw ConfigError("lr: learning_rate must be positive");
            if (hp.linear.max_iterations < 0) throw ConfigError("lr: max_iterations must be >= 0");
            if (hp.linear.l2 < 0.0) throw ConfigError("lr: l2 must be >= 0");
            if (hp.linear.tolerance < 0.0) throw ConfigError("lr: tolerance must be >= 0");
            break;
        case ModelFamily::svm_linear:
            if (task != Task::classify) {
                throw ConfigError("svm_linear supports classification only");
            }
            if (hp.svm.C <= 0.0) throw ConfigError("svm_linear: C must be positive");
            if (hp.svm.epochs < 0) throw ConfigError("svm_linear: epochs must be >= 0");
            break;
        case ModelFamily::rf:
            if (hp.forest.n_estimators < 1) throw ConfigError("rf: n_estimators must be >= 1");
            if (hp.forest.max_depth < 1) throw ConfigError("rf: max_depth must be >= 1");
            if (hp.forest.min_samples_leaf < 1) {
                throw ConfigError("rf: min_samples_leaf must be >= 1");
            }
            break;
        case ModelFamily::mlp:
            if (hp.mlp.learning_rate <= 0.0) throw ConfigError("mlp: learning_rate must be positive");
            if (hp.mlp.epochs < 0) throw ConfigError("mlp: epochs must be >= 0");
            for (int h : hp.mlp.hidden) {
                if (h < 1) throw ConfigError("mlp: hidden layer sizes must be >= 1");
            }
            if (hp.mlp.beta1 <= 0.0 || hp.mlp.beta1 >= 1.0 || hp.mlp.beta2 <= 0.0 ||
                hp.mlp.beta2 >= 1.0) {
                throw ConfigError("mlp: beta1/beta2 must lie in (0, 1)");
            }
            break;
    }
}

namespace {

void check_targets(const std::vector<double>& y, Task task) {
    for (double v : y) {
        if (!std::isfinite(v)) throw TrainingError("targets must be finite");
        if (task == Task::classify && v != 0.0 && v != 1.0) {
            throw TrainingError("classification targets must be 0 or 1");
        }
    }
}

}  // namespace

TrainedModel train_model(const ModelSpec& spec, const DesignMatrix& dm,
                         const std::vector<double>& y) {
    spec.validate();
    if (dm.values.rows() != y.size()) {
        throw ShapeError("train_model: row/target count mismatch");
    }
    if (dm.values.rows() == 0) throw TrainingError("train_model: empty data");
    check_targets(y, spec.task);

    TrainedModel model;
    model.spec = spec;
    model.columns = dm.columns;

    switch (spec.family) {
        case ModelFamily::lr: {
            LinearFit fit = linear_train(dm.values, y, spec.task, spec.hp.linear);
            model.params = std::move(fit.params);
            model.info = {fit.iterations_run, fit.final_loss};
            break;
        }
        case ModelFamily::svm_linear: {
            SvmFit fit = svm_train(dm.values, y, spec.hp.svm);
            model.params = std::move(fit.params);
            model.info = {fit.epochs_run, fit.final_objective};
            break;
        }
        case ModelFamily::rf: {
            ForestConfig cfg = spec.hp.forest;
            cfg.seed = spec.rng_seed;
            model.params = forest_train(dm.values, y, spec.task, cfg);
            model.info = {cfg.n_estimators, 0.0};
            break;
        }
        case ModelFamily::mlp: {
            MlpTrainConfig cfg = spec.hp.mlp;
            cfg.seed = spec.rng_seed;
            MlpTrainResult fit = mlp_train(dm.values, y, spec.task, cfg);
            model.params = std::move(fit.net);
            model.info = {fit.epochs_run, fit.final_loss};
            break;
        }
    }
    return model;
}

std::vector<double> predict(const TrainedModel& model, const DesignMatrix& dm) {
    if (dm.columns != model.columns) {
        throw ShapeError("predict: input columns do not match the model's training layout");
    }
    switch (model.spec.family) {
        case ModelFamily::lr:
            return linear_predict(std::get<LinearParams>(model.params), dm.values,
                                  model.spec.task);
        case ModelFamily::svm_linear:
            return svm_predict(std::get<LinearParams>(model.params), dm.values);
        case ModelFamily::rf:
            return forest_predict(std::get<ForestParams>(model.params), dm.values,
                                  model.spec.task);
        case ModelFamily::mlp:
            return mlp_forward(std::get<MlpParams>(model.params), dm.values, model.spec.task);
    }
    throw ConfigError("predict: unknown model family");
}

std::vector<int> classify(const TrainedModel& model, const DesignMatrix& dm, double threshold) {
    if (model.spec.task != Task::classify) {
        throw ConfigError("classify requires a classification model");
    }
    std::vector<double> scores = predict(model, dm);
    std::vector<int> labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] > threshold ? 1 : 0;
    return labels;
}

std::vector<std::pair<std::string, double>> feature_importance(const TrainedModel& model) {
    if (model.spec.family == ModelFamily::mlp) {
        throw ConfigError("feature importance is not available for family mlp");
    }

    // Column groups per feature, in first-occurrence order.
    std::vector<FeatureId> order;
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t j = 0; j < model.columns.size(); ++j) {
        const FeatureId f = model.columns[j].feature;
        auto it = std::find(order.begin(), order.end(), f);
        if (it == order.end()) {
            order.push_back(f);
            groups.emplace_back();
            it = order.end() - 1;
        }
        groups[static_cast<std::size_t>(it - order.begin())].push_back(j);
    }

    std::vector<std::pair<std::string, double>> ranked;
    ranked.reserve(order.size());
    if (model.spec.family == ModelFamily::rf) {
        const auto& imp = std::get<ForestParams>(model.params).impurity_importance;
        double total = 0.0;
        for (double v : imp) total += v;
        for (std::size_t g = 0; g < order.size(); ++g) {
            double sum = 0.0;
            for (std::size_t j : groups[g]) sum += imp[j];
            ranked.emplace_back(to_string(order[g]), total > 0.0 ? sum / total : 0.0);
        }
    } else {
        const auto& w = std::get<LinearParams>(model.params).weights;
        for (std::size_t g = 0; g < order.size(); ++g) {
            double best = 0.0;
            for (std::size_t j : groups[g]) best = std::max(best, std::abs(w[j]));
            ranked.emplace_back(to_string(order[g]), best);
        }
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return ranked;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

constexpr int kFormatVersion = 1;

ordered_json column_to_json(const ColumnMeta& c) {
    return ordered_json{{"feature", to_string(c.feature)}, {"category", c.category},
                        {"one_hot", c.one_hot},           {"standardized", c.standardized},
                        {"mean", c.mean},                 {"sd", c.sd}};
}

ColumnMeta column_from_json(const json& j) {
    ColumnMeta c;
    const std::string name = j.at("feature").get<std::string>();
    auto f = feature_from_string(name);
    if (!f) throw SerializationError("unknown feature '" + name + "' in model file");
    c.feature = *f;
    c.category = j.at("category").get<std::string>();
    c.one_hot = j.at("one_hot").get<bool>();
    c.standardized = j.at("standardized").get<bool>();
    c.mean = j.at("mean").get<double>();
    c.sd = j.at("sd").get<double>();
    return c;
}

ordered_json params_to_json(const TrainedModel& model) {
    ordered_json out;
    if (std::holds_alternative<LinearParams>(model.params)) {
        const auto& p = std::get<LinearParams>(model.params);
        out["weights"] = p.weights;
        out["bias"] = p.bias;
    } else if (std::holds_alternative<ForestParams>(model.params)) {
        const auto& p = std::get<ForestParams>(model.params);
        out["impurity_importance"] = p.impurity_importance;
        ordered_json trees = ordered_json::array();
        for (const TreeModel& t : p.trees) {
            ordered_json nodes = ordered_json::array();
            for (const TreeNode& n : t.nodes) {
                nodes.push_back(ordered_json::array(
                    {n.feature, n.threshold, n.left, n.right, n.value}));
            }
            trees.push_back(ordered_json{{"nodes", std::move(nodes)}});
        }
        out["trees"] = std::move(trees);
    } else {
        const auto& p = std::get<MlpParams>(model.params);
        ordered_json layers = ordered_json::array();
        for (const MlpLayer& l : p.layers) {
            layers.push_back(
                ordered_json{{"in", l.in}, {"out", l.out}, {"w", l.w}, {"b", l.b}});
        }
        out["layers"] = std::move(layers);
    }
    return out;
}

std::variant<LinearParams, ForestParams, MlpParams> params_from_json(ModelFamily family,
                                                                     const json& j) {
    if (family == ModelFamily::lr || family == ModelFamily::svm_linear) {
        LinearParams p;
        p.weights = j.at("weights").get<std::vector<double>>();
        p.bias = j.at("bias").get<double>();
        return p;
    }
    if (family == ModelFamily::rf) {
        ForestParams p;
        p.impurity_importance = j.at("impurity_importance").get<std::vector<double>>();
        for (const json& jt : j.at("trees")) {
            TreeModel tree;
            for (const json& jn : jt.at("nodes")) {
                TreeNode n;
                n.feature = jn.at(0).get<std::int32_t>();
                n.threshold = jn.at(1).get<double>();
                n.left = jn.at(2).get<std::int32_t>();
                n.right = jn.at(3).get<std::int32_t>();
                n.value = jn.at(4).get<std::vector<double>>();
                tree.nodes.push_back(std::move(n));
            }
            p.trees.push_back(std::move(tree));
        }
        return p;
    }
    MlpParams p;
    for (const json& jl : j.at("layers")) {
        MlpLayer l;
        l.in = jl.at("in").get<std::size_t>();
        l.out = jl.at("out").get<std::size_t>();
        l.w = jl.at("w").get<std::vector<double>>();
        l.b = jl.at("b").get<std::vector<double>>();
        p.layers.push_back(std::move(l));
    }
    return p;
}

}  // namespace

ordered_json model_spec_to_json(const ModelSpec& spec) {
    ordered_json hp;
    hp["linear"] = ordered_json{{"learning_rate", spec.hp.linear.learning_rate},
                                {"max_iterations", spec.hp.linear.max_iterations},
                                {"l2", spec.hp.linear.l2},
                                {"tolerance", spec.hp.linear.tolerance}};
    hp["svm"] = ordered_json{{"C", spec.hp.svm.C}, {"epochs", spec.hp.svm.epochs}};
    hp["forest"] = ordered_json{{"n_estimators", spec.hp.forest.n_estimators},
                                {"max_depth", spec.hp.forest.max_depth},
                                {"min_samples_leaf", spec.hp.forest.min_samples_leaf}};
    hp["mlp"] = ordered_json{{"hidden", spec.hp.mlp.hidden},
                             {"learning_rate", spec.hp.mlp.learning_rate},
                             {"epochs", spec.hp.mlp.epochs},
                             {"beta1", spec.hp.mlp.beta1},
                             {"beta2", spec.hp.mlp.beta2}};
    return ordered_json{{"family", to_string(spec.family)},
                        {"task", to_string(spec.task)},
                        {"rng_seed", spec.rng_seed},
                        {"hyperparams", std::move(hp)}};
}

ModelSpec model_spec_from_json(const json& j) {
    ModelSpec spec;
    spec.family = model_family_from_string(j.at("family").get<std::string>());
    spec.task = task_from_string(j.at("task").get<std::string>());
    spec.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    const json& hp = j.at("hyperparams");
    const json& lin = hp.at("linear");
    spec.hp.linear.learning_rate = lin.at("learning_rate").get<double>();
    spec.hp.linear.max_iterations = lin.at("max_iterations").get<int>();
    spec.hp.linear.l2 = lin.at("l2").get<double>();
    spec.hp.linear.tolerance = lin.at("tolerance").get<double>();
    const json& svm = hp.at("svm");
    spec.hp.svm.C = svm.at("C").get<double>();
    spec.hp.svm.epochs = svm.at("epochs").get<int>();
    const json& forest = hp.at("forest");
    spec.hp.forest.n_estimators = forest.at("n_estimators").get<int>();
    spec.hp.forest.max_depth = forest.at("max_depth").get<int>();
    spec.hp.forest.min_samples_leaf = forest.at("min_samples_leaf").get<int>();
    const json& mlp = hp.at("mlp");
    spec.hp.mlp.hidden = mlp.at("hidden").get<std::vector<int>>();
    spec.hp.mlp.learning_rate = mlp.at("learning_rate").get<double>();
    spec.hp.mlp.epochs = mlp.at("epochs").get<int>();
    spec.hp.mlp.beta1 = mlp.at("beta1").get<double>();
    spec.hp.mlp.beta2 = mlp.at("beta2").get<double>();
    return spec;
}

ordered_json model_to_json(const TrainedModel& model) {
    ordered_json columns = ordered_json::array();
    for (const ColumnMeta& c : model.columns) columns.push_back(column_to_json(c));
    return ordered_json{{"format_version", kFormatVersion},
                        {"spec", model_spec_to_json(model.spec)},
                        {"columns", std::move(columns)},
                        {"training", ordered_json{{"iterations", model.info.iterations},
                                                  {"final_loss", model.info.final_loss}}},
                        {"parameters", params_to_json(model)}};
}

TrainedModel model_from_json(const json& j) {
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kFormatVersion) {
            throw SerializationError("unsupported model format version " +
                                     std::to_string(version) + " (expected " +
                                     std::to_string(kFormatVersion) + ")");
        }
        TrainedModel model;
        model.spec = model_spec_from_json(j.at("spec"));
        for (const json& jc : j.at("columns")) model.columns.push_back(column_from_json(jc));
        model.info.iterations = j.at("training").at("iterations").get<int>();
        model.info.final_loss = j.at("training").at("final_loss").get<double>();
        model.params = params_from_json(model.spec.family, j.at("parameters"));
        return model;
    } catch (const json::exception& e) {
        throw SerializationError(std::string("invalid model file: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << model_to_json(model).dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SerializationError(std::string("invalid model file: ") + e.what());
    }
    return model_from_json(j);
}

}  // namespace pedcross
