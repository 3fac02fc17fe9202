#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pedcross/errors.hpp"
#include "pedcross/features.hpp"
#include "pedcross/models.hpp"
#include "test_helpers.hpp"

using namespace pedcross;
using namespace pedcross::testing;
namespace fs = std::filesystem;

namespace {

ModelSpec spec_for(ModelFamily family, Task task, std::uint64_t seed = 7) {
    ModelSpec s;
    s.family = family;
    s.task = task;
    s.rng_seed = seed;
    return s;
}

struct Fixture {
    std::vector<Trial> trials = small_dataset();
    DesignMatrix dm;
    std::vector<double> decision;
    std::vector<double> cit;

    Fixture() {
        dm = encode(trials, FeatureSetSpec::parse("ours"));
        std::vector<std::size_t> all_rows(dm.values.rows());
        for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;
        Standardizer st = fit_standardizer(dm, all_rows);
        dm = apply_standardizer(st, dm);
        for (const Trial& t : trials) {
            decision.push_back(t.outcome.decision ? 1.0 : 0.0);
            // Synthetic regression target aligned with every design-matrix row
            // (the real cit is only defined for crossings).
            cit.push_back(0.5 + 0.3 * t.tta + 0.02 * t.waiting_time);
        }
    }
};

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("model specs reject invalid combinations") {
    ModelSpec svm_regress = spec_for(ModelFamily::svm_linear, Task::regress);
    CHECK_THROWS_WITH_AS(svm_regress.validate(), "svm_linear supports classification only",
                         ConfigError);

    ModelSpec bad_lr = spec_for(ModelFamily::lr, Task::classify);
    bad_lr.hp.linear.learning_rate = -1.0;
    CHECK_THROWS_AS(bad_lr.validate(), ConfigError);

    ModelSpec bad_rf = spec_for(ModelFamily::rf, Task::classify);
    bad_rf.hp.forest.max_depth = 0;
    CHECK_THROWS_AS(bad_rf.validate(), ConfigError);

    ModelSpec bad_mlp = spec_for(ModelFamily::mlp, Task::classify);
    bad_mlp.hp.mlp.hidden = {16, 0};
    CHECK_THROWS_AS(bad_mlp.validate(), ConfigError);

    CHECK_NOTHROW(spec_for(ModelFamily::svm_linear, Task::classify).validate());
}

TEST_CASE("family and task names round-trip through strings") {
    for (ModelFamily f :
         {ModelFamily::lr, ModelFamily::svm_linear, ModelFamily::rf, ModelFamily::mlp}) {
        CHECK(model_family_from_string(to_string(f)) == f);
    }
    for (Task t : {Task::classify, Task::regress}) {
        CHECK(task_from_string(to_string(t)) == t);
    }
    CHECK_THROWS_AS(model_family_from_string("boost"), ConfigError);
    CHECK_THROWS_AS(task_from_string("rank"), ConfigError);
}

TEST_CASE("classification targets outside {0,1} are rejected") {
    Fixture fx;
    std::vector<double> bad = fx.decision;
    bad[0] = 0.5;
    CHECK_THROWS_WITH_AS(
        train_model(spec_for(ModelFamily::lr, Task::classify), fx.dm, bad),
        "classification targets must be 0 or 1", TrainingError);

    // The same values are fine for regression.
    CHECK_NOTHROW(train_model(spec_for(ModelFamily::lr, Task::regress), fx.dm, bad));
}

TEST_CASE("empty data is rejected for every family") {
    DesignMatrix empty;
    std::vector<double> none;
    for (ModelFamily f :
         {ModelFamily::lr, ModelFamily::svm_linear, ModelFamily::rf, ModelFamily::mlp}) {
        CHECK_THROWS_AS(train_model(spec_for(f, Task::classify), empty, none), TrainingError);
    }
}

TEST_CASE("classify labels 1 only strictly above the threshold") {
    Fixture fx;
    // Zero training iterations leave a zero-initialized logistic model whose
    // score is exactly 0.5 everywhere: at the default threshold the tie must
    // resolve to label 0.
    ModelSpec frozen = spec_for(ModelFamily::lr, Task::classify);
    frozen.hp.linear.max_iterations = 0;
    const TrainedModel model = train_model(frozen, fx.dm, fx.decision);
    const auto scores = predict(model, fx.dm);
    for (double s : scores) CHECK(s == 0.5);
    for (int label : classify(model, fx.dm)) CHECK(label == 0);
    // Just below the scores the same model says 1.
    for (int label : classify(model, fx.dm, 0.4999)) CHECK(label == 1);
}

TEST_CASE("classify refuses regression models") {
    Fixture fx;
    const TrainedModel model =
        train_model(spec_for(ModelFamily::lr, Task::regress), fx.dm, fx.cit);
    CHECK_THROWS_AS(classify(model, fx.dm), ConfigError);
}

TEST_CASE("prediction requires the training column layout") {
    Fixture fx;
    const TrainedModel model =
        train_model(spec_for(ModelFamily::lr, Task::classify), fx.dm, fx.decision);
    DesignMatrix other = encode(fx.trials, FeatureSetSpec::parse("subset4"));
    CHECK_THROWS_AS(predict(model, other), ShapeError);
}

TEST_CASE("every family trains, predicts in range, and is deterministic") {
    Fixture fx;
    for (ModelFamily f :
         {ModelFamily::lr, ModelFamily::svm_linear, ModelFamily::rf, ModelFamily::mlp}) {
        const ModelSpec spec = spec_for(f, Task::classify);
        const TrainedModel a = train_model(spec, fx.dm, fx.decision);
        const TrainedModel b = train_model(spec, fx.dm, fx.decision);
        const auto pa = predict(a, fx.dm);
        const auto pb = predict(b, fx.dm);
        REQUIRE(pa.size() == fx.dm.values.rows());
        for (std::size_t i = 0; i < pa.size(); ++i) {
            CHECK(pa[i] >= 0.0);
            CHECK(pa[i] <= 1.0);
            CHECK(pa[i] == pb[i]);
        }
    }
}

TEST_CASE("regression families fit the small fixture") {
    Fixture fx;
    for (ModelFamily f : {ModelFamily::lr, ModelFamily::rf, ModelFamily::mlp}) {
        const TrainedModel model =
            train_model(spec_for(f, Task::regress), fx.dm, fx.cit);
        const auto pred = predict(model, fx.dm);
        double mae = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i) mae += std::abs(pred[i] - fx.cit[i]);
        mae /= double(pred.size());
        CHECK(mae < 1.0);
    }
}

TEST_CASE("importance ranks a planted feature first for linear and forest models") {
    // decision in small_dataset is exactly (tta >= 5), so T_a must dominate.
    Fixture fx;
    for (ModelFamily f : {ModelFamily::lr, ModelFamily::svm_linear, ModelFamily::rf}) {
        const TrainedModel model =
            train_model(spec_for(f, Task::classify), fx.dm, fx.decision);
        const auto imp = feature_importance(model);
        REQUIRE_FALSE(imp.empty());
        CHECK(imp.front().first == "T_a");
        for (std::size_t i = 1; i < imp.size(); ++i) {
            CHECK(imp[i - 1].second >= imp[i].second);
        }
    }
}

TEST_CASE("forest importance shares sum to one") {
    Fixture fx;
    const TrainedModel model =
        train_model(spec_for(ModelFamily::rf, Task::classify), fx.dm, fx.decision);
    const auto imp = feature_importance(model);
    double total = 0.0;
    for (const auto& [name, share] : imp) {
        CHECK(share >= 0.0);
        total += share;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("importance collapses one-hot groups to one entry") {
    Fixture fx;
    const TrainedModel model =
        train_model(spec_for(ModelFamily::lr, Task::classify), fx.dm, fx.decision);
    const auto imp = feature_importance(model);
    // "ours" has 11 features; its 14 columns collapse back to 11 entries.
    CHECK(imp.size() == 11);
    std::size_t location_entries = 0;
    for (const auto& [name, value] : imp) {
        if (name == "L") ++location_entries;
        CHECK(name.find('=') == std::string::npos);  // no per-category entries
    }
    CHECK(location_entries == 1);
}

TEST_CASE("importance is not defined for the network model") {
    Fixture fx;
    const TrainedModel model =
        train_model(spec_for(ModelFamily::mlp, Task::classify), fx.dm, fx.decision);
    CHECK_THROWS_AS(feature_importance(model), ConfigError);
}

TEST_CASE("saved models reload with bit-identical predictions") {
    Fixture fx;
    int idx = 0;
    for (ModelFamily f :
         {ModelFamily::lr, ModelFamily::svm_linear, ModelFamily::rf, ModelFamily::mlp}) {
        const TrainedModel model =
            train_model(spec_for(f, Task::classify), fx.dm, fx.decision);
        const fs::path path =
            temp_file("pedcross_model_roundtrip_" + std::to_string(idx++) + ".json");
        save_model(model, path);
        const TrainedModel back = load_model(path);
        const auto before = predict(model, fx.dm);
        const auto after = predict(back, fx.dm);
        REQUIRE(before.size() == after.size());
        for (std::size_t i = 0; i < before.size(); ++i) {
            CHECK(before[i] == after[i]);
        }
        CHECK(back.spec.family == model.spec.family);
        CHECK(back.columns == model.columns);
        fs::remove(path);
    }
}

TEST_CASE("model files with a future version or junk content are rejected") {
    Fixture fx;
    const TrainedModel model =
        train_model(spec_for(ModelFamily::lr, Task::classify), fx.dm, fx.decision);
    nlohmann::ordered_json j = model_to_json(model);
    j["format_version"] = 999;
    CHECK_THROWS_AS(model_from_json(j), SerializationError);

    const fs::path junk = temp_file("pedcross_model_junk.json");
    {
        std::ofstream out(junk);
        out << "{\"format_version\": 1, \"fam";  // truncated
    }
    CHECK_THROWS_AS(load_model(junk), SerializationError);
    fs::remove(junk);

    CHECK_THROWS_AS(load_model(temp_file("pedcross_model_missing.json")), IoError);
}

TEST_CASE("rescaling a continuous column does not change forest labels") {
    // Tree splits depend only on the ordering of values within a column, so
    // doubling one continuous column must leave hard labels unchanged.
    Fixture fx;
    const ModelSpec spec = spec_for(ModelFamily::rf, Task::classify);
    const TrainedModel base = train_model(spec, fx.dm, fx.decision);
    const auto base_labels = classify(base, fx.dm);

    DesignMatrix scaled = fx.dm;
    std::size_t target_col = 0;
    for (std::size_t c = 0; c < scaled.columns.size(); ++c) {
        if (!scaled.columns[c].one_hot) {
            target_col = c;
            break;
        }
    }
    for (std::size_t r = 0; r < scaled.values.rows(); ++r) {
        scaled.values.at(r, target_col) *= 2.0;  // power of two: exact
    }
    const TrainedModel rescaled = train_model(spec, scaled, fx.decision);
    const auto scaled_labels = classify(rescaled, scaled);
    CHECK(base_labels == scaled_labels);
}
