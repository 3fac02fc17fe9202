#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pedcross/errors.hpp"
#include "pedcross/experiments.hpp"

using namespace pedcross;
namespace fs = std::filesystem;

namespace {

bool has_cell(const std::vector<GridCell>& grid, Target t, ModelFamily f, FeatureSetName s) {
    return std::find(grid.begin(), grid.end(), GridCell{t, f, s}) != grid.end();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentPlan tiny_plan(const fs::path& out_dir) {
    ExperimentPlan plan;
    plan.dataset.kind = DatasetSource::Kind::generated;
    plan.dataset.generator.n_pairs = 6;
    plan.dataset.generator.blocks = 1;
    plan.dataset.generator.seed = 11;
    plan.out_dir = out_dir;
    return plan;
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) n += (c == '\n');
    return n;
}

}  // namespace

TEST_CASE("the headline grid holds the eleven published cells") {
    const std::vector<GridCell> grid = headline_grid();
    CHECK(grid.size() == 11);

    CHECK(has_cell(grid, Target::decision, ModelFamily::lr, FeatureSetName::baseline));
    CHECK(has_cell(grid, Target::decision, ModelFamily::lr, FeatureSetName::ours));
    CHECK(has_cell(grid, Target::decision, ModelFamily::svm_linear, FeatureSetName::ours));
    CHECK(has_cell(grid, Target::decision, ModelFamily::rf, FeatureSetName::ours));
    CHECK(has_cell(grid, Target::decision, ModelFamily::mlp, FeatureSetName::ours));

    CHECK(has_cell(grid, Target::cit, ModelFamily::lr, FeatureSetName::baseline));
    CHECK(has_cell(grid, Target::cit, ModelFamily::rf, FeatureSetName::ours_delta));
    CHECK(has_cell(grid, Target::cit, ModelFamily::mlp, FeatureSetName::ours_delta));

    CHECK(has_cell(grid, Target::cd, ModelFamily::lr, FeatureSetName::baseline));
    CHECK(has_cell(grid, Target::cd, ModelFamily::rf, FeatureSetName::ours));
    CHECK(has_cell(grid, Target::cd, ModelFamily::mlp, FeatureSetName::ours));
}

TEST_CASE("each target has a designated full feature set") {
    CHECK(full_feature_set(Target::decision) == FeatureSetName::ours);
    CHECK(full_feature_set(Target::cit) == FeatureSetName::ours_delta);
    CHECK(full_feature_set(Target::cd) == FeatureSetName::ours);
}

TEST_CASE("the ablation grid crosses three targets, three families, five sets") {
    const std::vector<GridCell> grid = ablation_grid();
    CHECK(grid.size() == 45);
    for (Target t : {Target::decision, Target::cit, Target::cd}) {
        for (ModelFamily f : {ModelFamily::lr, ModelFamily::rf, ModelFamily::mlp}) {
            CHECK(has_cell(grid, t, f, full_feature_set(t)));
            CHECK(has_cell(grid, t, f, FeatureSetName::subset1));
            CHECK(has_cell(grid, t, f, FeatureSetName::subset2));
            CHECK(has_cell(grid, t, f, FeatureSetName::subset3));
            CHECK(has_cell(grid, t, f, FeatureSetName::subset4));
        }
    }
    // No svm_linear anywhere in the ablation.
    for (const GridCell& c : grid) CHECK(c.family != ModelFamily::svm_linear);
}

TEST_CASE("report file names include target, family, and feature set") {
    CHECK(cell_report_name(GridCell{Target::cit, ModelFamily::rf,
                                    FeatureSetName::ours_delta}) ==
          "cit_rf_ours_delta.json");
    CHECK(cell_report_name(GridCell{Target::decision, ModelFamily::svm_linear,
                                    FeatureSetName::ours}) ==
          "decision_svm_linear_ours.json");
}

TEST_CASE("plans round-trip through json") {
    ExperimentPlan plan = tiny_plan("some/dir");
    plan.tasks = {Target::decision, Target::cd};
    plan.grid = {GridCell{Target::decision, ModelFamily::rf, FeatureSetName::subset2}};
    plan.k = 4;
    plan.cv_seed = 123;
    plan.model_seed = 456;

    const ExperimentPlan back = plan_from_json(plan_to_json(plan));
    CHECK(back.tasks == plan.tasks);
    CHECK(back.grid == plan.grid);
    CHECK(back.k == plan.k);
    CHECK(back.cv_seed == plan.cv_seed);
    CHECK(back.model_seed == plan.model_seed);
    CHECK(back.out_dir == plan.out_dir);
    CHECK(back.dataset.kind == plan.dataset.kind);
    CHECK(back.dataset.generator.n_pairs == 6);
    CHECK(back.dataset.generator.seed == 11);
}

TEST_CASE("plans reject a margin model on a regression target") {
    ExperimentPlan plan = tiny_plan("x");
    plan.grid = {GridCell{Target::cit, ModelFamily::svm_linear, FeatureSetName::ours}};
    CHECK_THROWS_AS(plan.validate(), ConfigError);
}

TEST_CASE("active cells filter the grid by the requested tasks") {
    ExperimentPlan plan = tiny_plan("x");
    plan.tasks = {Target::cd};
    const std::vector<GridCell> active = plan.active_cells();
    CHECK(active.size() == 3);  // headline grid has three cd rows
    for (const GridCell& c : active) CHECK(c.target == Target::cd);
}

TEST_CASE("box stats match hand-computed quartiles and outliers") {
    // 1..9: median 5, q1 3, q3 7, no outliers.
    std::vector<double> v1 = {9, 1, 8, 2, 7, 3, 6, 4, 5};
    std::vector<std::string> g1(v1.size(), "a");
    const auto s1 = box_stats(v1, g1);
    REQUIRE(s1.size() == 1);
    CHECK(s1[0].group == "a");
    CHECK(s1[0].n == 9);
    CHECK(s1[0].median == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(s1[0].q1 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(s1[0].q3 == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(s1[0].whisker_low == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s1[0].whisker_high == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(s1[0].outliers.empty());

    // A far point beyond 1.5*IQR becomes an outlier and the whisker retreats.
    std::vector<double> v2 = {1, 1, 1, 1, 100};
    std::vector<std::string> g2(v2.size(), "b");
    const auto s2 = box_stats(v2, g2);
    REQUIRE(s2.size() == 1);
    REQUIRE(s2[0].outliers.size() == 1);
    CHECK(s2[0].outliers[0] == 100.0);
    CHECK(s2[0].whisker_high == 1.0);

    // A single value degenerates to a zero-width box.
    const auto s3 = box_stats({4.2}, {"c"});
    REQUIRE(s3.size() == 1);
    CHECK(s3[0].median == 4.2);
    CHECK(s3[0].q1 == 4.2);
    CHECK(s3[0].q3 == 4.2);
    CHECK(s3[0].whisker_low == 4.2);
    CHECK(s3[0].whisker_high == 4.2);
    CHECK(s3[0].outliers.empty());
}

TEST_CASE("box stats keep groups in first-appearance order") {
    const std::vector<double> v = {1, 10, 2, 20, 3};
    const std::vector<std::string> g = {"z", "a", "z", "a", "z"};
    const auto stats = box_stats(v, g);
    REQUIRE(stats.size() == 2);
    CHECK(stats[0].group == "z");
    CHECK(stats[0].n == 3);
    CHECK(stats[1].group == "a");
    CHECK(stats[1].n == 2);
}

TEST_CASE("box stats reject empty and mismatched inputs") {
    CHECK_THROWS(box_stats({}, {}));
    CHECK_THROWS(box_stats({1.0}, {"a", "b"}));
}

TEST_CASE("sorted-sample quantiles interpolate linearly") {
    const std::vector<double> v = {1, 2, 3, 4};
    CHECK(quantile_sorted(v, 0.0) == 1.0);
    CHECK(quantile_sorted(v, 1.0) == 4.0);
    CHECK(quantile_sorted(v, 0.25) == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(quantile_sorted(v, 0.5) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("histogram densities integrate to one") {
    std::vector<double> values;
    for (int i = 0; i < 137; ++i) values.push_back(0.01 * i * i - 3.0);
    const Histogram h = histogram_density(values, 20);
    CHECK(h.n == 137);
    REQUIRE(h.edges.size() == 21);
    REQUIRE(h.density.size() == 20);
    double area = 0.0;
    for (std::size_t b = 0; b < 20; ++b) {
        area += h.density[b] * (h.edges[b + 1] - h.edges[b]);
    }
    CHECK(area == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("histograms of identical values collapse to one unit-width bin") {
    const Histogram h = histogram_density({2.5, 2.5, 2.5}, 20);
    REQUIRE(h.edges.size() == 2);
    REQUIRE(h.density.size() == 1);
    CHECK(h.edges[1] - h.edges[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h.density[0] == doctest::Approx(1.0).epsilon(1e-12));

    const Histogram single = histogram_density({7.0}, 20);
    REQUIRE(single.density.size() == 1);
    CHECK(single.density[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a full run writes every artifact and reruns byte-identically") {
    const fs::path base = fs::temp_directory_path() / "pedcross_run_test";
    fs::remove_all(base);
    const fs::path out_a = base / "a";
    const fs::path out_b = base / "b";

    ExperimentPlan plan = tiny_plan(out_a);
    const std::vector<Trial> trials = resolve_dataset(plan.dataset);
    CHECK(trials.size() == 6 * 5 * 4);  // pairs x tta levels x sites

    const RunSummary sum_a = run_plan(trials, plan);
    CHECK(sum_a.n_failed == 0);
    CHECK(sum_a.cells.size() == 11);
    for (const CellOutcome& cell : sum_a.cells) {
        CHECK(cell.ok);
        CHECK_FALSE(cell.report_file.empty());
        CHECK(fs::exists(out_a / cell.report_file));
    }

    CHECK(fs::exists(out_a / "tables" / "decision_table.csv"));
    CHECK(fs::exists(out_a / "provenance.json"));
    CHECK(fs::exists(out_a / "figures"));

    // The decision table has a header plus one row per decision cell.
    const std::string table = slurp(out_a / "tables" / "decision_table.csv");
    CHECK(count_lines(table) == 6);
    CHECK(table.rfind("method,zebra_acc,zebra_f1,non_zebra_acc,non_zebra_f1,total_acc,"
                      "total_f1\n", 0) == 0);

    // Second run into a fresh directory: byte-identical artifacts.
    ExperimentPlan plan_b = plan;
    plan_b.out_dir = out_b;
    const RunSummary sum_b = run_plan(trials, plan_b);
    CHECK(sum_b.n_failed == 0);

    std::size_t compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(out_a)) {
        if (!entry.is_regular_file()) continue;
        const fs::path rel = fs::relative(entry.path(), out_a);
        INFO(rel.string());
        REQUIRE(fs::exists(out_b / rel));
        CHECK(slurp(entry.path()) == slurp(out_b / rel));
        ++compared;
    }
    CHECK(compared >= 13);  // 11 reports + table + provenance + figures
    fs::remove_all(base);
}

TEST_CASE("an ablation run writes one table per target") {
    const fs::path base = fs::temp_directory_path() / "pedcross_ablation_test";
    fs::remove_all(base);

    ExperimentPlan plan = tiny_plan(base);
    const std::vector<Trial> trials = resolve_dataset(plan.dataset);
    const RunSummary sum = run_ablation(trials, plan);
    CHECK(sum.n_failed == 0);
    CHECK(sum.cells.size() == 45);

    for (const char* name :
         {"decision_ablation.csv", "cit_ablation.csv", "cd_ablation.csv"}) {
        const fs::path table = base / "tables" / name;
        INFO(name);
        REQUIRE(fs::exists(table));
        const std::string text = slurp(table);
        CHECK(count_lines(text) == 6);  // header + all + subset1..4
        CHECK(text.find("all,") != std::string::npos);
        CHECK(text.find("subset4,") != std::string::npos);
    }

    const std::string decision = slurp(base / "tables" / "decision_ablation.csv");
    CHECK(decision.rfind("features,lr_acc,lr_f1,rf_acc,rf_f1,mlp_acc,mlp_f1\n", 0) == 0);
    const std::string cit = slurp(base / "tables" / "cit_ablation.csv");
    CHECK(cit.rfind("features,lr_mae,lr_rmse,rf_mae,rf_rmse,mlp_mae,mlp_rmse\n", 0) == 0);
    fs::remove_all(base);
}

TEST_CASE("a failing cell is recorded without aborting the batch") {
    const fs::path base = fs::temp_directory_path() / "pedcross_fail_test";
    fs::remove_all(base);

    ExperimentPlan plan = tiny_plan(base);
    plan.tasks = {Target::decision};
    plan.grid = {
        GridCell{Target::decision, ModelFamily::lr, FeatureSetName::subset4},
        GridCell{Target::decision, ModelFamily::lr, FeatureSetName::baseline},
    };

    // A fold count larger than the row count fails deterministically inside
    // each cell while leaving the plan itself loadable.
    plan.k = 10000;
    const std::vector<Trial> trials = resolve_dataset(plan.dataset);
    const RunSummary sum = run_plan(trials, plan);
    CHECK(sum.cells.size() == 2);
    CHECK(sum.n_failed == 2);
    for (const CellOutcome& cell : sum.cells) {
        CHECK_FALSE(cell.ok);
        CHECK_FALSE(cell.error.empty());
    }
    fs::remove_all(base);
}
