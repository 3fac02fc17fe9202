#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pedcross/evaluation.hpp"
#include "pedcross/synthgen.hpp"

namespace pedcross {

// Where the trials come from: a seeded generator run or an already-ingested
// CSV file.
struct DatasetSource {
    enum class Kind { generated, csv };
    Kind kind = Kind::generated;
    GeneratorConfig generator;
    std::filesystem::path csv_path;
};

struct GridCell {
    Target target = Target::decision;
    ModelFamily family = ModelFamily::lr;
    FeatureSetName features = FeatureSetName::baseline;

    bool operator==(const GridCell&) const = default;
};

// One experiment batch: dataset, cells to run, CV shape, seeds, output root.
struct ExperimentPlan {
    DatasetSource dataset;
    std::vector<Target> tasks = {Target::decision, Target::cit, Target::cd};
    std::vector<GridCell> grid;  // empty means the default headline grid
    int k = 5;
    std::uint64_t cv_seed = 2024;
    std::uint64_t model_seed = 7;
    std::filesystem::path out_dir = "out";

    // Cells whose target is listed in tasks.
    std::vector<GridCell> active_cells() const;

    void validate() const;  // throws ConfigError (e.g. svm_linear on cit/cd)
};

// The headline grid: five decision rows (lr on baseline and on the full set,
// svm_linear/rf/mlp on the full set), and lr-baseline/rf/mlp rows for each of
// cit (full set plus deltas) and cd (full set).
std::vector<GridCell> headline_grid();

// Full feature set used for a target's "all features" condition.
FeatureSetName full_feature_set(Target target);

// Ablation grid: for every target and family in {lr, rf, mlp}, the full set
// plus subsets 1-4.
std::vector<GridCell> ablation_grid();

nlohmann::ordered_json plan_to_json(const ExperimentPlan& plan);
ExperimentPlan plan_from_json(const nlohmann::json& j);  // throws ConfigError

// Generates or loads the trials named by the source.
std::vector<Trial> resolve_dataset(const DatasetSource& source);

struct CellOutcome {
    GridCell cell;
    bool ok = false;
    std::string error;
    std::string report_file;  // relative to out_dir, empty on failure
    CvReport report;
    OofPredictions oof;
};

struct RunSummary {
    std::vector<CellOutcome> cells;
    std::size_t n_failed = 0;
};

// Runs every active cell (independent jobs on a small worker pool), then
// writes reports/<target>_<family>_<features>.json per cell, the decision
// summary table, figure data (per-TTA curves, box stats by location,
// prediction histograms), and provenance.json. A failing cell is recorded
// and the rest still run.
RunSummary run_plan(const std::vector<Trial>& trials, const ExperimentPlan& plan);

// Same machinery over the ablation grid; emits tables/<target>_ablation.csv
// (rows: all, subset1..subset4) instead of the headline table and figures.
RunSummary run_ablation(const std::vector<Trial>& trials, const ExperimentPlan& plan);

// --- figure data -------------------------------------------------------------

struct GroupBoxStats {
    std::string group;
    std::size_t n = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double whisker_low = 0.0;
    double whisker_high = 0.0;
    std::vector<double> outliers;
};

// Tukey box summaries per group (groups in first-appearance order).
// Quartiles use linear interpolation between order statistics; whiskers sit
// on the most extreme points within 1.5*IQR of the quartile; points beyond
// are outliers. Empty input is an error.
std::vector<GroupBoxStats> box_stats(const std::vector<double>& values,
                                     const std::vector<std::string>& groups);

struct Histogram {
    std::size_t n = 0;
    std::vector<double> edges;    // n_bins + 1
    std::vector<double> density;  // count / (n * width); areas sum to 1
};

// Equal-width bins over [min, max]. All-identical values collapse to a single
// unit-width bin centered on the value.
Histogram histogram_density(const std::vector<double>& values, int n_bins);

// Linear-interpolation quantile of a sorted sample, p in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double p);

std::string cell_report_name(const GridCell& cell);

}  // namespace pedcross
