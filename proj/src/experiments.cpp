#include "pedcross/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <thread>

#include "pedcross/csv_io.hpp"
#include "pedcross/errors.hpp"

namespace pedcross {

using nlohmann::json;
using nlohmann::ordered_json;

namespace fs = std::filesystem;

// --- plan ---------------------------------------------------------------------

std::vector<GridCell> ExperimentPlan::active_cells() const {
    const std::vector<GridCell> cells = grid.empty() ? headline_grid() : grid;
    std::vector<GridCell> active;
    for (const GridCell& cell : cells) {
        if (std::find(tasks.begin(), tasks.end(), cell.target) != tasks.end()) {
            active.push_back(cell);
        }
    }
    return active;
}

void ExperimentPlan::validate() const {
    if (k < 2) throw ConfigError("plan: k must be >= 2");
    if (tasks.empty()) throw ConfigError("plan: tasks is empty");
    const std::vector<GridCell> cells = grid.empty() ? headline_grid() : grid;
    for (const GridCell& cell : cells) {
        if (cell.family == ModelFamily::svm_linear && cell.target != Target::decision) {
            throw ConfigError("plan: svm_linear is restricted to the decision target");
        }
    }
    if (active_cells().empty()) throw ConfigError("plan: no grid cell matches the task list");
}

std::vector<GridCell> headline_grid() {
    using T = Target;
    using M = ModelFamily;
    using F = FeatureSetName;
    return {
        {T::decision, M::lr, F::baseline},
        {T::decision, M::lr, F::ours},
        {T::decision, M::svm_linear, F::ours},
        {T::decision, M::rf, F::ours},
        {T::decision, M::mlp, F::ours},
        {T::cit, M::lr, F::baseline},
        {T::cit, M::rf, F::ours_delta},
        {T::cit, M::mlp, F::ours_delta},
        {T::cd, M::lr, F::baseline},
        {T::cd, M::rf, F::ours},
        {T::cd, M::mlp, F::ours},
    };
}

FeatureSetName full_feature_set(Target target) {
    switch (target) {
        case Target::decision: return FeatureSetName::ours;
        case Target::cit: return FeatureSetName::ours_delta;
        case Target::cd: return FeatureSetName::ours;
    }
    return FeatureSetName::ours;
}

std::vector<GridCell> ablation_grid() {
    std::vector<GridCell> cells;
    const std::vector<Target> targets = {Target::decision, Target::cit, Target::cd};
    const std::vector<ModelFamily> families = {ModelFamily::lr, ModelFamily::rf,
                                               ModelFamily::mlp};
    const std::vector<FeatureSetName> subsets = {FeatureSetName::subset1, FeatureSetName::subset2,
                                                 FeatureSetName::subset3, FeatureSetName::subset4};
    for (Target target : targets) {
        for (ModelFamily family : families) {
            cells.push_back({target, family, full_feature_set(target)});
            for (FeatureSetName subset : subsets) cells.push_back({target, family, subset});
        }
    }
    return cells;
}

ordered_json plan_to_json(const ExperimentPlan& plan) {
    ordered_json dataset;
    if (plan.dataset.kind == DatasetSource::Kind::generated) {
        dataset = ordered_json{{"kind", "generated"},
                               {"generator", generator_config_to_json(plan.dataset.generator)}};
    } else {
        dataset = ordered_json{{"kind", "csv"}, {"path", plan.dataset.csv_path.string()}};
    }
    ordered_json tasks = ordered_json::array();
    for (Target t : plan.tasks) tasks.push_back(to_string(t));
    ordered_json grid = ordered_json::array();
    for (const GridCell& cell : plan.grid) {
        grid.push_back(ordered_json{{"target", to_string(cell.target)},
                                    {"family", to_string(cell.family)},
                                    {"features", to_string(cell.features)}});
    }
    return ordered_json{{"format_version", 1},
                        {"dataset", std::move(dataset)},
                        {"tasks", std::move(tasks)},
                        {"grid", std::move(grid)},
                        {"k", plan.k},
                        {"cv_seed", plan.cv_seed},
                        {"model_seed", plan.model_seed},
                        {"out_dir", plan.out_dir.string()}};
}

ExperimentPlan plan_from_json(const json& j) {
    ExperimentPlan plan;
    try {
        if (!j.is_object()) throw ConfigError("plan must be a JSON object");
        const int version = j.value("format_version", 1);
        if (version != 1) {
            throw ConfigError("unsupported plan format_version " + std::to_string(version));
        }
        if (j.contains("dataset")) {
            const json& jd = j.at("dataset");
            const std::string kind = jd.value("kind", "generated");
            if (kind == "generated") {
                plan.dataset.kind = DatasetSource::Kind::generated;
                if (jd.contains("generator")) {
                    plan.dataset.generator = generator_config_from_json(jd.at("generator"));
                }
            } else if (kind == "csv") {
                plan.dataset.kind = DatasetSource::Kind::csv;
                plan.dataset.csv_path = jd.at("path").get<std::string>();
            } else {
                throw ConfigError("dataset.kind must be 'generated' or 'csv'");
            }
        }
        if (j.contains("tasks")) {
            plan.tasks.clear();
            for (const json& jt : j.at("tasks")) {
                plan.tasks.push_back(target_from_string(jt.get<std::string>()));
            }
        }
        if (j.contains("grid")) {
            for (const json& jc : j.at("grid")) {
                GridCell cell;
                cell.target = target_from_string(jc.at("target").get<std::string>());
                cell.family = model_family_from_string(jc.at("family").get<std::string>());
                cell.features = FeatureSetSpec::parse(jc.at("features").get<std::string>()).name;
                plan.grid.push_back(cell);
            }
        }
        plan.k = j.value("k", plan.k);
        plan.cv_seed = j.value("cv_seed", plan.cv_seed);
        plan.model_seed = j.value("model_seed", plan.model_seed);
        if (j.contains("out_dir")) plan.out_dir = j.at("out_dir").get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid plan file: ") + e.what());
    }
    if (plan.grid.empty()) plan.grid = headline_grid();
    return plan;
}

std::vector<Trial> resolve_dataset(const DatasetSource& source) {
    if (source.kind == DatasetSource::Kind::generated) {
        return generate_dataset(source.generator);
    }
    return read_trials_csv_strict(source.csv_path);
}

// --- cell execution -------------------------------------------------------------

std::string cell_report_name(const GridCell& cell) {
    return to_string(cell.target) + "_" + to_string(cell.family) + "_" +
           to_string(cell.features) + ".json";
}

namespace {

CellOutcome run_cell(const std::vector<Trial>& trials, const ExperimentPlan& plan,
                     const GridCell& cell) {
    CellOutcome outcome;
    outcome.cell = cell;
    try {
        ModelSpec spec;
        spec.family = cell.family;
        spec.task = task_for_target(cell.target);
        spec.rng_seed = plan.model_seed;

        CvOptions options;
        options.k = plan.k;
        options.fold_seed = plan.cv_seed;

        CvResult result = cross_validate(trials, cell.target, spec,
                                         FeatureSetSpec::make(cell.features), options);
        outcome.report = std::move(result.report);
        outcome.oof = std::move(result.oof);
        outcome.report_file = "reports/" + cell_report_name(cell);
        outcome.ok = true;
    } catch (const std::exception& e) {
        outcome.ok = false;
        outcome.error = e.what();
    }
    return outcome;
}

std::vector<CellOutcome> execute_cells(const std::vector<Trial>& trials,
                                       const ExperimentPlan& plan,
                                       const std::vector<GridCell>& cells) {
    std::vector<CellOutcome> outcomes(cells.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
            outcomes[i] = run_cell(trials, plan, cells[i]);
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_workers =
        std::min({hw, 8u, static_cast<unsigned>(cells.size())});
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    return outcomes;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_json_file(const fs::path& path, const ordered_json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::string metric_or_empty(const MetricMap& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? std::string() : format_double(it->second);
}

const CellOutcome* find_outcome(const std::vector<CellOutcome>& outcomes, Target target,
                                ModelFamily family, FeatureSetName features) {
    for (const CellOutcome& o : outcomes) {
        if (o.cell == GridCell{target, family, features}) return &o;
    }
    return nullptr;
}

const StratumMetrics* find_stratum(const CvReport& report, const std::string& name) {
    for (const StratumMetrics& s : report.strata) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

// Decision summary with one row per decision cell, in grid order, shaped
// like the headline comparison table: ACC/F1 at zebra sites, at non-zebra
// sites, and overall.
void write_decision_table(const fs::path& path, const std::vector<CellOutcome>& outcomes) {
    std::string csv = "method,zebra_acc,zebra_f1,non_zebra_acc,non_zebra_f1,total_acc,total_f1\n";
    bool any = false;
    for (const CellOutcome& o : outcomes) {
        if (o.cell.target != Target::decision || !o.ok) continue;
        any = true;
        csv += to_string(o.cell.family) + "_" + to_string(o.cell.features);
        for (const char* stratum : {"zebra", "non_zebra", "total"}) {
            const StratumMetrics* s = find_stratum(o.report, stratum);
            csv += ',' + (s ? metric_or_empty(s->metrics, "acc") : std::string());
            csv += ',' + (s ? metric_or_empty(s->metrics, "f1") : std::string());
        }
        csv += '\n';
    }
    if (any) write_text_file(path, csv);
}

void write_by_tta_figures(const fs::path& dir, const std::vector<CellOutcome>& outcomes,
                          const std::vector<Target>& tasks) {
    for (Target target : tasks) {
        const std::string metric = target == Target::decision ? "acc" : "mae";
        std::vector<double> ttas;
        ordered_json series = ordered_json::array();
        for (const CellOutcome& o : outcomes) {
            if (o.cell.target != target || !o.ok) continue;
            if (ttas.empty()) {
                for (const TtaMetrics& tm : o.report.by_tta) ttas.push_back(tm.tta);
            }
            std::vector<double> values;
            for (const TtaMetrics& tm : o.report.by_tta) values.push_back(tm.metrics.at(metric));
            series.push_back(ordered_json{
                {"name", to_string(o.cell.family) + "_" + to_string(o.cell.features)},
                {"values", values}});
        }
        if (series.empty()) continue;
        write_json_file(dir / (to_string(target) + "_by_tta.json"),
                        ordered_json{{"kind", "by_tta_curve"},
                                     {"target", to_string(target)},
                                     {"metric", metric},
                                     {"tta", ttas},
                                     {"series", std::move(series)}});
    }
}

ordered_json box_group_to_json(const GroupBoxStats& g) {
    return ordered_json{{"group", g.group},
                        {"n", g.n},
                        {"median", g.median},
                        {"q1", g.q1},
                        {"q3", g.q3},
                        {"whisker_low", g.whisker_low},
                        {"whisker_high", g.whisker_high},
                        {"outliers", g.outliers}};
}

// Ground-truth CIT/CD distributions split by crossing location.
void write_box_figures(const fs::path& dir, const std::vector<Trial>& trials,
                       const std::vector<Target>& tasks) {
    for (Target target : {Target::cit, Target::cd}) {
        if (std::find(tasks.begin(), tasks.end(), target) == tasks.end()) continue;
        std::vector<double> values;
        std::vector<std::string> groups;
        for (Location loc : {Location::zebra, Location::non_zebra}) {
            for (const Trial& t : trials) {
                if (t.location != loc || t.outcome.decision != 1) continue;
                const std::optional<double>& v =
                    target == Target::cit ? t.outcome.cit : t.outcome.cd;
                if (!v) continue;
                values.push_back(*v);
                groups.push_back(to_string(loc));
            }
        }
        if (values.empty()) continue;
        ordered_json jgroups = ordered_json::array();
        for (const GroupBoxStats& g : box_stats(values, groups)) {
            jgroups.push_back(box_group_to_json(g));
        }
        write_json_file(dir / (to_string(target) + "_box_stats.json"),
                        ordered_json{{"kind", "box_stats"},
                                     {"target", to_string(target)},
                                     {"source", "ground_truth"},
                                     {"groups", std::move(jgroups)}});
    }
}

ordered_json histogram_to_json(const Histogram& h) {
    return ordered_json{{"n", h.n}, {"edges", h.edges}, {"density", h.density}};
}

// Out-of-fold predicted distributions next to the ground truth they chase.
void write_histogram_figures(const fs::path& dir, const std::vector<CellOutcome>& outcomes) {
    constexpr int kBins = 20;
    for (const CellOutcome& o : outcomes) {
        if (o.cell.target == Target::decision || !o.ok) continue;
        const std::string name = to_string(o.cell.target) + "_hist_" +
                                 to_string(o.cell.family) + "_" +
                                 to_string(o.cell.features) + ".json";
        write_json_file(dir / name,
                        ordered_json{{"kind", "histogram"},
                                     {"target", to_string(o.cell.target)},
                                     {"family", to_string(o.cell.family)},
                                     {"feature_set", to_string(o.cell.features)},
                                     {"ground_truth", histogram_to_json(
                                                          histogram_density(o.oof.y, kBins))},
                                     {"predicted", histogram_to_json(
                                                       histogram_density(o.oof.score, kBins))}});
    }
}

void write_ablation_tables(const fs::path& dir, const std::vector<CellOutcome>& outcomes,
                           const std::vector<Target>& tasks) {
    const std::vector<ModelFamily> families = {ModelFamily::lr, ModelFamily::rf,
                                               ModelFamily::mlp};
    for (Target target : tasks) {
        const bool classify = target == Target::decision;
        const std::vector<std::string> metrics =
            classify ? std::vector<std::string>{"acc", "f1"}
                     : std::vector<std::string>{"mae", "rmse"};

        std::string csv = "features";
        for (ModelFamily family : families) {
            for (const std::string& metric : metrics) {
                csv += ',' + to_string(family) + "_" + metric;
            }
        }
        csv += '\n';

        struct Row {
            std::string label;
            FeatureSetName features;
        };
        const std::vector<Row> rows = {{"all", full_feature_set(target)},
                                       {"subset1", FeatureSetName::subset1},
                                       {"subset2", FeatureSetName::subset2},
                                       {"subset3", FeatureSetName::subset3},
                                       {"subset4", FeatureSetName::subset4}};
        for (const Row& row : rows) {
            csv += row.label;
            for (ModelFamily family : families) {
                const CellOutcome* o = find_outcome(outcomes, target, family, row.features);
                for (const std::string& metric : metrics) {
                    csv += ',';
                    if (o && o->ok) csv += metric_or_empty(o->report.aggregate, metric);
                }
            }
            csv += '\n';
        }
        write_text_file(dir / (to_string(target) + "_ablation.csv"), csv);
    }
}

void write_reports(const fs::path& out_dir, const std::vector<CellOutcome>& outcomes) {
    for (const CellOutcome& o : outcomes) {
        if (o.ok) write_json_file(out_dir / o.report_file, report_to_json(o.report));
    }
}

void write_provenance(const fs::path& out_dir, const ExperimentPlan& plan,
                      const std::vector<Trial>& trials,
                      const std::vector<CellOutcome>& outcomes) {
    std::size_t n_crossing = 0;
    for (const Trial& t : trials) n_crossing += t.outcome.decision == 1;
    ordered_json cells = ordered_json::array();
    for (const CellOutcome& o : outcomes) {
        ordered_json jc{{"target", to_string(o.cell.target)},
                        {"family", to_string(o.cell.family)},
                        {"features", to_string(o.cell.features)},
                        {"ok", o.ok}};
        if (o.ok) {
            jc["report"] = o.report_file;
        } else {
            jc["error"] = o.error;
        }
        cells.push_back(std::move(jc));
    }
    // The output directory is not recorded: the same plan run into two
    // different directories should leave byte-identical artifacts.
    ordered_json plan_json = plan_to_json(plan);
    plan_json.erase("out_dir");
    write_json_file(out_dir / "provenance.json",
                    ordered_json{{"plan", std::move(plan_json)},
                                 {"dataset", ordered_json{{"n_trials", trials.size()},
                                                          {"n_crossing", n_crossing}}},
                                 {"cells", std::move(cells)}});
}

RunSummary finish(std::vector<CellOutcome> outcomes) {
    RunSummary summary;
    summary.n_failed = 0;
    for (const CellOutcome& o : outcomes) summary.n_failed += !o.ok;
    summary.cells = std::move(outcomes);
    return summary;
}

void prepare_dirs(const fs::path& out_dir, bool figures) {
    std::error_code ec;
    fs::create_directories(out_dir / "reports", ec);
    if (ec) throw IoError("cannot create '" + (out_dir / "reports").string() + "'");
    fs::create_directories(out_dir / "tables", ec);
    if (ec) throw IoError("cannot create '" + (out_dir / "tables").string() + "'");
    if (figures) {
        fs::create_directories(out_dir / "figures", ec);
        if (ec) throw IoError("cannot create '" + (out_dir / "figures").string() + "'");
    }
}

}  // namespace

RunSummary run_plan(const std::vector<Trial>& trials, const ExperimentPlan& plan) {
    plan.validate();
    prepare_dirs(plan.out_dir, true);
    std::vector<CellOutcome> outcomes = execute_cells(trials, plan, plan.active_cells());

    write_reports(plan.out_dir, outcomes);
    write_decision_table(plan.out_dir / "tables" / "decision_table.csv", outcomes);
    write_by_tta_figures(plan.out_dir / "figures", outcomes, plan.tasks);
    write_box_figures(plan.out_dir / "figures", trials, plan.tasks);
    write_histogram_figures(plan.out_dir / "figures", outcomes);
    write_provenance(plan.out_dir, plan, trials, outcomes);
    return finish(std::move(outcomes));
}

RunSummary run_ablation(const std::vector<Trial>& trials, const ExperimentPlan& plan) {
    ExperimentPlan ablation = plan;
    ablation.grid = ablation_grid();
    ablation.validate();
    prepare_dirs(ablation.out_dir, false);
    std::vector<CellOutcome> outcomes = execute_cells(trials, ablation, ablation.active_cells());

    write_reports(ablation.out_dir, outcomes);
    write_ablation_tables(ablation.out_dir / "tables", outcomes, ablation.tasks);
    write_provenance(ablation.out_dir, ablation, trials, outcomes);
    return finish(std::move(outcomes));
}

// --- figure math ---------------------------------------------------------------

double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw ShapeError("quantile_sorted: empty input");
    if (p < 0.0 || p > 1.0) throw ConfigError("quantile_sorted: p outside [0, 1]");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<GroupBoxStats> box_stats(const std::vector<double>& values,
                                     const std::vector<std::string>& groups) {
    if (values.empty()) throw ShapeError("box_stats: empty input");
    if (values.size() != groups.size()) throw ShapeError("box_stats: size mismatch");

    std::vector<std::string> order;
    for (const std::string& g : groups) {
        if (std::find(order.begin(), order.end(), g) == order.end()) order.push_back(g);
    }

    std::vector<GroupBoxStats> out;
    out.reserve(order.size());
    for (const std::string& name : order) {
        std::vector<double> v;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (groups[i] == name) v.push_back(values[i]);
        }
        std::sort(v.begin(), v.end());

        GroupBoxStats g;
        g.group = name;
        g.n = v.size();
        g.q1 = quantile_sorted(v, 0.25);
        g.median = quantile_sorted(v, 0.5);
        g.q3 = quantile_sorted(v, 0.75);
        const double iqr = g.q3 - g.q1;
        const double lo_fence = g.q1 - 1.5 * iqr;
        const double hi_fence = g.q3 + 1.5 * iqr;
        g.whisker_low = g.q1;
        g.whisker_high = g.q3;
        for (double x : v) {
            if (x >= lo_fence) {
                g.whisker_low = x;
                break;
            }
        }
        for (auto it = v.rbegin(); it != v.rend(); ++it) {
            if (*it <= hi_fence) {
                g.whisker_high = *it;
                break;
            }
        }
        for (double x : v) {
            if (x < lo_fence || x > hi_fence) g.outliers.push_back(x);
        }
        out.push_back(std::move(g));
    }
    return out;
}

Histogram histogram_density(const std::vector<double>& values, int n_bins) {
    if (values.empty()) throw ShapeError("histogram_density: empty input");
    if (n_bins < 1) throw ConfigError("histogram_density: n_bins must be >= 1");

    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;

    Histogram h;
    h.n = values.size();
    if (lo == hi) {
        h.edges = {lo - 0.5, lo + 0.5};
        h.density = {1.0};
        return h;
    }

    const double width = (hi - lo) / static_cast<double>(n_bins);
    h.edges.resize(static_cast<std::size_t>(n_bins) + 1);
    for (int b = 0; b <= n_bins; ++b) {
        h.edges[static_cast<std::size_t>(b)] = lo + width * static_cast<double>(b);
    }
    h.edges.back() = hi;

    std::vector<std::size_t> counts(static_cast<std::size_t>(n_bins), 0);
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        if (b >= counts.size()) b = counts.size() - 1;
        ++counts[b];
    }
    h.density.resize(counts.size());
    for (std::size_t b = 0; b < counts.size(); ++b) {
        h.density[b] = static_cast<double>(counts[b]) /
                       (static_cast<double>(h.n) * width);
    }
    return h;
}

}  // namespace pedcross
