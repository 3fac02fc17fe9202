#include "pedcross/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pedcross/errors.hpp"
#include "pedcross/features.hpp"
#include "pedcross/rng.hpp"

namespace pedcross {

using nlohmann::ordered_json;

std::string to_string(Target t) {
    switch (t) {
        case Target::decision: return "decision";
        case Target::cit: return "cit";
        case Target::cd: return "cd";
    }
    return "?";
}

Target target_from_string(const std::string& s) {
    if (s == "decision") return Target::decision;
    if (s == "cit") return Target::cit;
    if (s == "cd") return Target::cd;
    throw ConfigError("unknown target '" + s + "' (expected decision, cit, cd)");
}

Task task_for_target(Target t) {
    return t == Target::decision ? Task::classify : Task::regress;
}

// --- metrics -----------------------------------------------------------------

namespace {
void check_pair_sizes(std::size_t a, std::size_t b, const char* what) {
    if (a == 0) throw ShapeError(std::string(what) + ": empty input");
    if (a != b) throw ShapeError(std::string(what) + ": size mismatch");
}
}  // namespace

double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    check_pair_sizes(y_true.size(), y_pred.size(), "accuracy");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) hits += y_true[i] == y_pred[i];
    return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

double f1_score(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    check_pair_sizes(y_true.size(), y_pred.size(), "f1_score");
    double tp = 0.0, fp = 0.0, fn = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_pred[i] == 1 && y_true[i] == 1) tp += 1.0;
        if (y_pred[i] == 1 && y_true[i] == 0) fp += 1.0;
        if (y_pred[i] == 0 && y_true[i] == 1) fn += 1.0;
    }
    const double denom = 2.0 * tp + fp + fn;
    if (denom == 0.0) return 1.0;
    return 2.0 * tp / denom;
}

double mean_absolute_error(const std::vector<double>& y_true,
                           const std::vector<double>& y_pred) {
    check_pair_sizes(y_true.size(), y_pred.size(), "mean_absolute_error");
    double sum = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) sum += std::abs(y_true[i] - y_pred[i]);
    return sum / static_cast<double>(y_true.size());
}

double root_mean_squared_error(const std::vector<double>& y_true,
                               const std::vector<double>& y_pred) {
    check_pair_sizes(y_true.size(), y_pred.size(), "root_mean_squared_error");
    double sum = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double e = y_true[i] - y_pred[i];
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(y_true.size()));
}

// --- folds -------------------------------------------------------------------

std::vector<std::size_t> FoldPlan::test_rows(int fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] == fold) rows.push_back(i);
    }
    return rows;
}

std::vector<std::size_t> FoldPlan::train_rows(int fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] != fold) rows.push_back(i);
    }
    return rows;
}

FoldPlan make_folds(std::size_t n, int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("make_folds: k must be >= 2");
    if (static_cast<std::size_t>(k) > n) throw ConfigError("make_folds: k exceeds row count");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    FoldPlan plan;
    plan.k = k;
    plan.assignment.assign(n, 0);
    for (std::size_t pos = 0; pos < n; ++pos) {
        plan.assignment[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
    }
    return plan;
}

FoldPlan make_grouped_folds(const std::vector<std::string>& group_keys, int k,
                            std::uint64_t seed) {
    if (k < 2) throw ConfigError("make_grouped_folds: k must be >= 2");
    std::vector<std::string> groups(group_keys);
    std::sort(groups.begin(), groups.end());
    groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
    if (static_cast<std::size_t>(k) > groups.size()) {
        throw ConfigError("make_grouped_folds: k exceeds group count");
    }

    Rng rng(seed);
    rng.shuffle(groups);
    std::map<std::string, int> fold_of;
    for (std::size_t pos = 0; pos < groups.size(); ++pos) {
        fold_of[groups[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
    }

    FoldPlan plan;
    plan.k = k;
    plan.assignment.reserve(group_keys.size());
    for (const std::string& key : group_keys) plan.assignment.push_back(fold_of.at(key));
    return plan;
}

// --- cross-validation ----------------------------------------------------------

TargetRows extract_target(const std::vector<Trial>& trials, Target target) {
    TargetRows out;
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const Trial& t = trials[i];
        switch (target) {
            case Target::decision:
                out.rows.push_back(i);
                out.y.push_back(static_cast<double>(t.outcome.decision));
                break;
            case Target::cit:
                if (t.outcome.decision == 1 && t.outcome.cit) {
                    out.rows.push_back(i);
                    out.y.push_back(*t.outcome.cit);
                }
                break;
            case Target::cd:
                if (t.outcome.decision == 1 && t.outcome.cd) {
                    out.rows.push_back(i);
                    out.y.push_back(*t.outcome.cd);
                }
                break;
        }
    }
    return out;
}

namespace {

MetricMap compute_metrics(Task task, const std::vector<double>& y_true,
                          const std::vector<double>& scores, double threshold) {
    MetricMap m;
    if (task == Task::classify) {
        std::vector<int> t(y_true.size()), p(scores.size());
        for (std::size_t i = 0; i < y_true.size(); ++i) {
            t[i] = y_true[i] > 0.5 ? 1 : 0;
            p[i] = scores[i] > threshold ? 1 : 0;
        }
        m["acc"] = accuracy(t, p);
        m["f1"] = f1_score(t, p);
    } else {
        m["mae"] = mean_absolute_error(y_true, scores);
        m["rmse"] = root_mean_squared_error(y_true, scores);
    }
    return m;
}

std::vector<std::pair<std::string, double>> mean_importance(
    const std::vector<TrainedModel>& fold_models) {
    if (fold_models.empty() || fold_models.front().spec.family == ModelFamily::mlp) return {};
    std::vector<std::string> order;
    std::map<std::string, double> sums;
    for (const TrainedModel& m : fold_models) {
        for (const auto& [name, value] : feature_importance(m)) {
            if (!sums.count(name)) order.push_back(name);
            sums[name] += value;
        }
    }
    std::vector<std::pair<std::string, double>> out;
    out.reserve(order.size());
    for (const std::string& name : order) {
        out.emplace_back(name, sums[name] / static_cast<double>(fold_models.size()));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

}  // namespace

CvResult cross_validate(const std::vector<Trial>& trials, Target target, const ModelSpec& spec,
                        const FeatureSetSpec& features, const CvOptions& options) {
    spec.validate();
    if (spec.task != task_for_target(target)) {
        throw ConfigError("model task does not match target " + to_string(target));
    }

    const TargetRows eligible = extract_target(trials, target);
    if (eligible.rows.empty()) {
        throw TrainingError("cross_validate: no rows carry target " + to_string(target));
    }

    std::vector<Trial> subset;
    subset.reserve(eligible.rows.size());
    for (std::size_t r : eligible.rows) subset.push_back(trials[r]);

    FoldPlan plan;
    if (options.group_by_pair) {
        std::vector<std::string> keys;
        keys.reserve(subset.size());
        for (const Trial& t : subset) keys.push_back(t.pair_id);
        plan = make_grouped_folds(keys, options.k, options.fold_seed);
    } else {
        plan = make_folds(subset.size(), options.k, options.fold_seed);
    }

    const DesignMatrix dm = encode(subset, features);

    CvResult result;
    CvReport& report = result.report;
    report.task = to_string(target);
    report.model = to_string(spec.family);
    report.feature_set = to_string(features.name);
    report.k = options.k;
    report.fold_seed = options.fold_seed;
    report.model_seed = spec.rng_seed;
    report.n_rows = subset.size();
    for (const Trial& t : subset) report.n_positive += t.outcome.decision == 1;

    result.oof.trial_rows.assign(subset.size(), 0);
    result.oof.y.assign(subset.size(), 0.0);
    result.oof.score.assign(subset.size(), 0.0);
    result.oof.fold.assign(subset.size(), -1);

    for (int fold = 0; fold < options.k; ++fold) {
        const std::vector<std::size_t> train = plan.train_rows(fold);
        const std::vector<std::size_t> test = plan.test_rows(fold);

        const Standardizer scaler = fit_standardizer(dm, train);
        const DesignMatrix scaled = apply_standardizer(scaler, dm);
        const DesignMatrix train_dm = select_rows(scaled, train);
        const DesignMatrix test_dm = select_rows(scaled, test);

        std::vector<double> y_train(train.size()), y_test(test.size());
        for (std::size_t i = 0; i < train.size(); ++i) y_train[i] = eligible.y[train[i]];
        for (std::size_t i = 0; i < test.size(); ++i) y_test[i] = eligible.y[test[i]];

        if (spec.task == Task::classify) {
            const bool any0 = std::any_of(y_train.begin(), y_train.end(),
                                          [](double v) { return v < 0.5; });
            const bool any1 = std::any_of(y_train.begin(), y_train.end(),
                                          [](double v) { return v > 0.5; });
            if (!any0 || !any1) {
                report.warnings.push_back("fold " + std::to_string(fold) +
                                          ": training split contains a single class");
            }
        }

        ModelSpec fold_spec = spec;
        fold_spec.rng_seed = derive_stream_seed(spec.rng_seed, static_cast<std::uint64_t>(fold));
        TrainedModel model = train_model(fold_spec, train_dm, y_train);
        const std::vector<double> scores = predict(model, test_dm);

        FoldMetrics fm;
        fm.fold = fold;
        fm.n_train = train.size();
        fm.n_test = test.size();
        fm.metrics = compute_metrics(spec.task, y_test, scores, options.threshold);
        report.per_fold.push_back(fm);

        for (std::size_t i = 0; i < test.size(); ++i) {
            const std::size_t row = test[i];
            result.oof.trial_rows[row] = eligible.rows[row];
            result.oof.y[row] = eligible.y[row];
            result.oof.score[row] = scores[i];
            result.oof.fold[row] = fold;
        }
        result.fold_models.push_back(std::move(model));
    }

    for (const FoldMetrics& fm : report.per_fold) {
        for (const auto& [name, value] : fm.metrics) report.aggregate[name] += value;
    }
    for (auto& [name, value] : report.aggregate) value /= static_cast<double>(options.k);

    // Pooled strata: by crossing location, then everything.
    auto stratum = [&](const std::string& name, auto&& keep) {
        std::vector<double> y, s;
        for (std::size_t i = 0; i < subset.size(); ++i) {
            if (keep(subset[i])) {
                y.push_back(result.oof.y[i]);
                s.push_back(result.oof.score[i]);
            }
        }
        if (y.empty()) return;
        StratumMetrics sm;
        sm.name = name;
        sm.n = y.size();
        sm.metrics = compute_metrics(spec.task, y, s, options.threshold);
        report.strata.push_back(std::move(sm));
    };
    stratum("zebra", [](const Trial& t) { return t.location == Location::zebra; });
    stratum("non_zebra", [](const Trial& t) { return t.location == Location::non_zebra; });
    stratum("total", [](const Trial&) { return true; });

    std::set<double> ttas;
    for (const Trial& t : subset) ttas.insert(t.tta);
    for (double tta : ttas) {
        std::vector<double> y, s;
        for (std::size_t i = 0; i < subset.size(); ++i) {
            if (subset[i].tta == tta) {
                y.push_back(result.oof.y[i]);
                s.push_back(result.oof.score[i]);
            }
        }
        TtaMetrics tm;
        tm.tta = tta;
        tm.n = y.size();
        tm.metrics = compute_metrics(spec.task, y, s, options.threshold);
        report.by_tta.push_back(std::move(tm));
    }

    report.importance = mean_importance(result.fold_models);
    return result;
}

nlohmann::ordered_json report_to_json(const CvReport& report) {
    ordered_json per_fold = ordered_json::array();
    for (const FoldMetrics& fm : report.per_fold) {
        ordered_json j{{"fold", fm.fold}, {"n_train", fm.n_train}, {"n_test", fm.n_test}};
        for (const auto& [name, value] : fm.metrics) j[name] = value;
        per_fold.push_back(std::move(j));
    }
    ordered_json strata;
    for (const StratumMetrics& sm : report.strata) {
        ordered_json j{{"n", sm.n}};
        for (const auto& [name, value] : sm.metrics) j[name] = value;
        strata[sm.name] = std::move(j);
    }
    ordered_json by_tta = ordered_json::array();
    for (const TtaMetrics& tm : report.by_tta) {
        ordered_json j{{"tta", tm.tta}, {"n", tm.n}};
        for (const auto& [name, value] : tm.metrics) j[name] = value;
        by_tta.push_back(std::move(j));
    }
    ordered_json importance = ordered_json::array();
    for (const auto& [name, value] : report.importance) {
        importance.push_back(ordered_json{{"feature", name}, {"importance", value}});
    }
    ordered_json aggregate;
    for (const auto& [name, value] : report.aggregate) aggregate[name] = value;

    return ordered_json{{"task", report.task},
                        {"model", report.model},
                        {"feature_set", report.feature_set},
                        {"k", report.k},
                        {"seed", report.fold_seed},
                        {"model_seed", report.model_seed},
                        {"n", report.n_rows},
                        {"n_positive", report.n_positive},
                        {"aggregate", std::move(aggregate)},
                        {"per_fold", std::move(per_fold)},
                        {"strata", std::move(strata)},
                        {"by_tta", std::move(by_tta)},
                        {"importance", std::move(importance)},
                        {"warnings", report.warnings}};
}

}  // namespace pedcross
