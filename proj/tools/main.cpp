// Command-line front end: generate synthetic trials, run the experiment grid
// or the feature ablation, ingest external CSVs, and train/evaluate/report on
// single configurations. Every command takes explicit seeds and records its
// resolved configuration next to its outputs, so any artifact can be rebuilt
// bit-for-bit from its provenance file.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pedcross/csv_io.hpp"
#include "pedcross/errors.hpp"
#include "pedcross/evaluation.hpp"
#include "pedcross/experiments.hpp"
#include "pedcross/features.hpp"
#include "pedcross/models.hpp"
#include "pedcross/rng.hpp"
#include "pedcross/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;  // experiment or validation failure
constexpr int kExitUsage = 2;    // usage, config, or IO error

void write_json_file(const fs::path& path, const ordered_json& j) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw pedcross::IoError("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw pedcross::IoError("failed writing '" + path.string() + "'");
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw pedcross::IoError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw pedcross::ConfigError("invalid JSON in '" + path.string() + "': " + e.what());
    }
}

struct GenerateArgs {
    std::string out = "data.csv";
    std::string config;
    std::optional<std::uint64_t> seed;
};

int cmd_generate(const GenerateArgs& args, bool verbose) {
    pedcross::GeneratorConfig config;
    if (!args.config.empty()) {
        config = pedcross::generator_config_from_json(read_json_file(args.config));
    }
    if (args.seed) config.seed = *args.seed;
    pedcross::validate(config);

    const std::vector<pedcross::Trial> trials = pedcross::generate_dataset(config);
    pedcross::write_trials_csv(trials, args.out);
    write_json_file(fs::path(args.out).string() + ".provenance.json",
                    ordered_json{{"command", "generate"},
                                 {"output", args.out},
                                 {"n_trials", trials.size()},
                                 {"config", pedcross::generator_config_to_json(config)}});
    if (verbose) {
        std::cerr << "generated " << trials.size() << " trials -> " << args.out << '\n';
    }
    std::cout << args.out << ": " << trials.size() << " trials\n";
    return kExitOk;
}

struct RunArgs {
    std::string plan;
    std::string data;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> k;
    bool dry_run = false;
};

pedcross::ExperimentPlan resolve_plan(const RunArgs& args, const std::string& default_out) {
    pedcross::ExperimentPlan plan;
    if (!args.plan.empty()) {
        plan = pedcross::plan_from_json(read_json_file(args.plan));
    } else {
        plan.grid = pedcross::headline_grid();
        plan.out_dir = default_out;
    }
    if (!args.data.empty()) {
        plan.dataset.kind = pedcross::DatasetSource::Kind::csv;
        plan.dataset.csv_path = args.data;
    }
    if (!args.out.empty()) plan.out_dir = args.out;
    if (args.seed) {
        // One flag drives both random choices: fold dealing uses the seed
        // itself, model initialization a derived stream.
        plan.cv_seed = *args.seed;
        plan.model_seed = pedcross::derive_stream_seed(*args.seed, 1);
    }
    if (args.k) plan.k = *args.k;
    return plan;
}

void print_grid(const pedcross::ExperimentPlan& plan) {
    for (const pedcross::GridCell& cell : plan.active_cells()) {
        std::cout << to_string(cell.target) << ' ' << to_string(cell.family) << ' '
                  << to_string(cell.features) << '\n';
    }
}

int report_outcome(const pedcross::RunSummary& summary, bool verbose) {
    for (const pedcross::CellOutcome& o : summary.cells) {
        if (!o.ok) {
            std::cerr << "cell " << to_string(o.cell.target) << '/' << to_string(o.cell.family)
                      << '/' << to_string(o.cell.features) << " failed: " << o.error << '\n';
        } else if (verbose) {
            std::cerr << "cell " << to_string(o.cell.target) << '/' << to_string(o.cell.family)
                      << '/' << to_string(o.cell.features) << " ok\n";
        }
    }
    std::cout << summary.cells.size() - summary.n_failed << "/" << summary.cells.size()
              << " cells succeeded\n";
    return summary.n_failed == 0 ? kExitOk : kExitFailure;
}

int cmd_run(const RunArgs& args, bool verbose) {
    const pedcross::ExperimentPlan plan = resolve_plan(args, "out/headline");
    plan.validate();
    if (args.dry_run) {
        print_grid(plan);
        return kExitOk;
    }
    const std::vector<pedcross::Trial> trials = pedcross::resolve_dataset(plan.dataset);
    return report_outcome(pedcross::run_plan(trials, plan), verbose);
}

int cmd_ablate(const RunArgs& args, bool verbose) {
    pedcross::ExperimentPlan plan = resolve_plan(args, "out/ablation");
    plan.grid = pedcross::ablation_grid();
    plan.validate();
    if (args.dry_run) {
        print_grid(plan);
        return kExitOk;
    }
    const std::vector<pedcross::Trial> trials = pedcross::resolve_dataset(plan.dataset);
    return report_outcome(pedcross::run_ablation(trials, plan), verbose);
}

struct IngestArgs {
    std::string in;
    std::string out;
    bool strict = false;
};

int cmd_ingest(const IngestArgs& args, bool verbose) {
    const pedcross::IngestResult result = pedcross::read_trials_csv(args.in);
    for (const auto& [line, reason] : result.rejects) {
        std::cerr << args.in << ":" << line << ": rejected: " << reason << '\n';
    }
    if (verbose) {
        for (const std::string& w : result.warnings) std::cerr << "warning: " << w << '\n';
    }
    pedcross::write_trials_csv(result.trials, args.out);
    write_json_file(fs::path(args.out).string() + ".provenance.json",
                    ordered_json{{"command", "ingest"},
                                 {"input", args.in},
                                 {"output", args.out},
                                 {"accepted", result.trials.size()},
                                 {"rejected", result.rejects.size()}});
    std::cout << result.trials.size() << " accepted, " << result.rejects.size()
              << " rejected\n";
    if (args.strict && !result.rejects.empty()) return kExitFailure;
    return kExitOk;
}

struct TrainArgs {
    std::string data;
    std::string target = "decision";
    std::string model = "lr";
    std::string features;
    std::string out = "model.json";
    std::uint64_t seed = 7;
};

pedcross::FeatureSetName default_features(pedcross::Target target) {
    return pedcross::full_feature_set(target);
}

int cmd_train(const TrainArgs& args, bool verbose) {
    const pedcross::Target target = pedcross::target_from_string(args.target);

    pedcross::ModelSpec spec;
    spec.family = pedcross::model_family_from_string(args.model);
    spec.task = pedcross::task_for_target(target);
    spec.rng_seed = args.seed;
    spec.validate();

    const pedcross::FeatureSetSpec features =
        args.features.empty() ? pedcross::FeatureSetSpec::make(default_features(target))
                              : pedcross::FeatureSetSpec::parse(args.features);

    const std::vector<pedcross::Trial> trials = pedcross::read_trials_csv_strict(args.data);
    const pedcross::TargetRows eligible = pedcross::extract_target(trials, target);
    if (eligible.rows.empty()) {
        throw pedcross::TrainingError("no rows carry target " + to_string(target));
    }
    std::vector<pedcross::Trial> subset;
    for (std::size_t r : eligible.rows) subset.push_back(trials[r]);

    pedcross::DesignMatrix dm = pedcross::encode(subset, features);
    std::vector<std::size_t> all_rows(dm.values.rows());
    for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;
    dm = pedcross::apply_standardizer(pedcross::fit_standardizer(dm, all_rows), dm);

    const pedcross::TrainedModel model = pedcross::train_model(spec, dm, eligible.y);
    pedcross::save_model(model, args.out);
    write_json_file(fs::path(args.out).string() + ".provenance.json",
                    ordered_json{{"command", "train"},
                                 {"data", args.data},
                                 {"target", to_string(target)},
                                 {"feature_set", to_string(features.name)},
                                 {"n_rows", eligible.rows.size()},
                                 {"spec", pedcross::model_spec_to_json(spec)}});
    if (verbose) std::cerr << "trained on " << eligible.rows.size() << " rows\n";
    std::cout << "model written to " << args.out << '\n';
    return kExitOk;
}

struct EvaluateArgs {
    std::string data;
    std::string target = "decision";
    std::string model = "lr";
    std::string features;
    std::string out;
    std::uint64_t seed = 2024;
    int k = 5;
    bool group_by_pair = false;
    bool dump_matrix = false;
};

int cmd_evaluate(const EvaluateArgs& args, bool verbose) {
    const pedcross::Target target = pedcross::target_from_string(args.target);

    pedcross::ModelSpec spec;
    spec.family = pedcross::model_family_from_string(args.model);
    spec.task = pedcross::task_for_target(target);
    spec.rng_seed = pedcross::derive_stream_seed(args.seed, 1);

    const pedcross::FeatureSetSpec features =
        args.features.empty() ? pedcross::FeatureSetSpec::make(default_features(target))
                              : pedcross::FeatureSetSpec::parse(args.features);

    const std::vector<pedcross::Trial> trials = pedcross::read_trials_csv_strict(args.data);

    pedcross::CvOptions options;
    options.k = args.k;
    options.fold_seed = args.seed;
    options.group_by_pair = args.group_by_pair;

    const pedcross::CvResult result =
        pedcross::cross_validate(trials, target, spec, features, options);

    for (const auto& [name, value] : result.report.aggregate) {
        std::cout << name << " = " << pedcross::format_double(value) << '\n';
    }
    for (const std::string& w : result.report.warnings) std::cerr << "warning: " << w << '\n';

    if (!args.out.empty()) {
        std::error_code ec;
        fs::create_directories(args.out, ec);
        if (ec) throw pedcross::IoError("cannot create '" + args.out + "'");
        const pedcross::GridCell cell{target, spec.family, features.name};
        write_json_file(fs::path(args.out) / pedcross::cell_report_name(cell),
                        pedcross::report_to_json(result.report));
        write_json_file(fs::path(args.out) / "provenance.json",
                        ordered_json{{"command", "evaluate"},
                                     {"data", args.data},
                                     {"target", to_string(target)},
                                     {"feature_set", to_string(features.name)},
                                     {"k", args.k},
                                     {"seed", args.seed},
                                     {"group_by_pair", args.group_by_pair},
                                     {"spec", pedcross::model_spec_to_json(spec)}});
        if (args.dump_matrix) {
            const pedcross::TargetRows eligible = pedcross::extract_target(trials, target);
            std::vector<pedcross::Trial> subset;
            for (std::size_t r : eligible.rows) subset.push_back(trials[r]);
            pedcross::dump_matrix_csv(pedcross::encode(subset, features),
                                      fs::path(args.out) / "design_matrix.csv");
        }
        if (verbose) std::cerr << "report written to " << args.out << '\n';
    }
    return kExitOk;
}

struct ReportArgs {
    std::string in;
};

void print_report_line(const json& j) {
    std::cout << j.at("task").get<std::string>() << ' ' << j.at("model").get<std::string>()
              << ' ' << j.at("feature_set").get<std::string>() << ':';
    for (const auto& [name, value] : j.at("aggregate").items()) {
        std::cout << ' ' << name << '=' << pedcross::format_double(value.get<double>());
    }
    std::cout << '\n';
}

int cmd_report(const ReportArgs& args) {
    const fs::path in(args.in);
    if (!fs::exists(in)) throw pedcross::IoError("no such file or directory: " + args.in);
    std::vector<fs::path> files;
    if (fs::is_directory(in)) {
        const fs::path reports = fs::exists(in / "reports") ? in / "reports" : in;
        for (const auto& entry : fs::directory_iterator(reports)) {
            if (entry.path().extension() == ".json" &&
                entry.path().filename() != "provenance.json") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(in);
    }
    if (files.empty()) throw pedcross::IoError("no report files under '" + args.in + "'");
    for (const fs::path& file : files) {
        const json j = read_json_file(file);
        if (!j.contains("aggregate")) continue;
        print_report_line(j);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pedestrian crossing-behavior prediction pipeline"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Print progress to stderr");

    GenerateArgs gen;
    CLI::App* generate = app.add_subcommand(
        "generate", "Produce a synthetic trial dataset in the domain CSV format");
    generate->add_option("-o,--out", gen.out, "Output CSV path")->capture_default_str();
    generate->add_option("-c,--config", gen.config,
                         "Generator config JSON (fields override defaults)");
    generate->add_option("-s,--seed", gen.seed, "Override the generator seed");

    RunArgs run;
    CLI::App* run_cmd = app.add_subcommand(
        "run", "Run the headline experiment grid and emit reports, tables, figure data");
    run_cmd->add_option("-p,--plan", run.plan, "Plan JSON (defaults to the headline grid)");
    run_cmd->add_option("-d,--data", run.data, "Trial CSV (overrides the plan's dataset)");
    run_cmd->add_option("-o,--out", run.out, "Output directory (overrides the plan)");
    run_cmd->add_option("-s,--seed", run.seed,
                        "Master seed: folds use it directly, models a derived stream");
    run_cmd->add_option("-k,--folds", run.k, "Cross-validation fold count");
    run_cmd->add_flag("--dry-run", run.dry_run, "Print the grid and exit without running");

    RunArgs ablate;
    CLI::App* ablate_cmd = app.add_subcommand(
        "ablate", "Run every family on the full feature set and subsets 1-4, per task");
    ablate_cmd->add_option("-p,--plan", ablate.plan, "Plan JSON (grid is replaced)");
    ablate_cmd->add_option("-d,--data", ablate.data, "Trial CSV (overrides the plan's dataset)");
    ablate_cmd->add_option("-o,--out", ablate.out, "Output directory (overrides the plan)");
    ablate_cmd->add_option("-s,--seed", ablate.seed,
                           "Master seed: folds use it directly, models a derived stream");
    ablate_cmd->add_option("-k,--folds", ablate.k, "Cross-validation fold count");
    ablate_cmd->add_flag("--dry-run", ablate.dry_run, "Print the grid and exit without running");

    IngestArgs ingest;
    CLI::App* ingest_cmd = app.add_subcommand(
        "ingest", "Validate an external CSV and re-emit it in canonical form");
    ingest_cmd->add_option("-i,--in", ingest.in, "Input CSV")->required();
    ingest_cmd->add_option("-o,--out", ingest.out, "Canonical output CSV")->required();
    ingest_cmd->add_flag("--strict", ingest.strict, "Exit 1 if any row is rejected");

    TrainArgs train;
    CLI::App* train_cmd =
        app.add_subcommand("train", "Fit one model on a full dataset and save it as JSON");
    train_cmd->add_option("-d,--data", train.data, "Trial CSV")->required();
    train_cmd->add_option("-t,--target", train.target, "decision | cit | cd")
        ->capture_default_str();
    train_cmd->add_option("-m,--model", train.model, "lr | svm_linear | rf | mlp")
        ->capture_default_str();
    train_cmd->add_option("-f,--features", train.features,
                          "Feature set (defaults to the target's full set)");
    train_cmd->add_option("-o,--out", train.out, "Model output path")->capture_default_str();
    train_cmd->add_option("-s,--seed", train.seed, "Model rng seed")->capture_default_str();

    EvaluateArgs eval;
    CLI::App* eval_cmd = app.add_subcommand(
        "evaluate", "Cross-validate one (target, model, feature set) configuration");
    eval_cmd->add_option("-d,--data", eval.data, "Trial CSV")->required();
    eval_cmd->add_option("-t,--target", eval.target, "decision | cit | cd")
        ->capture_default_str();
    eval_cmd->add_option("-m,--model", eval.model, "lr | svm_linear | rf | mlp")
        ->capture_default_str();
    eval_cmd->add_option("-f,--features", eval.features,
                         "Feature set (defaults to the target's full set)");
    eval_cmd->add_option("-o,--out", eval.out, "Directory for the report JSON (optional)");
    eval_cmd->add_option("-s,--seed", eval.seed, "Master seed")->capture_default_str();
    eval_cmd->add_option("-k,--folds", eval.k, "Fold count")->capture_default_str();
    eval_cmd->add_flag("--group-by-pair", eval.group_by_pair,
                       "Keep each participant pair's trials in one fold");
    eval_cmd->add_flag("--dump-matrix", eval.dump_matrix,
                       "Also write the encoded design matrix (needs --out)");

    ReportArgs rep;
    CLI::App* report_cmd = app.add_subcommand(
        "report", "Print aggregate metrics from stored report JSONs");
    report_cmd->add_option("-i,--in", rep.in, "Report file or output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*generate) return cmd_generate(gen, verbose);
        if (*run_cmd) return cmd_run(run, verbose);
        if (*ablate_cmd) return cmd_ablate(ablate, verbose);
        if (*ingest_cmd) return cmd_ingest(ingest, verbose);
        if (*train_cmd) return cmd_train(train, verbose);
        if (*eval_cmd) return cmd_evaluate(eval, verbose);
        if (*report_cmd) return cmd_report(rep);
    } catch (const pedcross::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const pedcross::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const pedcross::SerializationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
