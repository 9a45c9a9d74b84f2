#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bmw/analysis.hpp"
#include "bmw/csv.hpp"
#include "bmw/dataset.hpp"
#include "bmw/design.hpp"
#include "bmw/diagnostics.hpp"
#include "bmw/errors.hpp"
#include "bmw/propensity.hpp"
#include "bmw/report_io.hpp"
#include "bmw/scaling.hpp"
#include "bmw/simbench.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t pos = text.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

// --features omitted means every column except id, target and any explicitly
// reserved ones (before/after in analyze).
std::vector<std::string> choose_features(const bmw::SubjectTable& table,
                                         const std::string& features_flag,
                                         const std::vector<std::string>& reserved = {}) {
  if (!features_flag.empty()) return split_list(features_flag);
  std::vector<std::string> out;
  for (const std::string& name : table.feature_names) {
    bool is_reserved = false;
    for (const std::string& r : reserved) is_reserved = is_reserved || name == r;
    if (!is_reserved) out.push_back(name);
  }
  return out;
}

void print_warnings(const bmw::ValidationReport& report) {
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
}

void write_output(const fs::path& path, const std::string& content) {
  bmw::write_file_atomic(path.string(), content);
  std::cout << "wrote " << path.string() << "\n";
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json optional_string(const std::optional<std::string>& value) {
  return value ? json(*value) : json(nullptr);
}

struct CommonOpts {
  std::string input;
  std::string features;  // comma list, empty = all
  std::string target;    // empty = none
  std::uint64_t seed = 0;
  double ridge = 1e-6;
  int threads = 1;
  std::string out_dir = ".";

  std::optional<std::string> target_or_none() const {
    return target.empty() ? std::nullopt : std::optional<std::string>(target);
  }
  bmw::FitConfig fit_config() const {
    bmw::FitConfig fit;
    fit.ridge_lambda = ridge;
    return fit;
  }
};

// Loads the table, picks features and runs validation; shared by every
// CSV-consuming command.
struct LoadedInput {
  bmw::SubjectTable table;
  std::vector<std::string> features;
};

LoadedInput load_input(const CommonOpts& opts, const std::vector<std::string>& reserved = {}) {
  LoadedInput in;
  in.table = bmw::load_subject_table(opts.input, opts.target_or_none());
  in.features = choose_features(in.table, opts.features, reserved);
  bmw::ValidationReport report =
      bmw::validate_for_design(in.table, in.features, opts.target_or_none());
  print_warnings(report);
  bmw::require_valid(report);
  return in;
}

json common_echo(const CommonOpts& opts, const std::vector<std::string>& features) {
  return json{{"input", opts.input},
              {"features", features},
              {"target", optional_string(opts.target_or_none())},
              {"seed", opts.seed},
              {"ridge", opts.ridge}};
}

int run_design(const CommonOpts& opts, int repetitions) {
  LoadedInput in = load_input(opts);

  bmw::DesignConfig config;
  config.repetitions = repetitions;
  config.master_seed = opts.seed;
  config.threads = opts.threads;
  config.fit = opts.fit_config();
  bmw::DesignOutcome outcome = bmw::run_bmw(in.table, in.features, config);

  bmw::BalanceTable balance =
      bmw::balance_table(in.table, in.features, outcome.best.assignment, outcome.best.fit);

  json echo = common_echo(opts, in.features);
  echo["M"] = repetitions;

  fs::path out_dir(opts.out_dir);
  write_output(out_dir / "assignment.csv",
               bmw::assignment_csv(in.table, outcome.best.assignment));
  write_output(out_dir / "design_report.json",
               dump(bmw::design_report_json(outcome, in.table, balance, echo)));
  std::cout << "best repetition m=" << outcome.best.m << " delta_k=" << outcome.best.delta_k
            << " mean_abs_smd=" << bmw::mean_abs_smd(balance) << "\n";
  return 0;
}

int run_sweep(const CommonOpts& opts, const std::string& grid_flag, double epsilon) {
  LoadedInput in = load_input(opts);
  std::vector<int> grid =
      grid_flag.empty() ? bmw::default_m_grid() : bmw::parse_m_grid(grid_flag);

  bmw::SweepConfig config;
  config.master_seed = opts.seed;
  config.threads = opts.threads;
  config.epsilon = epsilon;
  config.fit = opts.fit_config();
  bmw::SweepResult sweep = bmw::sweep_M(in.table, in.features, grid, config);

  fs::path out_dir(opts.out_dir);
  write_output(out_dir / "sweep.csv", bmw::sweep_csv(sweep));
  json report = bmw::sweep_json(sweep, epsilon);
  report["config"] = common_echo(opts, in.features);
  write_output(out_dir / "sweep.json", dump(report));
  if (sweep.elbow)
    std::cout << "elbow at M=" << *sweep.elbow << "\n";
  else
    std::cout << "no elbow within the grid (still improving at its end)\n";
  return 0;
}

int run_diagnose(const CommonOpts& opts, const std::string& assignment_path,
                 const std::string& experiment_path, double smd_threshold, int kde_grid) {
  LoadedInput in = load_input(opts);
  bmw::AssignmentVector assignment =
      bmw::parse_assignment_csv(bmw::read_csv(assignment_path), in.table);

  bmw::ScalingParams params = bmw::fit_minmax(in.table, in.features);
  bmw::ScaledMatrix scaled = bmw::apply_minmax(params, in.table);
  bmw::PropensityFit fit =
      bmw::fit_logistic(scaled.values, assignment.labels, opts.fit_config());
  bmw::BalanceTable balance = bmw::balance_table_scaled(scaled, assignment, &fit.scores);

  json report{{"config", common_echo(opts, in.features)},
              {"assignment", assignment_path},
              {"balance", bmw::balance_json(balance)},
              {"mean_abs_smd", bmw::mean_abs_smd(balance)},
              {"fit_converged", fit.converged}};

  fs::path out_dir(opts.out_dir);
  write_output(out_dir / "balance.csv", bmw::balance_csv(balance));

  report["kde"] = nullptr;
  if (opts.target_or_none()) {
    std::vector<double> target = in.table.target_column();
    bmw::ValueRange range = bmw::fit_range(target);
    if (range.max > range.min) {
      std::vector<double> scaled_target = bmw::scale_with_range(range, target);
      std::vector<double> control, treatment;
      for (std::size_t i = 0; i < scaled_target.size(); ++i)
        (assignment.labels[i] == 1 ? treatment : control).push_back(scaled_target[i]);
      std::vector<bmw::KdeCurve> curves{
          bmw::kde(control, kde_grid, bmw::kControlGroupLabel),
          bmw::kde(treatment, kde_grid, bmw::kTreatmentGroupLabel)};
      write_output(out_dir / "kde_curves.csv", bmw::kde_curves_csv(curves));
      report["kde"] = bmw::kde_curves_json(curves);
    } else {
      std::cerr << "warning: target is constant; skipping density curves\n";
    }
  }

  report["experiment"] = nullptr;
  if (!experiment_path.empty()) {
    bmw::SubjectTable experiment =
        bmw::load_subject_table(experiment_path, opts.target_or_none());
    bmw::DriftReport drift =
        bmw::post_experiment_balance_check(params, experiment, assignment, smd_threshold);
    json warnings = json::array();
    for (const bmw::DriftWarning& w : drift.warnings) {
      warnings.push_back(json{{"feature", w.feature}, {"smd", w.smd}});
      std::cerr << "warning: feature '" << w.feature << "' drifted, |SMD| = " << std::abs(w.smd)
                << " > " << smd_threshold << "\n";
    }
    report["experiment"] = json{{"input", experiment_path},
                                {"balance", bmw::balance_json(drift.table)},
                                {"warnings", warnings},
                                {"threshold", drift.threshold},
                                {"clamped_values", drift.clamped_values}};
  }

  write_output(out_dir / "diagnose.json", dump(report));
  std::cout << "mean |SMD| over features: " << bmw::mean_abs_smd(balance) << "\n";
  return 0;
}

int run_analyze(const CommonOpts& opts, const std::string& assignment_path,
                const std::string& before_col, const std::string& after_col) {
  if (opts.target.empty())
    throw bmw::ValidationError("analyze requires --target");
  std::vector<std::string> reserved;
  if (!before_col.empty()) reserved = {before_col, after_col};

  LoadedInput in = load_input(opts, reserved);
  bmw::AssignmentVector assignment =
      bmw::parse_assignment_csv(bmw::read_csv(assignment_path), in.table);

  std::vector<double> targets = in.table.target_column();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (!std::isfinite(targets[i]))
      throw bmw::ValidationError("missing or non-finite target value (subject " +
                                 in.table.subjects[i].id + ")");
  }
  std::vector<double> control, treatment;
  for (std::size_t i = 0; i < targets.size(); ++i)
    (assignment.labels[i] == 1 ? treatment : control).push_back(targets[i]);

  bmw::EffectEstimate plain = bmw::ate_difference_in_means(control, treatment);
  bmw::EffectEstimate adjusted =
      bmw::ate_regression_adjusted(in.table, in.features, assignment, targets);

  json report{{"config", common_echo(opts, in.features)},
              {"assignment", assignment_path},
              {"difference_in_means", bmw::effect_json(plain)},
              {"regression_adjusted", bmw::effect_json(adjusted)}};
  report["paired"] = nullptr;
  report["comparison"] = nullptr;

  if (!before_col.empty()) {
    bmw::EffectEstimate paired =
        bmw::paired_test(in.table.feature_column(before_col), in.table.feature_column(after_col));
    report["paired"] = bmw::effect_json(paired);
    report["comparison"] = bmw::comparison_json(bmw::compare_designs(plain, paired));
  }

  write_output(fs::path(opts.out_dir) / "effects.json", dump(report));
  std::cout << "ate=" << plain.ate << " adjusted_ate=" << adjusted.ate << "\n";
  return 0;
}

int run_simulate(const CommonOpts& opts, const bmw::SyntheticSpec& spec_in, int replications,
                 int repetitions, bool trace) {
  bmw::SyntheticSpec spec = spec_in;
  spec.seed = opts.seed;

  bmw::BenchConfig config;
  config.replications = replications;
  config.repetitions = repetitions;
  config.master_seed = opts.seed;
  config.threads = opts.threads;
  config.fit = opts.fit_config();

  std::vector<bmw::ReplicationTrace> traces;
  bmw::BenchResult result = bmw::run_benchmark(spec, config, trace ? &traces : nullptr);

  fs::path out_dir(opts.out_dir);
  write_output(out_dir / "benchmark.json", dump(bmw::bench_json(result, spec, config)));
  if (trace) write_output(out_dir / "replications.csv", bmw::replications_csv(traces));

  std::cout << "sd_ate_bmw=" << result.sd_ate_bmw << " sd_ate_random=" << result.sd_ate_random;
  if (result.sd_reduction_pct) std::cout << " sd_reduction_pct=" << *result.sd_reduction_pct;
  if (result.mse_improvement_pct)
    std::cout << " mse_improvement_pct=" << *result.mse_improvement_pct;
  std::cout << "\n";
  return 0;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_input = true) {
  if (with_input)
    cmd->add_option("--input", opts.input, "subject table CSV (first column 'id')")->required();
  if (with_input) {
    cmd->add_option("--features", opts.features,
                    "comma-separated feature columns (default: all non-id, non-target)");
    cmd->add_option("--target", opts.target, "target metric column");
  }
  cmd->add_option("--seed", opts.seed, "master seed (env BMW_SEED as fallback)")
      ->envname("BMW_SEED");
  cmd->add_option("--ridge", opts.ridge, "L2 penalty for the propensity fit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--threads", opts.threads, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--out-dir", opts.out_dir, "output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Balanced A/B group design for small subject pools: repeated randomization, "
      "propensity-score matching, balance diagnostics, and effect analysis"};
  app.require_subcommand(1);

  CommonOpts opts;
  int repetitions = 500;
  std::string grid_flag;
  double epsilon = 0.01;
  std::string assignment_path;
  std::string experiment_path;
  double smd_threshold = 0.25;
  int kde_grid = 256;
  std::string before_col, after_col;
  bmw::SyntheticSpec spec;
  int replications = 200;
  bool trace = false;

  CLI::App* design = app.add_subcommand(
      "design", "partition subjects into balanced A/B groups (writes assignment.csv)");
  add_common(design, opts);
  design->add_option("--M", repetitions, "randomization repetitions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI::App* sweep = app.add_subcommand(
      "sweep", "chart minimum delta_k against the repetition count M (writes sweep.csv)");
  add_common(sweep, opts);
  sweep->add_option("--grid", grid_flag, "M values: 'a,b,c' or 'start:step:stop' "
                                         "(default 1,10,20,...,1000)");
  sweep->add_option("--epsilon", epsilon, "relative-improvement threshold for the elbow")
      ->check(CLI::Range(1e-12, 1.0))
      ->capture_default_str();

  CLI::App* diagnose = app.add_subcommand(
      "diagnose", "balance table, density curves and drift check for an assignment");
  add_common(diagnose, opts);
  diagnose->add_option("--assignment", assignment_path, "assignment CSV (id,group)")
      ->required();
  diagnose->add_option("--experiment", experiment_path,
                       "experiment-period CSV for the drift check");
  diagnose->add_option("--smd-threshold", smd_threshold, "|SMD| above this flags drift")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  diagnose->add_option("--kde-grid", kde_grid, "density curve grid points")
      ->check(CLI::Range(2, 1 << 20))
      ->capture_default_str();

  CLI::App* analyze = app.add_subcommand(
      "analyze", "treatment-effect estimates for a completed experiment");
  add_common(analyze, opts);
  analyze->add_option("--assignment", assignment_path, "assignment CSV (id,group)")
      ->required();
  CLI::Option* before_opt =
      analyze->add_option("--before", before_col, "pre-period target column (paired test)");
  analyze->add_option("--after", after_col, "post-period target column (paired test)")
      ->needs(before_opt);
  before_opt->needs("--after");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte-Carlo benchmark of the design on synthetic subject pools");
  add_common(simulate, opts, false);
  simulate->add_option("--n", spec.n_subjects, "subjects per replication")
      ->check(CLI::Range(4, 1 << 20))
      ->capture_default_str();
  simulate
      ->add_option("--correlations", spec.feature_target_correlations,
                   "feature-target correlations, comma separated")
      ->delimiter(',');
  simulate->add_option("--noise-sd", spec.noise_sd, "target noise sd")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--effect", spec.true_effect, "true treatment effect")
      ->capture_default_str();
  simulate->add_option("--drift", spec.seasonal_drift,
                       "seasonal drift added to experiment-period measurements")
      ->capture_default_str();
  simulate->add_option("--replications", replications, "Monte-Carlo replications")
      ->check(CLI::Range(2, 1 << 24))
      ->capture_default_str();
  simulate->add_option("--M", repetitions, "randomization repetitions per replication")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_flag("--trace", trace, "also write per-replication estimates CSV");

  try {
    app.parse(argc, argv);
    if (design->parsed()) return run_design(opts, repetitions);
    if (sweep->parsed()) return run_sweep(opts, grid_flag, epsilon);
    if (diagnose->parsed())
      return run_diagnose(opts, assignment_path, experiment_path, smd_threshold, kde_grid);
    if (analyze->parsed()) return run_analyze(opts, assignment_path, before_col, after_col);
    if (simulate->parsed()) return run_simulate(opts, spec, replications, repetitions, trace);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const bmw::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const bmw::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const bmw::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
