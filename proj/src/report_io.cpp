#include "bmw/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "bmw/errors.hpp"

namespace bmw {

namespace {

using nlohmann::json;

// Non-finite doubles have no JSON number representation; emit null rather
// than let the writer pick.
json json_number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

json balance_row_json(const BalanceRow& row) {
  return json{{"name", row.name},
              {"control_mean", json_number(row.control_mean)},
              {"treatment_mean", json_number(row.treatment_mean)},
              {"control_variance", json_number(row.control_variance)},
              {"treatment_variance", json_number(row.treatment_variance)},
              {"smd", json_number(row.smd)}};
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string assignment_csv(const SubjectTable& table, const AssignmentVector& assignment) {
  if (assignment.labels.size() != table.n_subjects())
    throw ValidationError("assignment length does not match subject count");
  CsvTable csv;
  csv.header = {"id", "group"};
  csv.rows.reserve(table.n_subjects());
  for (std::size_t i = 0; i < table.n_subjects(); ++i) {
    csv.rows.push_back({table.subjects[i].id, assignment.labels[i] == 1
                                                  ? kTreatmentGroupLabel
                                                  : kControlGroupLabel});
  }
  return to_csv(csv);
}

AssignmentVector parse_assignment_csv(const CsvTable& csv, const SubjectTable& table) {
  if (csv.header.size() != 2 || csv.header[0] != "id" || csv.header[1] != "group")
    throw IoError("assignment file must have header 'id,group'");

  std::unordered_map<std::string, int> label_by_id;
  label_by_id.reserve(csv.rows.size());
  for (const auto& row : csv.rows) {
    int label;
    if (row[1] == kControlGroupLabel)
      label = 0;
    else if (row[1] == kTreatmentGroupLabel)
      label = 1;
    else
      throw ValidationError("unknown group '" + row[1] + "' for subject '" + row[0] +
                            "' (expected A or B)");
    if (!label_by_id.emplace(row[0], label).second)
      throw ValidationError("duplicate subject '" + row[0] + "' in assignment file");
  }

  AssignmentVector assignment;
  assignment.labels.reserve(table.n_subjects());
  for (const SubjectRecord& subject : table.subjects) {
    auto it = label_by_id.find(subject.id);
    if (it == label_by_id.end())
      throw ValidationError("assignment file is missing subject '" + subject.id + "'");
    assignment.labels.push_back(it->second);
  }
  if (label_by_id.size() != table.n_subjects())
    throw ValidationError("assignment file names subjects not present in the input table");
  if (!assignment.balanced())
    throw ValidationError("assignment groups are not balanced (need N/2 per group)");
  return assignment;
}

nlohmann::json balance_json(const BalanceTable& table) {
  json rows = json::array();
  for (const BalanceRow& row : table.rows) rows.push_back(balance_row_json(row));
  return rows;
}

std::string balance_csv(const BalanceTable& table) {
  CsvTable csv;
  csv.header = {"name",           "control_mean",       "treatment_mean",
                "control_variance", "treatment_variance", "smd"};
  for (const BalanceRow& row : table.rows) {
    csv.rows.push_back({row.name, format_double(row.control_mean),
                        format_double(row.treatment_mean), format_double(row.control_variance),
                        format_double(row.treatment_variance), format_double(row.smd)});
  }
  return to_csv(csv);
}

std::string kde_curves_csv(const std::vector<KdeCurve>& curves) {
  CsvTable csv;
  csv.header = {"group", "x", "density"};
  for (const KdeCurve& curve : curves) {
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
      csv.rows.push_back(
          {curve.group_label, format_double(curve.grid[i]), format_double(curve.density[i])});
    }
  }
  return to_csv(csv);
}

nlohmann::json kde_curves_json(const std::vector<KdeCurve>& curves) {
  json out = json::array();
  for (const KdeCurve& curve : curves) {
    out.push_back(json{{"group", curve.group_label},
                       {"bandwidth", json_number(curve.bandwidth)},
                       {"x", curve.grid},
                       {"density", curve.density}});
  }
  return out;
}

nlohmann::json design_report_json(const DesignOutcome& outcome, const SubjectTable& table,
                                  const BalanceTable& balance, const nlohmann::json& config_echo) {
  json pairs = json::array();
  for (const MatchPair& pair : outcome.best.pairing.pairs) {
    pairs.push_back(json{{"control_id", table.subjects[pair.control].id},
                         {"treatment_id", table.subjects[pair.treatment].id},
                         {"delta", json_number(pair.distance)}});
  }

  json groups = json{{kControlGroupLabel, json::array()}, {kTreatmentGroupLabel, json::array()}};
  for (std::size_t i = 0; i < table.n_subjects(); ++i) {
    groups[outcome.best.assignment.labels[i] == 1 ? kTreatmentGroupLabel : kControlGroupLabel]
        .push_back(table.subjects[i].id);
  }

  json trace = json::array();
  for (const TracePoint& point : outcome.trace)
    trace.push_back(json::array({point.m, json_number(point.running_min)}));

  json excluded = json::array();
  for (const std::string& name : outcome.scaling.excluded_features) excluded.push_back(name);

  return json{{"config", config_echo},
              {"master_seed", outcome.master_seed},
              {"repetitions", outcome.repetitions},
              {"non_converged_fits", outcome.non_converged_fits},
              {"features", outcome.feature_names},
              {"excluded_features", excluded},
              {"best",
               json{{"m", outcome.best.m},
                    {"delta_k", json_number(outcome.best.delta_k)},
                    {"fit_converged", outcome.best.fit.converged},
                    {"pairs", pairs},
                    {"groups", groups}}},
              {"balance", balance_json(balance)},
              {"trace", trace}};
}

std::string sweep_csv(const SweepResult& sweep) {
  CsvTable csv;
  csv.header = {"M", "min_delta_k"};
  for (const SweepPoint& point : sweep.curve)
    csv.rows.push_back({std::to_string(point.m), format_double(point.min_delta_k)});
  return to_csv(csv);
}

nlohmann::json sweep_json(const SweepResult& sweep, double epsilon) {
  json curve = json::array();
  for (const SweepPoint& point : sweep.curve)
    curve.push_back(json::array({point.m, json_number(point.min_delta_k)}));
  json out{{"master_seed", sweep.master_seed}, {"epsilon", epsilon}, {"curve", curve}};
  out["elbow"] = sweep.elbow ? json(*sweep.elbow) : json(nullptr);
  return out;
}

nlohmann::json effect_json(const EffectEstimate& estimate) {
  return json{{"method", effect_method_name(estimate.method)},
              {"ate", json_number(estimate.ate)},
              {"sd_control", json_number(estimate.std_dev_control)},
              {"sd_treatment", json_number(estimate.std_dev_treatment)},
              {"pooled_sd", json_number(estimate.pooled_std_dev)},
              {"n_per_group", estimate.n_per_group}};
}

nlohmann::json comparison_json(const ComparisonReport& report) {
  json out{{"matched_ate", json_number(report.matched_ate)},
           {"paired_ate", json_number(report.paired_ate)}};
  out["sd_reduction_pct"] =
      report.sd_reduction_pct ? json(*report.sd_reduction_pct) : json(nullptr);
  return out;
}

nlohmann::json bench_json(const BenchResult& result, const SyntheticSpec& spec,
                          const BenchConfig& config) {
  json out{{"replications", result.replications},
           {"repetitions", config.repetitions},
           {"master_seed", config.master_seed},
           {"spec",
            json{{"n_subjects", spec.n_subjects},
                 {"feature_target_correlations", spec.feature_target_correlations},
                 {"noise_sd", spec.noise_sd},
                 {"true_effect", spec.true_effect},
                 {"seasonal_drift", spec.seasonal_drift}}},
           {"mean_ate_random", json_number(result.mean_ate_random)},
           {"mean_ate_bmw", json_number(result.mean_ate_bmw)},
           {"mean_ate_paired", json_number(result.mean_ate_paired)},
           {"sd_ate_random", json_number(result.sd_ate_random)},
           {"sd_ate_bmw", json_number(result.sd_ate_bmw)},
           {"sd_ate_paired", json_number(result.sd_ate_paired)},
           {"mse_random", json_number(result.mse_random)},
           {"mse_bmw", json_number(result.mse_bmw)},
           {"mse_paired", json_number(result.mse_paired)}};
  out["sd_reduction_pct"] =
      result.sd_reduction_pct ? json(*result.sd_reduction_pct) : json(nullptr);
  out["mse_improvement_pct"] =
      result.mse_improvement_pct ? json(*result.mse_improvement_pct) : json(nullptr);
  return out;
}

std::string replications_csv(const std::vector<ReplicationTrace>& traces) {
  CsvTable csv;
  csv.header = {"replication", "ate_random", "ate_bmw", "ate_paired", "delta_k"};
  for (const ReplicationTrace& trace : traces) {
    csv.rows.push_back({std::to_string(trace.replication), format_double(trace.ate_random),
                        format_double(trace.ate_bmw), format_double(trace.ate_paired),
                        format_double(trace.delta_k)});
  }
  return to_csv(csv);
}

}  // namespace bmw
