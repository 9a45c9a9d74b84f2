#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bmw/analysis.hpp"
#include "bmw/csv.hpp"
#include "bmw/dataset.hpp"
#include "bmw/design.hpp"
#include "bmw/diagnostics.hpp"
#include "bmw/simbench.hpp"

namespace bmw {

// Group labels on the wire: "A" is control (tau=0), "B" is treatment (tau=1).
inline constexpr const char* kControlGroupLabel = "A";
inline constexpr const char* kTreatmentGroupLabel = "B";

// id,group rows in table order.
std::string assignment_csv(const SubjectTable& table, const AssignmentVector& assignment);

// Reads an id,group file back into table order; every subject must appear
// exactly once and the groups must be balanced.
AssignmentVector parse_assignment_csv(const CsvTable& csv, const SubjectTable& table);

nlohmann::json balance_json(const BalanceTable& table);
std::string balance_csv(const BalanceTable& table);

// Long format: group,x,density (one block per curve).
std::string kde_curves_csv(const std::vector<KdeCurve>& curves);
nlohmann::json kde_curves_json(const std::vector<KdeCurve>& curves);

nlohmann::json design_report_json(const DesignOutcome& outcome, const SubjectTable& table,
                                  const BalanceTable& balance, const nlohmann::json& config_echo);

std::string sweep_csv(const SweepResult& sweep);
nlohmann::json sweep_json(const SweepResult& sweep, double epsilon);

nlohmann::json effect_json(const EffectEstimate& estimate);
nlohmann::json comparison_json(const ComparisonReport& report);

nlohmann::json bench_json(const BenchResult& result, const SyntheticSpec& spec,
                          const BenchConfig& config);
std::string replications_csv(const std::vector<ReplicationTrace>& traces);

// Round-trip double formatting used by all CSV writers.
std::string format_double(double value);

}  // namespace bmw
