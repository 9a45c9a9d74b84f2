#pragma once

#include <string>
#include <vector>

#include "bmw/assignment.hpp"
#include "bmw/dataset.hpp"
#include "bmw/propensity.hpp"
#include "bmw/scaling.hpp"

namespace bmw {

inline constexpr const char* kPropensityRowName = "propensity_score";

// Group statistics for one scaled feature (or the propensity score).
struct BalanceRow {
  std::string name;
  double control_mean = 0.0;
  double treatment_mean = 0.0;
  double control_variance = 0.0;  // sample variance, n-1 denominator
  double treatment_variance = 0.0;
  double smd = 0.0;  // (mean_T - mean_C) / sqrt((var_T + var_C) / 2)
};

struct BalanceTable {
  std::vector<BalanceRow> rows;
};

// Mean |SMD| over feature rows; the propensity row is excluded unless asked
// for, since it is a fit output rather than an observed covariate.
double mean_abs_smd(const BalanceTable& table, bool include_propensity = false);

// Core kernel on an already-scaled matrix; pass scores to append the
// propensity row, nullptr to omit it.
BalanceTable balance_table_scaled(const ScaledMatrix& scaled, const AssignmentVector& assignment,
                                  const std::vector<double>* scores);

// Scales the requested features from the table, then tabulates group means,
// sample variances, and SMDs, with the fit's propensity scores as a final row.
BalanceTable balance_table(const SubjectTable& table, const std::vector<std::string>& features,
                           const AssignmentVector& assignment, const PropensityFit& fit);

struct KdeCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
  std::string group_label;
};

// Gaussian-kernel density estimate with Silverman's rule-of-thumb bandwidth,
// evaluated on an even grid over [min - 3h, max + 3h].
KdeCurve kde(const std::vector<double>& values, int grid_size,
             const std::string& group_label = "");

struct DriftWarning {
  std::string feature;
  double smd = 0.0;
};

struct DriftReport {
  BalanceTable table;
  std::vector<DriftWarning> warnings;
  double threshold = 0.25;
  int clamped_values = 0;  // experiment-period cells outside the fitted ranges
};

// Rescales experiment-period features with the pre-experiment parameters,
// recomputes balance for the given assignment, and flags features whose
// |SMD| exceeds the threshold.
DriftReport post_experiment_balance_check(const ScalingParams& pre_params,
                                          const SubjectTable& experiment_table,
                                          const AssignmentVector& assignment,
                                          double smd_threshold = 0.25);

}  // namespace bmw
