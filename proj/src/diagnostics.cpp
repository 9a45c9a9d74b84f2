#include "bmw/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bmw/errors.hpp"
#include "bmw/stats.hpp"

namespace bmw {

namespace {

BalanceRow make_row(const std::string& name, const std::vector<double>& control,
                    const std::vector<double>& treatment) {
  BalanceRow row;
  row.name = name;
  row.control_mean = mean(control);
  row.treatment_mean = mean(treatment);
  row.control_variance = sample_variance(control);
  row.treatment_variance = sample_variance(treatment);
  double pooled = std::sqrt((row.control_variance + row.treatment_variance) / 2.0);
  double diff = row.treatment_mean - row.control_mean;
  if (pooled > 0.0) {
    row.smd = diff / pooled;
  } else if (diff == 0.0) {
    row.smd = 0.0;
  } else {
    // Zero spread but distinct means: imbalance is unbounded, not missing.
    row.smd = std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  return row;
}

void split_column(const std::vector<double>& column, const AssignmentVector& assignment,
                  std::vector<double>& control, std::vector<double>& treatment) {
  control.clear();
  treatment.clear();
  for (std::size_t i = 0; i < column.size(); ++i) {
    (assignment.labels[i] == 1 ? treatment : control).push_back(column[i]);
  }
}

}  // namespace

double mean_abs_smd(const BalanceTable& table, bool include_propensity) {
  double total = 0.0;
  int count = 0;
  for (const BalanceRow& row : table.rows) {
    if (!include_propensity && row.name == kPropensityRowName) continue;
    total += std::abs(row.smd);
    ++count;
  }
  return count == 0 ? 0.0 : total / count;
}

BalanceTable balance_table_scaled(const ScaledMatrix& scaled, const AssignmentVector& assignment,
                                  const std::vector<double>* scores) {
  const std::size_t n = static_cast<std::size_t>(scaled.values.rows());
  if (assignment.labels.size() != n)
    throw ValidationError("assignment length does not match subject count");
  if (!assignment.balanced())
    throw ValidationError("assignment must place N/2 subjects in each group");
  if (scores && scores->size() != n)
    throw ValidationError("propensity score count does not match subject count");

  BalanceTable table;
  std::vector<double> column(n), control, treatment;
  for (std::size_t j = 0; j < scaled.feature_names.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i)
      column[i] = scaled.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    split_column(column, assignment, control, treatment);
    table.rows.push_back(make_row(scaled.feature_names[j], control, treatment));
  }
  if (scores) {
    split_column(*scores, assignment, control, treatment);
    table.rows.push_back(make_row(kPropensityRowName, control, treatment));
  }
  return table;
}

BalanceTable balance_table(const SubjectTable& table, const std::vector<std::string>& features,
                           const AssignmentVector& assignment, const PropensityFit& fit) {
  ScalingParams params = fit_minmax(table, features);
  ScaledMatrix scaled = apply_minmax(params, table);
  return balance_table_scaled(scaled, assignment, &fit.scores);
}

KdeCurve kde(const std::vector<double>& values, int grid_size, const std::string& group_label) {
  if (values.size() < 2) throw ValidationError("kde requires at least 2 values");
  if (grid_size < 2) throw ValidationError("kde grid size must be >= 2");
  for (double v : values)
    if (!std::isfinite(v)) throw ValidationError("kde input contains a non-finite value");

  const double n = static_cast<double>(values.size());
  const double sd = sample_sd(values);
  if (sd == 0.0) throw ValidationError("kde: degenerate sample, all values identical");

  // Silverman's rule of thumb. A zero IQR with positive sd (heavy point
  // mass) would zero the bandwidth, so fall back to the sd term alone.
  const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  const double h = 0.9 * spread * std::pow(n, -0.2);

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it - 3.0 * h;
  const double hi = *hi_it + 3.0 * h;

  KdeCurve curve;
  curve.bandwidth = h;
  curve.group_label = group_label;
  curve.grid.resize(grid_size);
  curve.density.resize(grid_size);
  const double step = (hi - lo) / (grid_size - 1);
  const double norm = 1.0 / (n * h * std::sqrt(2.0 * std::numbers::pi));
  for (int g = 0; g < grid_size; ++g) {
    const double x = lo + step * g;
    double total = 0.0;
    for (double v : values) {
      const double z = (x - v) / h;
      total += std::exp(-0.5 * z * z);
    }
    curve.grid[g] = x;
    curve.density[g] = norm * total;
  }
  return curve;
}

DriftReport post_experiment_balance_check(const ScalingParams& pre_params,
                                          const SubjectTable& experiment_table,
                                          const AssignmentVector& assignment,
                                          double smd_threshold) {
  ScaledMatrix scaled = apply_minmax(pre_params, experiment_table);
  DriftReport report;
  report.threshold = smd_threshold;
  report.clamped_values = scaled.clamped_count;
  report.table = balance_table_scaled(scaled, assignment, nullptr);
  for (const BalanceRow& row : report.table.rows) {
    if (std::abs(row.smd) > smd_threshold) report.warnings.push_back({row.name, row.smd});
  }
  return report;
}

}  // namespace bmw
