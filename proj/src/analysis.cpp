#include "bmw/analysis.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "bmw/errors.hpp"
#include "bmw/scaling.hpp"
#include "bmw/stats.hpp"

namespace bmw {

const char* effect_method_name(EffectMethod method) {
  switch (method) {
    case EffectMethod::difference_in_means: return "difference_in_means";
    case EffectMethod::regression_adjusted: return "regression_adjusted";
    case EffectMethod::paired: return "paired";
  }
  return "unknown";
}

EffectEstimate ate_difference_in_means(const std::vector<double>& control,
                                       const std::vector<double>& treatment) {
  if (control.empty() || treatment.empty())
    throw ValidationError("difference in means requires non-empty groups");
  EffectEstimate est;
  est.method = EffectMethod::difference_in_means;
  est.ate = mean(treatment) - mean(control);
  est.std_dev_control = sample_sd(control);
  est.std_dev_treatment = sample_sd(treatment);
  est.pooled_std_dev = std::sqrt(
      (sample_variance(control) + sample_variance(treatment)) / 2.0);
  est.n_per_group = static_cast<int>(std::min(control.size(), treatment.size()));
  return est;
}

EffectEstimate ate_regression_adjusted(const SubjectTable& table,
                                       const std::vector<std::string>& features,
                                       const AssignmentVector& assignment,
                                       const std::vector<double>& targets) {
  const std::size_t n = table.n_subjects();
  if (assignment.labels.size() != n)
    throw ValidationError("assignment length does not match subject count");
  if (targets.size() != n)
    throw ValidationError("target count does not match subject count");
  for (double y : targets)
    if (!std::isfinite(y)) throw ValidationError("target contains a non-finite value");

  ScalingParams params = fit_minmax(table, features);
  ScaledMatrix scaled = apply_minmax(params, table);
  const Eigen::Index rows = static_cast<Eigen::Index>(n);
  const Eigen::Index p = scaled.values.cols() + 2;  // intercept + tau + features

  Eigen::MatrixXd Z(rows, p);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    Z(i, 0) = 1.0;
    Z(i, 1) = assignment.labels[static_cast<std::size_t>(i)];
    y[i] = targets[static_cast<std::size_t>(i)];
  }
  if (scaled.values.cols() > 0) Z.rightCols(scaled.values.cols()) = scaled.values;

  if (rows <= p)
    throw NumericError("regression adjustment needs more subjects than coefficients");

  Eigen::MatrixXd gram = Z.transpose() * Z;
  Eigen::VectorXd rhs = Z.transpose() * y;
  double ridge = 1e-10;
  Eigen::VectorXd beta;
  for (;;) {
    Eigen::MatrixXd reg = gram;
    reg.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
    if (ldlt.info() == Eigen::Success) {
      beta = ldlt.solve(rhs);
      if (beta.allFinite()) break;
    }
    ridge *= 100.0;
    if (ridge > 1e-4)
      throw NumericError("regression design is rank-deficient beyond ridge rescue");
  }

  Eigen::VectorXd residuals = y - Z * beta;
  const double dof = static_cast<double>(rows - p);
  const double sigma2 = residuals.squaredNorm() / dof;
  Eigen::MatrixXd reg = gram;
  reg.diagonal().array() += ridge;
  Eigen::MatrixXd inv = reg.ldlt().solve(Eigen::MatrixXd::Identity(p, p));

  std::vector<double> control, treatment;
  for (std::size_t i = 0; i < n; ++i)
    (assignment.labels[i] == 1 ? treatment : control).push_back(targets[i]);

  EffectEstimate est;
  est.method = EffectMethod::regression_adjusted;
  est.ate = beta[1];
  est.std_dev_control = sample_sd(control);
  est.std_dev_treatment = sample_sd(treatment);
  est.pooled_std_dev = std::sqrt(std::max(0.0, sigma2 * inv(1, 1)));
  est.n_per_group = static_cast<int>(std::min(control.size(), treatment.size()));
  return est;
}

EffectEstimate paired_test(const std::vector<double>& before,
                           const std::vector<double>& after) {
  if (before.empty()) throw ValidationError("paired test requires at least one subject");
  if (before.size() != after.size())
    throw ValidationError("before/after lists differ in length");
  std::vector<double> diffs(before.size());
  for (std::size_t i = 0; i < before.size(); ++i) diffs[i] = after[i] - before[i];

  EffectEstimate est;
  est.method = EffectMethod::paired;
  est.ate = mean(diffs);
  est.std_dev_control = sample_sd(before);
  est.std_dev_treatment = sample_sd(after);
  est.pooled_std_dev = sample_sd(diffs);
  est.n_per_group = static_cast<int>(before.size());
  return est;
}

ComparisonReport compare_designs(const EffectEstimate& matched, const EffectEstimate& paired) {
  ComparisonReport report;
  report.matched_ate = matched.ate;
  report.paired_ate = paired.ate;
  if (paired.pooled_std_dev > 0.0) {
    report.sd_reduction_pct = 100.0 * (1.0 - matched.pooled_std_dev / paired.pooled_std_dev);
  }
  return report;
}

}  // namespace bmw
