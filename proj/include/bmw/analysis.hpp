#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bmw/assignment.hpp"
#include "bmw/dataset.hpp"

namespace bmw {

enum class EffectMethod { difference_in_means, regression_adjusted, paired };

const char* effect_method_name(EffectMethod method);

struct EffectEstimate {
  double ate = 0.0;
  double std_dev_control = 0.0;
  double std_dev_treatment = 0.0;
  // Group-pooled sd for difference-in-means, the tau coefficient's standard
  // error for the regression method, sd of per-subject differences for paired.
  double pooled_std_dev = 0.0;
  EffectMethod method = EffectMethod::difference_in_means;
  int n_per_group = 0;
};

// ate = mean(treatment) - mean(control); sds use the n-1 denominator.
EffectEstimate ate_difference_in_means(const std::vector<double>& control,
                                       const std::vector<double>& treatment);

// OLS of Y on intercept + treatment indicator + min-max-scaled features;
// the treatment coefficient is the ATE.
EffectEstimate ate_regression_adjusted(const SubjectTable& table,
                                       const std::vector<std::string>& features,
                                       const AssignmentVector& assignment,
                                       const std::vector<double>& targets);

// Per-subject differences after - before; vectors are aligned by subject.
EffectEstimate paired_test(const std::vector<double>& before,
                           const std::vector<double>& after);

struct ComparisonReport {
  double matched_ate = 0.0;
  double paired_ate = 0.0;
  // 100 * (1 - matched_sd / paired_sd); absent when the paired sd is zero.
  std::optional<double> sd_reduction_pct;
};

ComparisonReport compare_designs(const EffectEstimate& matched, const EffectEstimate& paired);

}  // namespace bmw
