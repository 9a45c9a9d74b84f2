#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bmw/dataset.hpp"
#include "bmw/propensity.hpp"

namespace bmw {

// Parameters of the synthetic subject pool. Features share a latent driver
// with the baseline target, so r_j controls each feature-target correlation.
struct SyntheticSpec {
  int n_subjects = 28;
  std::vector<double> feature_target_correlations = {-0.32, -0.37, 0.30, 0.35, 0.26, 0.47};
  double noise_sd = 1.0;      // sd of target noise on top of the latent driver
  double true_effect = 0.0;   // additive treatment effect
  double seasonal_drift = 0.0;  // added to every experiment-period measurement
  std::uint64_t seed = 0;
};

struct GeneratedData {
  SubjectTable table;       // features f0..f{i-1} plus baseline "target" column
  std::vector<double> y0;   // potential outcome without treatment
  std::vector<double> y1;   // potential outcome with treatment
};

GeneratedData generate(const SyntheticSpec& spec);

struct BenchConfig {
  int replications = 200;
  int repetitions = 500;  // M for the BMW arm
  std::uint64_t master_seed = 0;
  int threads = 1;
  FitConfig fit;
};

struct ReplicationTrace {
  int replication = 0;  // 1-based
  double ate_random = 0.0;
  double ate_bmw = 0.0;
  double ate_paired = 0.0;
  double delta_k = 0.0;  // best delta_k of the BMW arm
};

struct BenchResult {
  int replications = 0;
  double true_effect = 0.0;
  double mean_ate_random = 0.0;
  double mean_ate_bmw = 0.0;
  double mean_ate_paired = 0.0;
  double sd_ate_random = 0.0;
  double sd_ate_bmw = 0.0;
  double sd_ate_paired = 0.0;
  double mse_random = 0.0;
  double mse_bmw = 0.0;
  double mse_paired = 0.0;
  // 100 * (1 - sd_ate_bmw / sd_ate_random); absent when the random arm has
  // zero spread.
  std::optional<double> sd_reduction_pct;
  // 100 * (1 - mse_bmw / mse_paired); absent when the paired MSE is zero,
  // which is the exact-pairing case with no seasonal drift.
  std::optional<double> mse_improvement_pct;
};

// Monte-Carlo comparison of three estimates of the true effect: a single
// random split, the BMW-selected split, and a before/after paired test.
// Every replication draws from seeds derived from master_seed, so results
// are identical for any thread count.
BenchResult run_benchmark(const SyntheticSpec& spec, const BenchConfig& config,
                          std::vector<ReplicationTrace>* traces = nullptr);

}  // namespace bmw
