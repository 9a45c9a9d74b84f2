#include "bmw/simbench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "bmw/design.hpp"
#include "bmw/errors.hpp"
#include "bmw/rng.hpp"
#include "bmw/stats.hpp"

namespace bmw {

namespace {

void validate_spec(const SyntheticSpec& spec) {
  if (spec.n_subjects < 4 || spec.n_subjects % 2 != 0)
    throw ValidationError("synthetic pool needs an even subject count of at least 4");
  if (spec.feature_target_correlations.empty())
    throw ValidationError("synthetic spec needs at least one feature correlation");
  for (double r : spec.feature_target_correlations)
    if (!(std::abs(r) < 1.0))
      throw ValidationError("feature-target correlations must lie in (-1, 1)");
  if (!(spec.noise_sd > 0.0)) throw ValidationError("noise sd must be positive");
  if (!std::isfinite(spec.true_effect) || !std::isfinite(spec.seasonal_drift))
    throw ValidationError("effect and drift must be finite");
}

std::string subject_id(int index, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%0*d", width, index + 1);
  return buf;
}

double dm_ate(const std::vector<double>& measured, const std::vector<int>& labels) {
  double sum_t = 0.0, sum_c = 0.0;
  int n_t = 0, n_c = 0;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    if (labels[i] == 1) {
      sum_t += measured[i];
      ++n_t;
    } else {
      sum_c += measured[i];
      ++n_c;
    }
  }
  return sum_t / n_t - sum_c / n_c;
}

}  // namespace

GeneratedData generate(const SyntheticSpec& spec) {
  validate_spec(spec);
  const int n = spec.n_subjects;
  const int i_features = static_cast<int>(spec.feature_target_correlations.size());
  const int id_width = static_cast<int>(std::to_string(n).size());

  SplitMix64 rng(spec.seed);
  GeneratedData data;
  data.table.feature_names.reserve(i_features);
  for (int j = 0; j < i_features; ++j)
    data.table.feature_names.push_back("f" + std::to_string(j));
  data.table.target_name = "target";

  data.y0.reserve(n);
  data.y1.reserve(n);
  data.table.subjects.reserve(n);
  for (int s = 0; s < n; ++s) {
    SubjectRecord rec;
    rec.id = subject_id(s, id_width);
    const double u = rng.normal();
    rec.features.reserve(i_features);
    for (int j = 0; j < i_features; ++j) {
      const double r = spec.feature_target_correlations[j];
      rec.features.push_back(r * u + std::sqrt(1.0 - r * r) * rng.normal());
    }
    const double y0 = u + spec.noise_sd * rng.normal();
    rec.target = y0;
    data.y0.push_back(y0);
    data.y1.push_back(y0 + spec.true_effect);
    data.table.subjects.push_back(std::move(rec));
  }
  return data;
}

BenchResult run_benchmark(const SyntheticSpec& spec, const BenchConfig& config,
                          std::vector<ReplicationTrace>* traces) {
  validate_spec(spec);
  if (config.replications < 2) throw ValidationError("benchmark needs at least 2 replications");
  if (config.repetitions < 1) throw ValidationError("repetition count M must be >= 1");

  const int reps = config.replications;
  std::vector<double> ate_random(reps), ate_bmw(reps), ate_paired(reps), delta_k(reps);

  unsigned hw = std::thread::hardware_concurrency();
  int threads = std::clamp(config.threads, 1, hw == 0 ? 1 : static_cast<int>(hw));
  threads = std::min(threads, reps);

  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&](int offset) {
    try {
      for (int r = offset + 1; r <= reps; r += threads) {
        const std::uint64_t rep_seed = derive_seed(config.master_seed, r);

        SyntheticSpec gen_spec = spec;
        gen_spec.seed = derive_seed(rep_seed, 1);
        GeneratedData data = generate(gen_spec);
        const std::size_t n = data.table.n_subjects();

        // Experiment-period measurement: the assigned arm's potential
        // outcome plus any seasonal drift common to the period.
        std::vector<double> measured_y0(n), measured_y1(n);
        for (std::size_t i = 0; i < n; ++i) {
          measured_y0[i] = data.y0[i] + spec.seasonal_drift;
          measured_y1[i] = data.y1[i] + spec.seasonal_drift;
        }
        auto measure = [&](const std::vector<int>& labels) {
          std::vector<double> m(n);
          for (std::size_t i = 0; i < n; ++i)
            m[i] = labels[i] == 1 ? measured_y1[i] : measured_y0[i];
          return m;
        };

        SplitMix64 split_rng(derive_seed(rep_seed, 2));
        AssignmentVector random_split = draw_balanced_assignment(n, split_rng);
        ate_random[r - 1] = dm_ate(measure(random_split.labels), random_split.labels);

        DesignConfig design_config;
        design_config.repetitions = config.repetitions;
        design_config.master_seed = derive_seed(rep_seed, 3);
        design_config.threads = 1;
        design_config.fit = config.fit;
        DesignOutcome outcome =
            run_bmw(data.table, data.table.feature_names, design_config);
        ate_bmw[r - 1] =
            dm_ate(measure(outcome.best.assignment.labels), outcome.best.assignment.labels);
        delta_k[r - 1] = outcome.best.delta_k;

        // Paired: the same subjects before (baseline, no drift) and after.
        double diff_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff_sum += measured_y1[i] - data.y0[i];
        ate_paired[r - 1] = diff_sum / static_cast<double>(n);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  auto mse = [&](const std::vector<double>& ates) {
    double total = 0.0;
    for (double a : ates) {
      const double e = a - spec.true_effect;
      total += e * e;
    }
    return total / static_cast<double>(ates.size());
  };

  BenchResult result;
  result.replications = reps;
  result.true_effect = spec.true_effect;
  result.mean_ate_random = mean(ate_random);
  result.mean_ate_bmw = mean(ate_bmw);
  result.mean_ate_paired = mean(ate_paired);
  // Population sd keeps sd^2 + bias^2 = mse an identity.
  result.sd_ate_random = population_sd(ate_random);
  result.sd_ate_bmw = population_sd(ate_bmw);
  result.sd_ate_paired = population_sd(ate_paired);
  result.mse_random = mse(ate_random);
  result.mse_bmw = mse(ate_bmw);
  result.mse_paired = mse(ate_paired);
  if (result.sd_ate_random > 0.0)
    result.sd_reduction_pct = 100.0 * (1.0 - result.sd_ate_bmw / result.sd_ate_random);
  if (result.mse_paired > 0.0)
    result.mse_improvement_pct = 100.0 * (1.0 - result.mse_bmw / result.mse_paired);

  if (traces) {
    traces->clear();
    traces->reserve(reps);
    for (int r = 1; r <= reps; ++r)
      traces->push_back({r, ate_random[r - 1], ate_bmw[r - 1], ate_paired[r - 1],
                         delta_k[r - 1]});
  }
  return result;
}

}  // namespace bmw
