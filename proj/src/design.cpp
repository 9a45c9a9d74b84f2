#include "bmw/design.hpp"

#include <algorithm>
#include <charconv>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "bmw/errors.hpp"
#include "bmw/rng.hpp"

namespace bmw {

namespace {

int clamp_threads(int requested) {
  unsigned hw = std::thread::hardware_concurrency();
  int cap = hw == 0 ? 1 : static_cast<int>(hw);
  return std::clamp(requested, 1, cap);
}

struct DeltaStream {
  std::vector<double> delta_k;  // index m-1
  std::vector<char> converged;
};

// Computes delta_k for every repetition. Each slot is written by exactly one
// worker, so the result does not depend on scheduling.
DeltaStream compute_stream(const Eigen::MatrixXd& X, int repetitions,
                           std::uint64_t master_seed, const FitConfig& fit_config,
                           int threads) {
  DeltaStream stream;
  stream.delta_k.assign(repetitions, 0.0);
  stream.converged.assign(repetitions, 1);

  threads = std::min(clamp_threads(threads), repetitions);
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&](int offset) {
    try {
      for (int m = offset + 1; m <= repetitions; m += threads) {
        RepetitionRecord rec = run_repetition(X, m, master_seed, fit_config);
        stream.delta_k[m - 1] = rec.delta_k;
        stream.converged[m - 1] = rec.fit.converged ? 1 : 0;
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
  return stream;
}

int best_repetition(const std::vector<double>& delta_k) {
  int best_m = 1;
  double best = delta_k[0];
  for (std::size_t i = 1; i < delta_k.size(); ++i) {
    if (delta_k[i] < best) {
      best = delta_k[i];
      best_m = static_cast<int>(i) + 1;
    }
  }
  return best_m;
}

}  // namespace

AssignmentVector draw_balanced_assignment(std::size_t n, SplitMix64& rng) {
  if (n == 0 || n % 2 != 0)
    throw ValidationError("assignment requires an even, positive subject count");
  AssignmentVector out;
  out.labels.assign(n, 0);
  for (std::size_t i = 0; i < n / 2; ++i) out.labels[i] = 1;
  fisher_yates_shuffle(out.labels, rng);
  return out;
}

RepetitionRecord run_repetition(const Eigen::MatrixXd& X, int m,
                                std::uint64_t master_seed, const FitConfig& fit_config) {
  SplitMix64 rng(derive_seed(master_seed, static_cast<std::uint64_t>(m)));
  RepetitionRecord rec;
  rec.m = m;
  rec.assignment = draw_balanced_assignment(static_cast<std::size_t>(X.rows()), rng);
  rec.fit = fit_logistic(X, rec.assignment.labels, fit_config);
  rec.pairing = greedy_match(rec.fit.scores, rec.assignment.labels);
  rec.delta_k = rec.pairing.total_distance;
  return rec;
}

DesignOutcome run_bmw_scaled(const Eigen::MatrixXd& X, const DesignConfig& config) {
  if (config.repetitions < 1) throw ValidationError("repetition count M must be >= 1");
  if (X.rows() < 4 || X.rows() % 2 != 0)
    throw ValidationError("design requires an even subject count of at least 4");

  DeltaStream stream =
      compute_stream(X, config.repetitions, config.master_seed, config.fit, config.threads);

  DesignOutcome out;
  out.repetitions = config.repetitions;
  out.master_seed = config.master_seed;
  out.non_converged_fits =
      static_cast<int>(std::count(stream.converged.begin(), stream.converged.end(), 0));

  // Rebuilding the winner from its derived seed keeps the loop itself
  // allocation-light: workers only ever record scalars.
  out.best = run_repetition(X, best_repetition(stream.delta_k), config.master_seed, config.fit);

  out.trace.reserve(stream.delta_k.size());
  double running = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < stream.delta_k.size(); ++i) {
    running = std::min(running, stream.delta_k[i]);
    out.trace.push_back({static_cast<int>(i) + 1, running});
  }
  return out;
}

DesignOutcome run_bmw(const SubjectTable& table, const std::vector<std::string>& features,
                      const DesignConfig& config) {
  require_valid(validate_for_design(table, features, table.target_name));
  ScalingParams scaling = fit_minmax(table, features);
  ScaledMatrix scaled = apply_minmax(scaling, table);
  DesignOutcome out = run_bmw_scaled(scaled.values, config);
  out.scaling = scaling;
  out.feature_names = scaled.feature_names;
  return out;
}

SweepResult sweep_M(const SubjectTable& table, const std::vector<std::string>& features,
                    const std::vector<int>& grid, const SweepConfig& config) {
  if (grid.empty()) throw ValidationError("sweep grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw ValidationError("sweep grid values must be >= 1");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw ValidationError("sweep grid must be strictly increasing");
  }

  require_valid(validate_for_design(table, features, table.target_name));
  ScalingParams scaling = fit_minmax(table, features);
  ScaledMatrix scaled = apply_minmax(scaling, table);

  DeltaStream stream =
      compute_stream(scaled.values, grid.back(), config.master_seed, config.fit, config.threads);

  SweepResult out;
  out.master_seed = config.master_seed;
  out.curve.reserve(grid.size());
  double running = std::numeric_limits<double>::infinity();
  std::size_t next = 0;
  for (int g : grid) {
    while (next < static_cast<std::size_t>(g)) {
      running = std::min(running, stream.delta_k[next]);
      ++next;
    }
    out.curve.push_back({g, running});
  }
  out.elbow = find_elbow(out.curve, config.epsilon);
  return out;
}

std::optional<int> find_elbow(const std::vector<SweepPoint>& curve, double epsilon) {
  if (curve.size() < 2) return std::nullopt;
  const double base = curve.front().min_delta_k;

  // Last grid step whose relative improvement still clears the threshold;
  // the elbow is the point right after it, provided nothing later clears it.
  std::size_t last_big = 0;
  for (std::size_t j = 1; j < curve.size(); ++j) {
    double improvement = curve[j - 1].min_delta_k - curve[j].min_delta_k;
    double relative = base == 0.0 ? 0.0 : improvement / base;
    if (relative >= epsilon) last_big = j;
  }
  if (last_big + 1 >= curve.size() && last_big != 0) return std::nullopt;
  return curve[last_big + 1].m;
}

std::vector<int> default_m_grid() {
  std::vector<int> grid;
  grid.push_back(1);
  for (int m = 10; m <= 1000; m += 10) grid.push_back(m);
  return grid;
}

std::vector<int> parse_m_grid(const std::string& text) {
  auto parse_int = [](std::string_view token) {
    int value = 0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
      throw ValidationError("invalid grid token '" + std::string(token) + "'");
    return value;
  };

  std::vector<int> grid;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string_view> parts;
    std::string_view rest = text;
    while (true) {
      std::size_t pos = rest.find(':');
      parts.push_back(rest.substr(0, pos));
      if (pos == std::string_view::npos) break;
      rest = rest.substr(pos + 1);
    }
    if (parts.size() != 3)
      throw ValidationError("grid range must be start:step:stop");
    int start = parse_int(parts[0]);
    int step = parse_int(parts[1]);
    int stop = parse_int(parts[2]);
    if (step < 1) throw ValidationError("grid step must be >= 1");
    for (int m = start; m <= stop; m += step) grid.push_back(m);
  } else {
    std::string_view rest = text;
    while (true) {
      std::size_t pos = rest.find(',');
      grid.push_back(parse_int(rest.substr(0, pos)));
      if (pos == std::string_view::npos) break;
      rest = rest.substr(pos + 1);
    }
  }
  if (grid.empty()) throw ValidationError("sweep grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw ValidationError("sweep grid values must be >= 1");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw ValidationError("sweep grid must be strictly increasing");
  }
  return grid;
}

}  // namespace bmw
