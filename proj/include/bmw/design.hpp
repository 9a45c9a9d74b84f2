#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bmw/assignment.hpp"
#include "bmw/dataset.hpp"
#include "bmw/matching.hpp"
#include "bmw/propensity.hpp"
#include "bmw/rng.hpp"
#include "bmw/scaling.hpp"

namespace bmw {

struct DesignConfig {
  int repetitions = 500;
  std::uint64_t master_seed = 0;
  int threads = 1;  // worker threads for the repetition loop
  FitConfig fit;
};

// Everything recorded for one repetition of the loop.
struct RepetitionRecord {
  int m = 0;  // 1-based repetition index
  double delta_k = 0.0;
  AssignmentVector assignment;
  MatchPairing pairing;
  PropensityFit fit;
};

struct TracePoint {
  int m = 0;
  double running_min = 0.0;
};

struct DesignOutcome {
  RepetitionRecord best;
  std::vector<TracePoint> trace;  // running-min delta_k after each repetition
  int repetitions = 0;
  std::uint64_t master_seed = 0;
  int non_converged_fits = 0;
  ScalingParams scaling;
  std::vector<std::string> feature_names;  // retained (non-constant) features, in order
};

// Uniform balanced assignment: shuffle a half-ones label vector with the
// given stream.
AssignmentVector draw_balanced_assignment(std::size_t n, SplitMix64& rng);

// One repetition against an already-scaled feature matrix: draw assignment
// from derive_seed(master_seed, m), fit the propensity model, greedy-match.
RepetitionRecord run_repetition(const Eigen::MatrixXd& X, int m,
                                std::uint64_t master_seed, const FitConfig& fit_config);

// The full loop over m = 1..M on a scaled matrix. Each repetition draws from
// its own derived stream, so the outcome is identical for any thread count.
DesignOutcome run_bmw_scaled(const Eigen::MatrixXd& X, const DesignConfig& config);

// Validates the table, scales the requested features, runs the loop.
DesignOutcome run_bmw(const SubjectTable& table, const std::vector<std::string>& features,
                      const DesignConfig& config);

struct SweepPoint {
  int m = 0;
  double min_delta_k = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> curve;
  std::optional<int> elbow;
  std::uint64_t master_seed = 0;
};

struct SweepConfig {
  std::uint64_t master_seed = 0;
  int threads = 1;
  double epsilon = 0.01;  // relative-improvement threshold for the elbow
  FitConfig fit;
};

// Evaluates the running minimum of one max(grid)-length repetition stream at
// each grid point, so every grid value shares the same repetitions.
SweepResult sweep_M(const SubjectTable& table, const std::vector<std::string>& features,
                    const std::vector<int>& grid, const SweepConfig& config);

// Smallest grid M where the relative improvement over the previous point,
// (prev - cur) / curve[0], drops below epsilon and stays below to the end.
std::optional<int> find_elbow(const std::vector<SweepPoint>& curve, double epsilon);

// {1, 10, 20, ..., 1000}
std::vector<int> default_m_grid();

// Accepts "a,b,c" or "start:step:stop"; values must be strictly increasing
// positive integers.
std::vector<int> parse_m_grid(const std::string& text);

}  // namespace bmw
