#pragma once

#include <cstddef>
#include <vector>

namespace bmw {

// One matched pair: indices into the subject table plus the propensity
// distance that pairing contributed.
struct MatchPair {
  std::size_t control = 0;
  std::size_t treatment = 0;
  double distance = 0.0;
};

struct MatchPairing {
  std::vector<MatchPair> pairs;
  double total_distance = 0.0;  // sum of pair distances
};

// Pairs every control with a distinct treatment subject, repeatedly taking
// the globally closest free pair. Distances are |score_c - score_t|; ties
// break on (control index, treatment index) so results are deterministic.
MatchPairing greedy_match(const std::vector<double>& scores,
                          const std::vector<int>& assignment);

// Exhaustive minimum-cost pairing for small problems; used as a test oracle
// and intentionally capped.
inline constexpr std::size_t kOracleMaxSize = 10;
MatchPairing optimal_match_oracle(const std::vector<double>& scores,
                                  const std::vector<int>& assignment);

}  // namespace bmw
