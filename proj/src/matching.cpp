#include "bmw/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bmw {

namespace {

struct Groups {
  std::vector<std::size_t> control;
  std::vector<std::size_t> treatment;
};

Groups split_groups(const std::vector<double>& scores, const std::vector<int>& assignment) {
  if (scores.size() != assignment.size())
    throw std::invalid_argument("score count does not match assignment length");
  Groups g;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == 0)
      g.control.push_back(i);
    else if (assignment[i] == 1)
      g.treatment.push_back(i);
    else
      throw std::invalid_argument("assignment labels must be 0 or 1");
  }
  if (g.control.size() != g.treatment.size())
    throw std::invalid_argument("matching requires equal group sizes");
  for (std::size_t i : g.control)
    if (!std::isfinite(scores[i])) throw std::invalid_argument("non-finite propensity score");
  for (std::size_t i : g.treatment)
    if (!std::isfinite(scores[i])) throw std::invalid_argument("non-finite propensity score");
  return g;
}

void finalize(MatchPairing& out) {
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const MatchPair& a, const MatchPair& b) { return a.control < b.control; });
  out.total_distance = 0.0;
  for (const MatchPair& p : out.pairs) out.total_distance += p.distance;
}

}  // namespace

MatchPairing greedy_match(const std::vector<double>& scores,
                          const std::vector<int>& assignment) {
  Groups g = split_groups(scores, assignment);
  const std::size_t k = g.control.size();

  struct Edge {
    double d;
    std::size_t c, t;  // subject-table indices
  };
  std::vector<Edge> edges;
  edges.reserve(k * k);
  for (std::size_t c : g.control)
    for (std::size_t t : g.treatment)
      edges.push_back({std::abs(scores[c] - scores[t]), c, t});
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.c != b.c) return a.c < b.c;
    return a.t < b.t;
  });

  // Scanning the sorted edge list and taking each edge whose endpoints are
  // both still free reproduces the repeat-extract-global-minimum loop in one
  // pass.
  std::vector<char> used(scores.size(), 0);
  MatchPairing out;
  out.pairs.reserve(k);
  for (const Edge& e : edges) {
    if (used[e.c] || used[e.t]) continue;
    used[e.c] = used[e.t] = 1;
    out.pairs.push_back({e.c, e.t, e.d});
    if (out.pairs.size() == k) break;
  }
  finalize(out);
  return out;
}

MatchPairing optimal_match_oracle(const std::vector<double>& scores,
                                  const std::vector<int>& assignment) {
  Groups g = split_groups(scores, assignment);
  const std::size_t k = g.control.size();
  if (k > kOracleMaxSize)
    throw std::invalid_argument("optimal_match_oracle capped at 10 pairs");

  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);

  double best_total = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best = perm;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      total += std::abs(scores[g.control[i]] - scores[g.treatment[perm[i]]]);
    if (total < best_total) {
      best_total = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  MatchPairing out;
  out.pairs.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t c = g.control[i];
    std::size_t t = g.treatment[best[i]];
    out.pairs.push_back({c, t, std::abs(scores[c] - scores[t])});
  }
  finalize(out);
  return out;
}

}  // namespace bmw
