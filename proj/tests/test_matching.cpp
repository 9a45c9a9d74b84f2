#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "bmw/matching.hpp"
#include "bmw/rng.hpp"

namespace {

// scores/assignment builder: controls first, then treatments.
struct Instance {
  std::vector<double> scores;
  std::vector<int> assignment;
};

Instance make_instance(const std::vector<double>& control, const std::vector<double>& treatment) {
  Instance inst;
  for (double s : control) {
    inst.scores.push_back(s);
    inst.assignment.push_back(0);
  }
  for (double s : treatment) {
    inst.scores.push_back(s);
    inst.assignment.push_back(1);
  }
  return inst;
}

Instance random_instance(std::size_t pairs, bmw::SplitMix64& rng) {
  std::vector<double> control(pairs), treatment(pairs);
  for (auto& s : control) s = rng.uniform();
  for (auto& s : treatment) s = rng.uniform();
  return make_instance(control, treatment);
}

}  // namespace

TEST_CASE("closest pairs win") {
  Instance inst = make_instance({0.1, 0.5}, {0.2, 0.6});
  bmw::MatchPairing p = bmw::greedy_match(inst.scores, inst.assignment);
  CHECK(p.total_distance == doctest::Approx(0.2));
  REQUIRE(p.pairs.size() == 2);
  CHECK(p.pairs[0].control == 0);
  CHECK(p.pairs[0].treatment == 2);  // 0.1 with 0.2
  CHECK(p.pairs[1].control == 1);
  CHECK(p.pairs[1].treatment == 3);  // 0.5 with 0.6
}

TEST_CASE("identical score multisets match at zero distance") {
  Instance inst = make_instance({0.3, 0.7}, {0.3, 0.7});
  CHECK(bmw::greedy_match(inst.scores, inst.assignment).total_distance == 0.0);
  CHECK(bmw::optimal_match_oracle(inst.scores, inst.assignment).total_distance == 0.0);
}

TEST_CASE("single pair is forced") {
  Instance inst = make_instance({0.4}, {0.9});
  bmw::MatchPairing p = bmw::greedy_match(inst.scores, inst.assignment);
  REQUIRE(p.pairs.size() == 1);
  CHECK(p.total_distance == doctest::Approx(0.5));
  CHECK(bmw::optimal_match_oracle(inst.scores, inst.assignment).total_distance ==
        doctest::Approx(0.5));
}

TEST_CASE("pairing is a bijection covering every subject") {
  bmw::SplitMix64 rng(5);
  Instance inst = random_instance(7, rng);
  bmw::MatchPairing p = bmw::greedy_match(inst.scores, inst.assignment);
  REQUIRE(p.pairs.size() == 7);
  std::set<std::size_t> controls, treatments;
  for (const bmw::MatchPair& pair : p.pairs) {
    CHECK(inst.assignment[pair.control] == 0);
    CHECK(inst.assignment[pair.treatment] == 1);
    controls.insert(pair.control);
    treatments.insert(pair.treatment);
    CHECK(pair.distance ==
          doctest::Approx(std::abs(inst.scores[pair.control] - inst.scores[pair.treatment])));
  }
  CHECK(controls.size() == 7);
  CHECK(treatments.size() == 7);
}

TEST_CASE("greedy is never better than the exhaustive oracle") {
  bmw::SplitMix64 rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    Instance inst = random_instance(1 + rng.below(5), rng);
    double greedy = bmw::greedy_match(inst.scores, inst.assignment).total_distance;
    double best = bmw::optimal_match_oracle(inst.scores, inst.assignment).total_distance;
    CHECK(greedy >= best - 1e-12);
  }
}

TEST_CASE("a known instance where greedy is strictly suboptimal") {
  // Greedy takes |0.50-0.51| = 0.01 first, leaving 0.90 with 0.10 (0.80):
  // total 0.81. Pairing the other way costs 0.40 + 0.39 = 0.79.
  Instance inst = make_instance({0.50, 0.90}, {0.51, 0.10});
  double greedy = bmw::greedy_match(inst.scores, inst.assignment).total_distance;
  double best = bmw::optimal_match_oracle(inst.scores, inst.assignment).total_distance;
  CHECK(greedy == doctest::Approx(0.81));
  CHECK(best == doctest::Approx(0.79));
}

TEST_CASE("swapping group roles preserves the total distance") {
  bmw::SplitMix64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    Instance inst = random_instance(4, rng);
    std::vector<int> flipped = inst.assignment;
    for (int& label : flipped) label = 1 - label;
    CHECK(bmw::greedy_match(inst.scores, inst.assignment).total_distance ==
          doctest::Approx(bmw::greedy_match(inst.scores, flipped).total_distance));
  }
}

TEST_CASE("constant score offsets cancel out") {
  Instance inst = make_instance({0.2, 0.4, 0.3}, {0.25, 0.5, 0.1});
  double base = bmw::greedy_match(inst.scores, inst.assignment).total_distance;
  std::vector<double> shifted = inst.scores;
  for (double& s : shifted) s += 0.2;
  CHECK(bmw::greedy_match(shifted, inst.assignment).total_distance == doctest::Approx(base));
}

TEST_CASE("deterministic under repeated calls and stable tie-breaks") {
  Instance inst = make_instance({0.5, 0.5}, {0.5, 0.5});
  bmw::MatchPairing a = bmw::greedy_match(inst.scores, inst.assignment);
  bmw::MatchPairing b = bmw::greedy_match(inst.scores, inst.assignment);
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    CHECK(a.pairs[i].control == b.pairs[i].control);
    CHECK(a.pairs[i].treatment == b.pairs[i].treatment);
  }
  // All distances tie at zero; ascending-index tie-break pairs 0-2 and 1-3.
  CHECK(a.pairs[0].control == 0);
  CHECK(a.pairs[0].treatment == 2);
}

TEST_CASE("shape errors are rejected") {
  CHECK_THROWS_AS(bmw::greedy_match({0.1, 0.2, 0.3}, {0, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(bmw::greedy_match({0.1, 0.2}, {0, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(bmw::greedy_match({0.1, 0.2}, {0, 2}), std::invalid_argument);

  bmw::SplitMix64 rng(9);
  Instance big = random_instance(11, rng);
  CHECK_THROWS_AS(bmw::optimal_match_oracle(big.scores, big.assignment),
                  std::invalid_argument);
}
