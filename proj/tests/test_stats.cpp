#include <doctest.h>

#include <cmath>
#include <vector>

#include "bmw/stats.hpp"

TEST_CASE("mean and variances on hand-computed values") {
  std::vector<double> v{0.0, 1.0};
  CHECK(bmw::mean(v) == doctest::Approx(0.5));
  CHECK(bmw::sample_variance(v) == doctest::Approx(0.5));  // ((0-.5)^2+(1-.5)^2)/1
  CHECK(bmw::population_variance(v) == doctest::Approx(0.25));
  CHECK(bmw::sample_variance({3.0}) == 0.0);
}

TEST_CASE("quantile interpolates linearly between order statistics") {
  std::vector<double> v{4.0, 1.0, 3.0, 2.0};  // sorted: 1 2 3 4
  CHECK(bmw::quantile(v, 0.0) == doctest::Approx(1.0));
  CHECK(bmw::quantile(v, 1.0) == doctest::Approx(4.0));
  CHECK(bmw::quantile(v, 0.5) == doctest::Approx(2.5));
  CHECK(bmw::quantile(v, 0.25) == doctest::Approx(1.75));  // pos = 0.75
}

TEST_CASE("correlation of exact linear data is +/-1, constants give 0") {
  std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  std::vector<double> y{2.0, 4.0, 6.0, 8.0};
  std::vector<double> z{8.0, 6.0, 4.0, 2.0};
  CHECK(bmw::sample_correlation(x, y) == doctest::Approx(1.0));
  CHECK(bmw::sample_correlation(x, z) == doctest::Approx(-1.0));
  CHECK(bmw::sample_correlation(x, {5.0, 5.0, 5.0, 5.0}) == 0.0);
}
