#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bmw/dataset.hpp"

namespace testutil {

// Builds a table from row-major feature values; ids are s1, s2, ...
inline bmw::SubjectTable make_table(const std::vector<std::string>& feature_names,
                                    const std::vector<std::vector<double>>& rows,
                                    const std::vector<double>& targets = {}) {
  bmw::SubjectTable table;
  table.feature_names = feature_names;
  if (!targets.empty()) table.target_name = "target";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bmw::SubjectRecord rec;
    rec.id = "s" + std::to_string(i + 1);
    rec.features = rows[i];
    if (!targets.empty()) rec.target = targets[i];
    table.subjects.push_back(std::move(rec));
  }
  return table;
}

// P(X >= w) for X ~ Binomial(n, 1/2), exact via log-binomials.
inline double binomial_upper_tail(int n, int w) {
  double tail = 0.0;
  for (int k = w; k <= n; ++k) {
    double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    tail += std::exp(log_choose - n * std::log(2.0));
  }
  return tail;
}

// Trapezoidal integral of y over x.
inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double total = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i)
    total += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return total;
}

}  // namespace testutil
