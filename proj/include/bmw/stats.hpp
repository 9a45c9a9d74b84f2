#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace bmw {

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Sample variance, n-1 denominator; 0 for fewer than two values.
inline double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double sample_sd(const std::vector<double>& v) {
  return std::sqrt(sample_variance(v));
}

// Population variance, n denominator.
inline double population_variance(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

inline double population_sd(const std::vector<double>& v) {
  return std::sqrt(population_variance(v));
}

// Linear-interpolation quantile (R type 7). p in [0, 1], values non-empty.
inline double quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values.front();
  double pos = p * static_cast<double>(values.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

inline double sample_correlation(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace bmw
