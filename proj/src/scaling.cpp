#include "bmw/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bmw/errors.hpp"

namespace bmw {

std::vector<std::string> ScalingParams::retained_names() const {
  std::vector<std::string> names;
  names.reserve(retained.size());
  for (const auto& r : retained) names.push_back(r.name);
  return names;
}

ScalingParams fit_minmax(const SubjectTable& table,
                         const std::vector<std::string>& features) {
  ScalingParams params;
  for (const auto& name : features) {
    auto idx = table.feature_index(name);
    if (!idx) throw ValidationError("unknown feature: " + name);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& s : table.subjects) {
      double v = s.features[*idx];
      if (!std::isfinite(v)) throw ValidationError("non-finite value in feature '" + name + "'");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo == hi) {
      params.excluded_features.push_back(name);
    } else {
      params.retained.push_back({name, lo, hi});
    }
  }
  return params;
}

ScaledMatrix apply_minmax(const ScalingParams& params, const SubjectTable& table) {
  ScaledMatrix out;
  out.feature_names = params.retained_names();
  const int n = table.n_subjects();
  out.values.resize(n, static_cast<Eigen::Index>(params.retained.size()));
  for (std::size_t c = 0; c < params.retained.size(); ++c) {
    const auto& range = params.retained[c];
    auto idx = table.feature_index(range.name);
    if (!idx) throw ValidationError("table lacks feature '" + range.name + "' required by scaling params");
    for (int r = 0; r < n; ++r) {
      double v = table.subjects[r].features[*idx];
      double scaled = (v - range.min) / (range.max - range.min);
      if (scaled < 0.0 || scaled > 1.0) {
        scaled = std::clamp(scaled, 0.0, 1.0);
        ++out.clamped_count;
      }
      out.values(r, static_cast<Eigen::Index>(c)) = scaled;
    }
  }
  return out;
}

ValueRange fit_range(const std::vector<double>& values) {
  ValueRange range{std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity()};
  for (double v : values) {
    range.min = std::min(range.min, v);
    range.max = std::max(range.max, v);
  }
  return range;
}

std::vector<double> scale_with_range(ValueRange range, const std::vector<double>& values,
                                     int* clamped) {
  std::vector<double> out;
  out.reserve(values.size());
  double span = range.max - range.min;
  for (double v : values) {
    if (span <= 0.0) {
      out.push_back(0.0);  // degenerate range: map everything to 0
      continue;
    }
    double scaled = (v - range.min) / span;
    if (scaled < 0.0 || scaled > 1.0) {
      scaled = std::clamp(scaled, 0.0, 1.0);
      if (clamped) ++(*clamped);
    }
    out.push_back(scaled);
  }
  return out;
}

}  // namespace bmw
