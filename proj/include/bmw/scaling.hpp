#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bmw/dataset.hpp"

namespace bmw {

struct FeatureRange {
  std::string name;
  double min = 0.0;
  double max = 0.0;
};

// Column-wise min/max fitted once on the observation table. Immutable after
// fit; apply is pure. Features with max == min carry no information and are
// excluded rather than scaled.
struct ScalingParams {
  std::vector<FeatureRange> retained;  // max > min, in chosen-feature order
  std::vector<std::string> excluded_features;

  std::vector<std::string> retained_names() const;
};

ScalingParams fit_minmax(const SubjectTable& table,
                         const std::vector<std::string>& features);

struct ScaledMatrix {
  Eigen::MatrixXd values;  // N x retained, every entry in [0,1]
  std::vector<std::string> feature_names;
  int clamped_count = 0;  // entries outside the fitted range (reused params)
};

// v -> (v - min) / (max - min) per retained feature. Values outside the
// fitted range (params reused on a later table) are clamped into [0,1];
// clamped_count reports how many, so callers can warn.
ScaledMatrix apply_minmax(const ScalingParams& params, const SubjectTable& table);

struct ValueRange {
  double min = 0.0;
  double max = 0.0;
};

ValueRange fit_range(const std::vector<double>& values);
std::vector<double> scale_with_range(ValueRange range, const std::vector<double>& values,
                                     int* clamped = nullptr);

}  // namespace bmw
