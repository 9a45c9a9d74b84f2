#pragma once

#include <cstddef>
#include <vector>

namespace bmw {

// Per-subject group label in table order: 0 = control (A), 1 = treatment (B).
struct AssignmentVector {
  std::vector<int> labels;

  int n() const { return static_cast<int>(labels.size()); }

  int count_treatment() const {
    int c = 0;
    for (int v : labels) c += v;
    return c;
  }

  bool balanced() const { return 2 * count_treatment() == n(); }

  std::vector<std::size_t> control_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == 0) out.push_back(i);
    return out;
  }

  std::vector<std::size_t> treatment_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == 1) out.push_back(i);
    return out;
  }

  bool operator==(const AssignmentVector&) const = default;
};

}  // namespace bmw
