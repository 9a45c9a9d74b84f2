#include "bmw/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_set>

#include "bmw/errors.hpp"

namespace bmw {

std::optional<std::size_t> SubjectTable::feature_index(const std::string& name) const {
  auto it = std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - feature_names.begin());
}

std::vector<double> SubjectTable::feature_column(const std::string& name) const {
  auto idx = feature_index(name);
  if (!idx) throw ValidationError("unknown feature: " + name);
  std::vector<double> col;
  col.reserve(subjects.size());
  for (const auto& s : subjects) col.push_back(s.features[*idx]);
  return col;
}

std::vector<double> SubjectTable::target_column() const {
  if (!target_name) throw ValidationError("table has no target column");
  std::vector<double> col;
  col.reserve(subjects.size());
  for (const auto& s : subjects) {
    col.push_back(s.target ? *s.target : std::numeric_limits<double>::quiet_NaN());
  }
  return col;
}

std::vector<std::string> SubjectTable::ids() const {
  std::vector<std::string> out;
  out.reserve(subjects.size());
  for (const auto& s : subjects) out.push_back(s.id);
  return out;
}

ValidationReport validate_for_design(const SubjectTable& table,
                                     const std::vector<std::string>& chosen_features,
                                     const std::optional<std::string>& target) {
  ValidationReport report;
  const std::size_t n = table.n_subjects();

  if (n < 4) report.errors.push_back("need at least 4 subjects, have " + std::to_string(n));
  if (n % 2 != 0) report.errors.push_back("N must be even for a balanced N/2 split, have " + std::to_string(n));

  // Subject ids: unique and non-empty.
  std::unordered_set<std::string> seen;
  for (const auto& s : table.subjects) {
    if (s.id.empty()) {
      report.errors.push_back("subject with empty id");
    } else if (!seen.insert(s.id).second) {
      report.errors.push_back("duplicate subject id: " + s.id);
    }
  }

  if (chosen_features.empty()) report.errors.push_back("no features chosen");

  std::set<std::string> chosen_seen;
  for (const auto& name : chosen_features) {
    if (target && name == *target) {
      report.errors.push_back("target variable '" + name +
                              "' must not be included in the propensity model features");
      continue;
    }
    if (!table.feature_index(name)) {
      report.errors.push_back("unknown feature: " + name);
      continue;
    }
    if (!chosen_seen.insert(name).second) {
      report.errors.push_back("duplicate feature: " + name);
    }
  }

  // Cell-level checks and constant-feature detection on the known columns.
  for (const auto& name : chosen_seen) {
    auto idx = *table.feature_index(name);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    bool bad_cell = false;
    for (const auto& s : table.subjects) {
      double v = s.features[idx];
      if (!std::isfinite(v)) {
        if (!bad_cell)
          report.errors.push_back("missing or non-finite value in feature '" + name +
                                  "' (subject " + s.id + ")");
        bad_cell = true;
        continue;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!bad_cell && n > 0 && lo == hi) {
      report.warnings.push_back("feature '" + name +
                                "' is constant; it will be excluded from the propensity model");
    }
  }

  if (target) {
    if (!table.target_name || *table.target_name != *target) {
      report.errors.push_back("table has no target column named '" + *target + "'");
    } else {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      bool bad_cell = false;
      for (const auto& s : table.subjects) {
        if (!s.target || !std::isfinite(*s.target)) {
          if (!bad_cell)
            report.errors.push_back("missing or non-finite target value (subject " + s.id + ")");
          bad_cell = true;
          continue;
        }
        lo = std::min(lo, *s.target);
        hi = std::max(hi, *s.target);
      }
      if (!bad_cell && n > 0 && lo == hi)
        report.warnings.push_back("target '" + *target + "' is constant; density plots will be skipped");
    }
  }

  const std::size_t i = chosen_seen.size();
  if (n >= 4 && i >= n / 4) {
    report.warnings.push_back("feature count " + std::to_string(i) +
                              " is large relative to N=" + std::to_string(n) +
                              " (i >= N/4); the propensity fit may be unstable");
  }

  return report;
}

void require_valid(const ValidationReport& report) {
  if (report.ok()) return;
  std::ostringstream msg;
  for (std::size_t i = 0; i < report.errors.size(); ++i) {
    if (i) msg << "; ";
    msg << report.errors[i];
  }
  throw ValidationError(msg.str());
}

namespace {

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
  if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
  const char* begin = cell.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  if (end == begin || (end && *end != '\0')) {
    throw IoError("row " + std::to_string(row + 2) + ", column '" + col +
                  "': not a number: '" + cell + "'");
  }
  return v;
}

}  // namespace

SubjectTable table_from_csv(const CsvTable& csv,
                            const std::optional<std::string>& target_name) {
  if (csv.header.empty() || csv.header[0] != "id")
    throw IoError("first CSV column must be named 'id'");

  SubjectTable table;
  std::optional<std::size_t> target_col;
  for (std::size_t c = 1; c < csv.header.size(); ++c) {
    if (target_name && csv.header[c] == *target_name) {
      if (target_col) throw IoError("duplicate target column '" + *target_name + "'");
      target_col = c;
    } else {
      table.feature_names.push_back(csv.header[c]);
    }
  }
  if (target_name) {
    if (!target_col) throw IoError("target column '" + *target_name + "' not in CSV header");
    table.target_name = *target_name;
  }

  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    SubjectRecord rec;
    rec.id = row[0];
    for (std::size_t c = 1; c < row.size(); ++c) {
      double v = parse_cell(row[c], r, csv.header[c]);
      if (target_col && c == *target_col) rec.target = v;
      else rec.features.push_back(v);
    }
    table.subjects.push_back(std::move(rec));
  }
  return table;
}

SubjectTable load_subject_table(const std::string& path,
                                const std::optional<std::string>& target_name) {
  return table_from_csv(read_csv(path), target_name);
}

std::string subject_table_to_csv(const SubjectTable& table) {
  CsvTable csv;
  csv.header.push_back("id");
  for (const auto& name : table.feature_names) csv.header.push_back(name);
  if (table.target_name) csv.header.push_back(*table.target_name);
  for (const auto& s : table.subjects) {
    std::vector<std::string> row;
    row.push_back(s.id);
    for (double v : s.features) {
      std::ostringstream cell;
      cell.precision(17);
      cell << v;
      row.push_back(cell.str());
    }
    if (table.target_name) {
      std::ostringstream cell;
      cell.precision(17);
      if (s.target) cell << *s.target;
      row.push_back(cell.str());
    }
    csv.rows.push_back(std::move(row));
  }
  return to_csv(csv);
}

}  // namespace bmw
