#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bmw/csv.hpp"

namespace bmw {

struct SubjectRecord {
  std::string id;
  std::vector<double> features;  // one value per SubjectTable::feature_names
  std::optional<double> target;
};

// The single source of truth for subjects, features and the target metric.
// Immutable after construction; safe to share across threads.
struct SubjectTable {
  std::vector<SubjectRecord> subjects;
  std::vector<std::string> feature_names;
  std::optional<std::string> target_name;

  std::size_t n_subjects() const { return subjects.size(); }
  std::size_t n_features() const { return feature_names.size(); }

  std::optional<std::size_t> feature_index(const std::string& name) const;
  std::vector<double> feature_column(const std::string& name) const;  // throws on unknown name
  std::vector<double> target_column() const;                          // throws if no target
  std::vector<std::string> ids() const;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

// Checks a table against the design preconditions. Pure: the same inputs
// always yield the same report. Errors: target listed among chosen features,
// odd N, N < 4, unknown/duplicate feature names, duplicate or empty subject
// ids, missing or non-finite values. Warnings: constant features (excluded
// from the propensity model downstream), feature count >= N/4, constant
// target.
ValidationReport validate_for_design(const SubjectTable& table,
                                     const std::vector<std::string>& chosen_features,
                                     const std::optional<std::string>& target);

// Throws ValidationError with all messages joined if the report has errors.
void require_valid(const ValidationReport& report);

// CSV layout: first column `id`, remaining columns named by the header.
// `target_name`, when given, must be a header column; it is pulled out of
// the feature set. Empty cells become NaN so validation can report them;
// cells that are not numbers at all raise IoError.
SubjectTable table_from_csv(const CsvTable& csv,
                            const std::optional<std::string>& target_name);
SubjectTable load_subject_table(const std::string& path,
                                const std::optional<std::string>& target_name);

std::string subject_table_to_csv(const SubjectTable& table);

}  // namespace bmw
