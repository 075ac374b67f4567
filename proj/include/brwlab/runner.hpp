#pragma once

// Experiment dispatch and report emission.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "brwlab/config.hpp"

namespace brw {

inline constexpr const char* kReportSchema = "brwlab-report/1";
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitReproduce = 4 };

/// Maps an exception escaping run_experiment to the CLI exit code.
int exit_code_for(const std::exception& e);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string str() const;
};

/// Doubles in CSV cells: %.17g, so values round-trip exactly.
std::string csv_number(double v);

struct Report {
  nlohmann::json json;
  CsvTable csv;
  int exit_code = kExitOk;
};

/// Validates the config, runs the command and assembles the report.
Report run_experiment(const ExperimentConfig& config);

/// Writes <out>.json and/or <out>.csv, or to `console` when out is empty.
void emit_report(const Report& report, const ExperimentConfig& config, std::ostream& console);

struct ReproRow {
  std::string name;
  std::string group;  // closed_form, dp, property, monte_carlo
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  /// abs: |value - expected| <= tolerance; rel: relative; le: value <= expected + tolerance;
  /// ge: value >= expected - tolerance.
  std::string mode = "abs";
  bool passed = false;
};

struct ReproduceOptions {
  /// Substring filter on row names; rows whose name does not contain it are skipped.
  std::string filter;
  std::uint64_t seed = 20240611;
  /// When set, only rows whose name is in the list run (an empty list runs nothing).
  std::optional<std::vector<std::string>> only;
};

std::vector<ReproRow> reproduce_reference_tables(const ReproduceOptions& options = {});

}  // namespace brw
