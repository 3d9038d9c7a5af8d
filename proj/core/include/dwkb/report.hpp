#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "dwkb/scaled_complex.hpp"

namespace dwkb {

// One (suite, h) cell of a sweep.
struct SuiteCell {
  std::string suite;
  double h = 0.0;
  double max_rel_error = 0.0;
  double mean_error = 0.0;
  Complex worst_point{};
  double runtime_sec = 0.0;
  bool pass = false;
  std::map<std::string, double> extra;  // suite-specific metrics
  std::string error;                    // populated when the suite itself failed
};

struct SweepReport {
  std::string schema_version = "1";
  std::string timestamp;  // excluded from determinism comparisons
  std::string potential;
  Complex energy{};
  double d_x = 0.0, d_y = 0.0;
  std::vector<double> h_list;
  std::vector<SuiteCell> cells;  // sorted by (suite, descending h)

  bool overall_pass() const;
};

enum class ReportFormat { csv, json };

// CSV: header row, then one row per (suite, h, metric), RFC-4180 quoting.
void emit_csv(const SweepReport& report, std::ostream& out);
// JSON: schema-versioned document, stable key order.
void emit_json(const SweepReport& report, std::ostream& out);

// Writes to the destination path ("-" for stdout).  IoError on failure.
void emit(const SweepReport& report, ReportFormat format, const std::string& destination);

}  // namespace dwkb
