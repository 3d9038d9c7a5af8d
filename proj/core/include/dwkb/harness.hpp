#pragma once

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dwkb/asymptotics.hpp"
#include "dwkb/potential.hpp"
#include "dwkb/report.hpp"

namespace dwkb {

// Verification suites runnable per shift parameter h.
enum class Suite {
  wkb,
  uniform_gamma,
  near_rplus,
  basis_wronskian,
  pole_structure,
  branch_identities,
  stirling,
  continuation_principle,
};

const std::vector<std::pair<Suite, std::string>>& suite_catalog();
std::optional<Suite> suite_from_name(const std::string& name);

struct SweepConfig {
  std::string potential_expr;
  Complex energy{};
  double d_x = 0.0, d_y = 0.0;
  double pole_guard = 1e-12;
  std::vector<double> h_list;  // strictly decreasing, each < strip width / 20
  Complex z0{}, z1{};
  double delta_frac = 0.1;
  double sector_eps = 0.2;
  std::vector<Suite> suites;  // in catalog order, deduplicated
  uint64_t sample_seed = 12345;
  int samples_uniform = 50;
  int samples_wkb = 40;
  int samples_near = 20;
  int samples_branch = 20;
  // Continuation-principle segment; NaN entries default to height 0.3 d_y
  // over [z0, -z0].
  double continuation_height = std::numeric_limits<double>::quiet_NaN();
  double continuation_re_min = std::numeric_limits<double>::quiet_NaN();
  double continuation_re_max = std::numeric_limits<double>::quiet_NaN();
  std::map<std::string, double> thresholds;  // merged over built-in defaults
  // Explicit sample-point lists ([samples] section); suites fall back to the
  // seeded generators when a set is absent.
  std::map<std::string, std::vector<Complex>> sample_sets;

  std::shared_ptr<const SpectralProblem> problem;  // compiled and validated
  RegularityReport regularity;                     // recorded by parse_config

  double threshold(const std::string& key) const;
};

// Built-in threshold defaults (derived from development oracle runs on the
// reference potential; overridable per config).
const std::map<std::string, double>& default_thresholds();

// Compile a potential expression over the closed catalog:
// sums of c, c*z^k, c/z, c/(polynomial), c*cot(pi*z).
MeromorphicPotential compile_potential(const std::string& expr);
// Constant complex expression (for the energy field).
Complex parse_complex_expr(const std::string& expr);

// Parses the key = value / [section] config text.  ParseError carries
// line/column; ValidationError names the violated invariant.  Runs
// verify_regular on the compiled problem and records the result.
SweepConfig parse_config(const std::string& text);

// Runs every configured suite for every h.  Deterministic for identical
// configs; a suite failure is recorded in its cells, never a global abort.
SweepReport run(const SweepConfig& config, int jobs = 1, bool verbose = false);

}  // namespace dwkb
