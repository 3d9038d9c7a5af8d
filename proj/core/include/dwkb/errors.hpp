#pragma once

#include <stdexcept>
#include <string>

namespace dwkb {

enum class errc {
  pole_hit,
  outside_strip,
  non_convergence,
  ambiguous_branch,
  turning_point,
  step_collapse,
  extrapolation_unstable,
  quadrature_failure,
  not_vertical,
  pole_of_gamma,
  outside_sector,
  integer_argument,
  outside_seed_region,
  pole_on_lattice,
  overflow,
  range_error,
  degenerate_basis,
  periodic_zero,
  parse_error,
  validation_error,
  io_error,
  invalid_argument,
};

inline const char* errc_name(errc c) noexcept {
  switch (c) {
    case errc::pole_hit: return "PoleHit";
    case errc::outside_strip: return "OutsideStrip";
    case errc::non_convergence: return "NonConvergence";
    case errc::ambiguous_branch: return "AmbiguousBranch";
    case errc::turning_point: return "TurningPoint";
    case errc::step_collapse: return "StepCollapse";
    case errc::extrapolation_unstable: return "ExtrapolationUnstable";
    case errc::quadrature_failure: return "QuadratureFailure";
    case errc::not_vertical: return "NotVertical";
    case errc::pole_of_gamma: return "PoleOfGamma";
    case errc::outside_sector: return "OutsideSector";
    case errc::integer_argument: return "IntegerArgument";
    case errc::outside_seed_region: return "OutsideSeedRegion";
    case errc::pole_on_lattice: return "PoleOnLattice";
    case errc::overflow: return "Overflow";
    case errc::range_error: return "RangeError";
    case errc::degenerate_basis: return "DegenerateBasis";
    case errc::periodic_zero: return "PeriodicZero";
    case errc::parse_error: return "ParseError";
    case errc::validation_error: return "ValidationError";
    case errc::io_error: return "IoError";
    case errc::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dwkb
