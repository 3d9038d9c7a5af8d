#pragma once

#include <string>
#include <variant>
#include <vector>

#include "dwkb/scaled_complex.hpp"

namespace dwkb {

struct Strip {
  double d_x = 0.0;
  double d_y = 0.0;
  bool contains(Complex z) const noexcept {
    return std::abs(z.real()) < d_x && std::abs(z.imag()) < d_y;
  }
};

struct Rect {
  double re_min, re_max, im_min, im_max;
  bool contains(Complex z) const noexcept {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
};

// Closed catalog of analytic parts: polynomials, rationals whose denominator
// has no root in the strip, and lambda * (cot(pi z) - 1/(pi z)).
struct PolyTerm {
  std::vector<Complex> coeffs;  // ascending powers
};
struct RationalTerm {
  std::vector<Complex> num, den;  // den(0) != 0
};
struct CotTerm {
  Complex lambda;
};
using AnalyticTerm = std::variant<PolyTerm, RationalTerm, CotTerm>;

// v(z) = residue / z + analytic(z).  The analytic part is pole-free on the
// strip the potential is attached to (validated by SpectralProblem).
class MeromorphicPotential {
 public:
  MeromorphicPotential(Complex residue, std::vector<AnalyticTerm> terms, std::string description);

  // Pole-free variant (residue exactly zero) for sanity configurations with
  // constant or analytic coefficients; the primary constructor rejects
  // residue == 0.
  static MeromorphicPotential analytic(std::vector<AnalyticTerm> terms, std::string description);

  Complex residue() const { return residue_; }
  bool has_pole() const { return residue_ != Complex(0.0); }
  const std::vector<AnalyticTerm>& terms() const { return terms_; }
  const std::string& description() const { return description_; }

  Complex value(Complex z) const;       // residue/z + analytic(z), unguarded
  Complex derivative(Complex z) const;  // d/dz of the above

  // Taylor coefficients of the analytic part at 0, orders 0..order.
  std::vector<Complex> taylor_analytic(int order) const;

 private:
  MeromorphicPotential() = default;
  Complex residue_{};
  std::vector<AnalyticTerm> terms_;
  std::string description_;
};

struct LaurentData {
  Complex residue;                    // coefficient of 1/z in w
  std::vector<Complex> coefficients;  // Taylor coefficients c_0..c_order of w - residue/z
};

struct RegularityReport {
  bool regular = false;
  double min_abs_im_p = 0.0;  // margin over the sample grid
  Complex worst_point{};
  std::vector<Complex> turning_points_found;
};

// w(z) = v(z) - E on the strip S; the only strip pole of w sits at 0 and is
// simple.
class SpectralProblem {
 public:
  SpectralProblem(MeromorphicPotential v, Complex energy, Strip strip, double pole_guard = 1e-12);

  const MeromorphicPotential& potential() const { return potential_; }
  Complex energy() const { return energy_; }
  const Strip& strip() const { return strip_; }
  double pole_guard() const { return pole_guard_; }

  // w(z) = v(z) - E.  Raises PoleHit within pole_guard of 0 (when the
  // potential has a pole) and OutsideStrip outside S.
  Complex eval(Complex z) const;
  Complex eval_derivative(Complex z) const;

  // Laurent data of w at 0; order <= 16.
  LaurentData laurent(int order) const;

  // All roots of w(z) = +-2 in the region, polished to |w -+ 2| < 1e-10 and
  // deduplicated within 1e-8.  Sorted by (Re, Im) for determinism.
  std::vector<Complex> turning_points(const Rect& region, int seeds_per_axis) const;

  // True iff the strip minus the pole guard contains no turning point and
  // |Im p| stays positive on a dense sample grid.
  RegularityReport verify_regular(int grid_per_axis = 48, int seeds_per_axis = 24) const;

 private:
  MeromorphicPotential potential_;
  Complex energy_{};
  Strip strip_{};
  double pole_guard_ = 1e-12;
};

}  // namespace dwkb
