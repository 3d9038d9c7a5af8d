#pragma once

#include <memory>

#include "dwkb/action.hpp"
#include "dwkb/lattice.hpp"
#include "dwkb/momentum.hpp"
#include "dwkb/potential.hpp"

namespace dwkb {

struct ModelOptions {
  Complex z0{-0.25, 0.0};     // anchor in S' on the negative axis
  Complex z1{0.25, 0.0};      // anchor on the positive axis
  double delta_frac = 0.1;    // delta = delta_frac * d_x (R+ tube half-width)
  double sector_eps = 0.2;    // Stirling sector gap
  double seed_depth_frac = 0.6;  // c = frac * d_x; seeds live at Re z <= -c
  double seed_window_frac = 0.78;  // lattice anchors start near -frac * d_x
  double quad_tol = 1e-12;
};

// Bundles one momentum branch, its action cache and the normalization
// constants n0, n1, and evaluates every asymptotic law for a given shift h:
// the standard WKB form, G0 / G0-tilde / G1, the uniform Gamma law, the
// near-R+ form, and the basis solutions f+-.
class AsymptoticModel {
 public:
  AsymptoticModel(std::shared_ptr<const SpectralProblem> problem, double h,
                  ModelOptions options = {});

  const SpectralProblem& problem() const { return *problem_; }
  std::shared_ptr<const SpectralProblem> problem_ptr() const { return problem_; }
  const MomentumBranch& branch() const { return *branch_; }
  const ActionCache& action() const { return *action_; }
  double h() const { return h_; }
  Complex z0() const { return options_.z0; }
  Complex z1() const { return options_.z1; }
  double delta() const { return options_.delta_frac * problem_->strip().d_x; }
  double seed_depth() const { return options_.seed_depth_frac * problem_->strip().d_x; }
  const ModelOptions& options() const { return options_; }

  ScaledComplex n0() const { return n0_; }
  ScaledComplex n1() const { return n1_; }

  // e^{(i/h) int_{z0}^{z} p} / sqrt(sin p(z)) on S'.
  ScaledComplex wkb_leading(Complex z) const;

  // Uniform-law factor, analytic and nonvanishing on S.
  ScaledComplex G0(Complex z) const;
  // Independent evaluation through the p_up route (eq. tilde-G0 form).
  ScaledComplex G0_tilde(Complex z) const;
  // Mirror factor for the phi family, analytic on S.
  ScaledComplex G1(Complex z) const;

  // Gamma(1 - z/h) G0(z) n0; poles exactly on h N.
  ScaledComplex psi_uniform(Complex z) const;

  // Near-R+ form with the continued branch:
  // n0 e^{(i/h) int_0^z p_up} / ((1 - e^{2 pi i z / h}) sqrt(sin p_up)).
  ScaledComplex psi_near_Rplus(Complex z) const;

  // Leading term of phi (the mirror solution anchored at z1), valid away
  // from R-.
  ScaledComplex phi_standard(Complex z) const;
  // Gamma-law form of phi; matches the recursion-built phi.
  ScaledComplex phi_uniform(Complex z) const;

  ScaledComplex f_plus(Complex z) const;   // psi_uniform / n0
  ScaledComplex f_minus(Complex z) const;  // (1 - e^{2 pi i z/h}) Gamma(1 + z/h) G1

  // phi's momentum branch: equal to p on C+, continued through R+* below.
  Complex p_phi(Complex z) const;
  Complex sqrt_sin_phi(Complex z) const;

  // int_0^z p_up dzeta via the analytic reduction through the regularized
  // action (integrand p - i ln(-zeta) continued across R+).
  Complex action_up_from_zero(Complex z) const;
  // int_0^z p dzeta for z in S' (same reduction, S' branch of ln(-zeta)).
  Complex action_from_zero(Complex z) const;

  ScaledComplex periodic_factor(Complex z) const;  // 1 - e^{2 pi i z / h}

  // --- lattice bridge -----------------------------------------------------

  struct LatticeEval {
    ScaledComplex value;
    LatticeLine line;
    int k = 0;
  };

  // Exact psi by seeding the standard form deep in S_c on the horizontal
  // lattice line through z and running the recursion to z.
  LatticeEval psi_recursion(Complex z) const;
  // Mirror: exact phi seeded at Re z >= +c, recursion run leftward.
  LatticeEval phi_recursion(Complex z) const;

  ScaledComplex f_plus_recursion(Complex z) const;   // psi_recursion / n0
  ScaledComplex f_minus_recursion(Complex z) const;  // n1 (1 - q) phi_recursion

  // Full solutions on an explicit line (for Wronskian work).
  LatticeSolution psi_on_line(const LatticeLine& line) const;
  LatticeSolution phi_on_line(const LatticeLine& line) const;

  // Horizontal line through z whose left edge sits in the seed window.
  LatticeLine line_through(Complex z) const;

 private:
  std::shared_ptr<const SpectralProblem> problem_;
  std::shared_ptr<const MomentumBranch> branch_;
  std::shared_ptr<const ActionCache> action_;
  double h_;
  ModelOptions options_;
  ScaledComplex n0_, n1_;
};

}  // namespace dwkb
