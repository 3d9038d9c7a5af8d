#pragma once

#include <utility>
#include <vector>

#include "dwkb/potential.hpp"
#include "dwkb/scaled_complex.hpp"

namespace dwkb {

class AsymptoticModel;

// Lattice line {theta + k h : k_min <= k <= k_max} inside S.  Unless
// pole_probe is set, every lattice point keeps a distance of at least
// 1e-3 * h from the pole at 0.
struct LatticeLine {
  Complex theta;
  double h = 0.0;
  int k_min = 0, k_max = 0;
  bool pole_probe = false;

  Complex point(int k) const { return theta + double(k) * h; }
  double pole_tolerance() const { return 1e-3 * h; }
};

enum class SeedFamily { psi_forward, phi_backward };

struct SeedProvenance {
  SeedFamily family = SeedFamily::psi_forward;
  int k0 = 0;                  // seeds occupy k0 and k0 + 1
  Complex at0{}, at1{};        // seed locations
  const char* formula = "";    // label of the seeding asymptotic
};

// Exact solution of psi(z+h) + psi(z-h) + w(z) psi(z) = 0 on a lattice line,
// produced by the three-term recursion from two seed values.  Values are
// carried in scaled (log-magnitude) form to survive exponential growth.
class LatticeSolution {
 public:
  const LatticeLine& line() const { return line_; }
  const SeedProvenance& provenance() const { return provenance_; }

  ScaledComplex at(int k) const;  // RangeError outside [k_min, k_max]

  // Largest relative residual of the recursion over interior points.
  double max_recurrence_residual(const SpectralProblem& problem) const;

  static LatticeSolution propagate(const SpectralProblem& problem, const LatticeLine& line,
                                   int k0, ScaledComplex seed0, ScaledComplex seed1,
                                   SeedProvenance provenance = {});

 private:
  LatticeLine line_;
  std::vector<ScaledComplex> values_;  // index k - k_min
  SeedProvenance provenance_;
};

// psi1(z+h) psi2(z) - psi1(z) psi2(z+h) at z = theta + k h.  Conserved in k
// by the recursion; h-periodic in the underlying solutions.
ScaledComplex wronskian(const LatticeSolution& a, const LatticeSolution& b, int k);

// Basis coefficients a, b with sol = a * basis1 + b * basis2 on the line.
// DegenerateBasis if |w(basis1, basis2)| < 1e-6.
std::pair<ScaledComplex, ScaledComplex> coefficients(const LatticeSolution& sol,
                                                     const LatticeSolution& basis1,
                                                     const LatticeSolution& basis2, int k);

// Standard WKB seed values (o(1) dropped) at lattice indices k0, k0+1.
// psi_forward requires both points in S_c = {Re z < -c}; phi_backward
// mirrors at {Re z > +c}.
std::pair<ScaledComplex, ScaledComplex> seed_wkb(const AsymptoticModel& model,
                                                 const LatticeLine& line, int k0,
                                                 SeedFamily family = SeedFamily::psi_forward);

enum class ProbeKind { pole_of_psi, zero_of_f_minus, pole_of_phi };

struct ProbeRecord {
  ScaledComplex limit;        // residue of the pole / slope of the zero
  double fit_residual = 1.0;  // max relative deviation of the linear fit
  bool simple = false;        // residual below 5% and limit bounded away from 0
  std::vector<double> deltas;
};

// Simple pole / simple zero probe at n*h (pole_of_phi probes -n*h).
// Evaluates the recursion solution at nh + delta for shrinking offsets on
// parallel lattice lines and fits value*(z - nh) (resp. value/(z - nh))
// linearly in delta.
ProbeRecord residue_probe(const AsymptoticModel& model, int n, ProbeKind kind);

}  // namespace dwkb
