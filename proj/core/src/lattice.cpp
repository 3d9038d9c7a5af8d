#include "dwkb/lattice.hpp"

#include <cmath>

#include "dwkb/asymptotics.hpp"
#include "dwkb/errors.hpp"

namespace dwkb {

namespace {

void validate_line(const SpectralProblem& problem, const LatticeLine& line) {
  if (line.h <= 0.0) raise(errc::validation_error, "lattice step h must be positive");
  if (line.k_max < line.k_min + 1)
    raise(errc::validation_error, "lattice line needs at least two points");
  for (int k = line.k_min; k <= line.k_max; ++k) {
    Complex z = line.point(k);
    if (!problem.strip().contains(z)) raise(errc::outside_strip, "lattice point outside S");
    if (problem.potential().has_pole()) {
      double dist = std::abs(z);
      if (dist <= problem.pole_guard())
        raise(errc::pole_on_lattice, "lattice point inside the pole guard");
      if (!line.pole_probe && dist <= line.pole_tolerance())
        raise(errc::pole_on_lattice, "lattice point within pole tolerance of 0");
    }
  }
}

// One scaled recursion step: result = -w * u - v.
ScaledComplex recursion_step(Complex w, const ScaledComplex& u, const ScaledComplex& v) {
  return -(ScaledComplex::from(w) * u) - v;
}

}  // namespace

ScaledComplex LatticeSolution::at(int k) const {
  if (k < line_.k_min || k > line_.k_max)
    raise(errc::range_error, "lattice index outside the solution range");
  return values_[size_t(k - line_.k_min)];
}

LatticeSolution LatticeSolution::propagate(const SpectralProblem& problem, const LatticeLine& line,
                                           int k0, ScaledComplex seed0, ScaledComplex seed1,
                                           SeedProvenance provenance) {
  validate_line(problem, line);
  if (k0 < line.k_min || k0 + 1 > line.k_max)
    raise(errc::range_error, "seed indices outside the lattice range");

  LatticeSolution sol;
  sol.line_ = line;
  sol.provenance_ = provenance;
  sol.provenance_.k0 = k0;
  sol.values_.assign(size_t(line.k_max - line.k_min + 1), ScaledComplex());
  auto slot = [&](int k) -> ScaledComplex& { return sol.values_[size_t(k - line.k_min)]; };
  slot(k0) = seed0;
  slot(k0 + 1) = seed1;

  constexpr double kLogBound = 1e9;
  // Forward: psi(z + h) = -w(z) psi(z) - psi(z - h).
  for (int k = k0 + 1; k < line.k_max; ++k) {
    Complex w = problem.eval(line.point(k));
    slot(k + 1) = recursion_step(w, slot(k), slot(k - 1));
    if (slot(k + 1).log_abs() > kLogBound) raise(errc::overflow, "lattice value log-bound hit");
  }
  // Backward: psi(z - h) = -w(z) psi(z) - psi(z + h).
  for (int k = k0; k > line.k_min; --k) {
    Complex w = problem.eval(line.point(k));
    slot(k - 1) = recursion_step(w, slot(k), slot(k + 1));
    if (slot(k - 1).log_abs() > kLogBound) raise(errc::overflow, "lattice value log-bound hit");
  }
  return sol;
}

double LatticeSolution::max_recurrence_residual(const SpectralProblem& problem) const {
  double worst = 0.0;
  for (int k = line_.k_min + 1; k < line_.k_max; ++k) {
    ScaledComplex wpsi = ScaledComplex::from(problem.eval(line_.point(k))) * at(k);
    ScaledComplex sum = at(k + 1) + at(k - 1) + wpsi;
    double scale = std::max({at(k + 1).log_abs(), at(k - 1).log_abs(), wpsi.log_abs()});
    if (sum.is_zero()) continue;
    worst = std::max(worst, std::exp(sum.log_abs() - scale));
  }
  return worst;
}

ScaledComplex wronskian(const LatticeSolution& a, const LatticeSolution& b, int k) {
  const auto& la = a.line();
  const auto& lb = b.line();
  if (la.theta != lb.theta || la.h != lb.h)
    raise(errc::invalid_argument, "wronskian requires solutions on the same lattice line");
  if (k < la.k_min || k + 1 > la.k_max || k < lb.k_min || k + 1 > lb.k_max)
    raise(errc::range_error, "wronskian needs k and k+1 in range");
  return a.at(k + 1) * b.at(k) - a.at(k) * b.at(k + 1);
}

std::pair<ScaledComplex, ScaledComplex> coefficients(const LatticeSolution& sol,
                                                     const LatticeSolution& basis1,
                                                     const LatticeSolution& basis2, int k) {
  ScaledComplex denom = wronskian(basis1, basis2, k);
  if (denom.is_zero() || denom.log_abs() < std::log(1e-6))
    raise(errc::degenerate_basis, "basis Wronskian below 1e-6");
  ScaledComplex a = wronskian(sol, basis2, k) / denom;
  ScaledComplex b = wronskian(basis1, sol, k) / denom;
  return {a, b};
}

std::pair<ScaledComplex, ScaledComplex> seed_wkb(const AsymptoticModel& model,
                                                 const LatticeLine& line, int k0,
                                                 SeedFamily family) {
  Complex za = line.point(k0), zb = line.point(k0 + 1);
  double c = model.seed_depth();
  if (family == SeedFamily::psi_forward) {
    if (za.real() > -c || zb.real() > -c)
      raise(errc::outside_seed_region, "psi seeds must lie in S_c (Re z <= -c)");
    return {model.wkb_leading(za), model.wkb_leading(zb)};
  }
  if (za.real() < c || zb.real() < c)
    raise(errc::outside_seed_region, "phi seeds must lie at Re z >= +c");
  return {model.phi_standard(za), model.phi_standard(zb)};
}

ProbeRecord residue_probe(const AsymptoticModel& model, int n, ProbeKind kind) {
  const SpectralProblem& problem = model.problem();
  const double h = model.h();
  const double d_x = problem.strip().d_x;
  if (kind == ProbeKind::zero_of_f_minus ? n < 0 : n < 1)
    raise(errc::invalid_argument, "pole probes require n >= 1, zero probes n >= 0");
  const double center = (kind == ProbeKind::pole_of_phi ? -n : n) * h;
  const double max_offset = 0.016 * h;
  if (std::abs(center) + max_offset >= d_x)
    raise(errc::outside_strip, "probe point outside the strip");

  ProbeRecord record;
  std::vector<ScaledComplex> scaled;
  // The analytic remainder next to a lattice pole varies on the scale h/pi
  // (the h-periodic factor), so the probe offsets stay well below that.
  for (double frac : {0.004, 0.008, 0.016}) {
    for (double sign : {1.0, -1.0}) {
      double delta = sign * frac * h;
      Complex z(center + delta, 0.0);
      switch (kind) {
        case ProbeKind::pole_of_psi:
          scaled.push_back(model.psi_recursion(z).value * Complex(delta, 0.0));
          break;
        case ProbeKind::zero_of_f_minus:
          scaled.push_back(model.f_minus_recursion(z) / Complex(delta, 0.0));
          break;
        case ProbeKind::pole_of_phi:
          scaled.push_back(model.phi_recursion(z).value * Complex(delta, 0.0));
          break;
      }
      record.deltas.push_back(delta);
    }
  }
  // Shift everything by the common log scale, then fit u = a + b * delta.
  double log_scale = scaled.front().log_abs();
  for (const auto& s : scaled) log_scale = std::max(log_scale, s.log_abs());
  const size_t m = scaled.size();
  std::vector<Complex> u(m);
  for (size_t i = 0; i < m; ++i)
    u[i] = scaled[i].unit() * std::exp(scaled[i].log_abs() - log_scale);

  double s0 = double(m), s1 = 0.0, s2 = 0.0;
  Complex t0 = 0.0, t1 = 0.0;
  for (size_t i = 0; i < m; ++i) {
    s1 += record.deltas[i];
    s2 += record.deltas[i] * record.deltas[i];
    t0 += u[i];
    t1 += u[i] * record.deltas[i];
  }
  double det = s0 * s2 - s1 * s1;
  Complex a = (s2 * t0 - s1 * t1) / det;
  Complex b = (s0 * t1 - s1 * t0) / det;
  double resid = 0.0;
  for (size_t i = 0; i < m; ++i)
    resid = std::max(resid, std::abs(u[i] - (a + b * record.deltas[i])));
  record.limit = ScaledComplex::from(a) * ScaledComplex::from_log(Complex(log_scale, 0.0));
  record.fit_residual = std::abs(a) > 0.0 ? resid / std::abs(a) : 1.0;
  record.simple = record.fit_residual < 0.05 && std::abs(a) > 1e-8;
  return record;
}

}  // namespace dwkb
