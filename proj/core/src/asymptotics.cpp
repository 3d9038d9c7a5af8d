#include "dwkb/asymptotics.hpp"

#include <cmath>

#include "dwkb/errors.hpp"
#include "dwkb/specfun.hpp"

namespace dwkb {

namespace {

const Complex kImag(0.0, 1.0);

// sqrt(-z) analytic off R+, positive on R-; limit from C+ on the cut.
Complex sqrt_neg(Complex z) {
  if (z.imag() == 0.0 && z.real() > 0.0) return Complex(0.0, -1.0) * std::sqrt(z.real());
  return std::sqrt(-z);
}

Complex clamp_off_pole(Complex zeta, double guard) {
  if (std::abs(zeta) >= guard) return zeta;
  if (zeta == Complex(0.0)) return Complex(-guard, 0.0);
  return zeta * (guard / std::abs(zeta));
}

}  // namespace

AsymptoticModel::AsymptoticModel(std::shared_ptr<const SpectralProblem> problem, double h,
                                 ModelOptions options)
    : problem_(std::move(problem)), h_(h), options_(options) {
  if (h_ <= 0.0) raise(errc::invalid_argument, "shift parameter h must be positive");
  const Strip& strip = problem_->strip();
  if (options_.z0.imag() != 0.0 || options_.z0.real() >= 0.0 || !strip.contains(options_.z0))
    raise(errc::validation_error, "anchor z0 must lie in S' on the negative real axis");
  if (options_.z1.imag() != 0.0 || options_.z1.real() <= 0.0 || !strip.contains(options_.z1))
    raise(errc::validation_error, "anchor z1 must lie in S on the positive real axis");

  branch_ = std::make_shared<MomentumBranch>(MomentumBranch::at(problem_, options_.z0));
  action_ = std::make_shared<ActionCache>(branch_, options_.quad_tol);

  // n0 = exp((i/h) int_{z0}^0 p) and n1 = exp((i/h) int_{z1}^0 p_phi).
  n0_ = ScaledComplex::from_log((kImag / h_) * (-action_from_zero(options_.z0)));
  n1_ = ScaledComplex::from_log((kImag / h_) * (-action_up_from_zero(options_.z1)));
}

Complex AsymptoticModel::action_from_zero(Complex z) const {
  if (z == Complex(0.0)) return 0.0;
  if (!problem_->potential().has_pole()) {
    PathPolyline ray;
    ray.vertices = {Complex(0.0), z};
    return integrate_p(*branch_, ray, options_.quad_tol);
  }
  // The integral reduces to the regularized action plus the exact primitive
  // of i ln(-zeta).
  return action_->regularized_to(z) + kImag * (z * log_neg(z) - z);
}

Complex AsymptoticModel::action_up_from_zero(Complex z) const {
  if (z == Complex(0.0)) return 0.0;
  if (!problem_->potential().has_pole()) return action_from_zero(z);
  return action_->regularized_to(z) + kPi * z + kImag * (z * std::log(z) - z);
}

ScaledComplex AsymptoticModel::periodic_factor(Complex z) const {
  ScaledComplex q = ScaledComplex::from_log(2.0 * kPi * kImag * z / h_);
  return ScaledComplex::from(Complex(1.0)) - q;
}

ScaledComplex AsymptoticModel::wkb_leading(Complex z) const {
  if (z.imag() == 0.0 && z.real() >= 0.0 && problem_->potential().has_pole())
    raise(errc::invalid_argument, "wkb_leading requires z in S'");
  Complex integral = action_->action_to(z);
  return ScaledComplex::from_log((kImag / h_) * integral) /
         ScaledComplex::from(branch_->sqrt_sin(z));
}

ScaledComplex AsymptoticModel::G0(Complex z) const {
  if (!problem_->potential().has_pole())
    raise(errc::invalid_argument, "G0 is defined for simple-pole potentials only");
  if (z == Complex(0.0)) z = Complex(-1e-9, 0.0);  // analytic limit proxy
  bool on_cut = z.imag() == 0.0 && z.real() > 0.0 && problem_->potential().has_pole();
  Complex sq_sin = on_cut ? branch_->sqrt_sin_up(z) : branch_->sqrt_sin(z);
  Complex exponent = (z / h_) * std::log(1.0 / h_) + (kImag / h_) * action_->regularized_to(z);
  return ScaledComplex::from_log(exponent) * Complex(std::sqrt(h_ / (2.0 * kPi))) /
         (ScaledComplex::from(sqrt_neg(z)) * ScaledComplex::from(sq_sin));
}

ScaledComplex AsymptoticModel::G0_tilde(Complex z) const {
  if (!problem_->potential().has_pole())
    raise(errc::invalid_argument, "G0_tilde is defined for simple-pole potentials only");
  // Independent route: the p_up family obtained by honest continuation from
  // S' through C+ across the cut, principal sqrt(z) and ln(z), and direct
  // quadrature of the exponent along the ray from 0.
  const double guard = problem_->pole_guard();
  auto integrand = [&](Complex zeta) -> Complex {
    zeta = clamp_off_pole(zeta, guard);
    Complex p_up = zeta.imag() > 0.0 ? branch_->value(zeta) : branch_->value_up(zeta);
    return p_up - kImag * (std::log(zeta) - kImag * kPi);
  };
  PathPolyline ray;
  ray.vertices = {Complex(0.0), z};
  Complex expo = integrate_function(integrand, ray, options_.quad_tol);
  Complex sq_sin_up = z.imag() > 0.0 ? branch_->sqrt_sin(z) : branch_->sqrt_sin_up(z);
  Complex exponent = (z / h_) * std::log(1.0 / h_) + (kImag / h_) * expo;
  return kImag * ScaledComplex::from_log(exponent) * Complex(std::sqrt(h_ / (2.0 * kPi))) /
         (ScaledComplex::from(std::sqrt(z)) * ScaledComplex::from(sq_sin_up));
}

Complex AsymptoticModel::p_phi(Complex z) const {
  if (z.imag() > 0.0) return branch_->value(z);
  return branch_->value_up(z);
}

Complex AsymptoticModel::sqrt_sin_phi(Complex z) const {
  if (z.imag() > 0.0) return branch_->sqrt_sin(z);
  return branch_->sqrt_sin_up(z);
}

ScaledComplex AsymptoticModel::G1(Complex z) const {
  if (!problem_->potential().has_pole())
    raise(errc::invalid_argument, "G1 is defined for simple-pole potentials only");
  if (z == Complex(0.0)) z = Complex(1e-9, 0.0);
  Complex exponent = -(z / h_) * std::log(1.0 / h_) -
                     (kImag / h_) * (action_->regularized_to(z) + kPi * z);
  return ScaledComplex::from_log(exponent) * Complex(std::sqrt(h_ / (2.0 * kPi))) /
         (ScaledComplex::from(std::sqrt(z)) * ScaledComplex::from(sqrt_sin_phi(z)));
}

ScaledComplex AsymptoticModel::psi_uniform(Complex z) const {
  return specfun::gamma_one_minus_scaled(z / h_) * G0(z) * n0_;
}

ScaledComplex AsymptoticModel::psi_near_Rplus(Complex z) const {
  if (!problem_->potential().has_pole())
    raise(errc::invalid_argument, "psi_near_Rplus is defined for simple-pole potentials only");
  if (z.real() <= 0.0)
    raise(errc::invalid_argument, "psi_near_Rplus requires Re z > 0");
  ScaledComplex denom = periodic_factor(z);
  if (denom.is_zero() || denom.log_abs() < std::log(1e-12))
    raise(errc::periodic_zero, "1 - e^{2 pi i z/h} vanishes at z");
  Complex iup = action_up_from_zero(z);
  return n0_ * ScaledComplex::from_log((kImag / h_) * iup) /
         (denom * ScaledComplex::from(branch_->sqrt_sin_up(z)));
}

ScaledComplex AsymptoticModel::phi_standard(Complex z) const {
  Complex integral = action_up_from_zero(z) - action_up_from_zero(options_.z1);
  return ScaledComplex::from_log(-(kImag / h_) * integral) /
         ScaledComplex::from(sqrt_sin_phi(z));
}

ScaledComplex AsymptoticModel::phi_uniform(Complex z) const {
  return specfun::gamma_scaled(1.0 + z / h_) * G1(z) / n1_;
}

ScaledComplex AsymptoticModel::f_plus(Complex z) const {
  return specfun::gamma_one_minus_scaled(z / h_) * G0(z);
}

ScaledComplex AsymptoticModel::f_minus(Complex z) const {
  return periodic_factor(z) * specfun::gamma_scaled(1.0 + z / h_) * G1(z);
}

LatticeLine AsymptoticModel::line_through(Complex z) const {
  const double d_x = problem_->strip().d_x;
  double window = -options_.seed_window_frac * d_x;
  int steps = int(std::ceil((z.real() - window) / h_ - 1e-12));
  if (steps < 1) steps = 1;
  LatticeLine line;
  line.theta = z - Complex(double(steps) * h_, 0.0);
  line.h = h_;
  line.k_min = 0;
  line.k_max = steps;
  return line;
}

AsymptoticModel::LatticeEval AsymptoticModel::psi_recursion(Complex z) const {
  LatticeLine line = line_through(z);
  LatticeSolution sol = psi_on_line(line);
  return {sol.at(line.k_max), line, line.k_max};
}

AsymptoticModel::LatticeEval AsymptoticModel::phi_recursion(Complex z) const {
  const double d_x = problem_->strip().d_x;
  double window = options_.seed_window_frac * d_x;
  int steps = int(std::ceil((window - z.real()) / h_ - 1e-12));
  if (steps < 1) steps = 1;
  LatticeLine line;
  line.theta = z;
  line.h = h_;
  line.k_min = 0;
  line.k_max = steps;
  LatticeSolution sol = phi_on_line(line);
  return {sol.at(0), line, 0};
}

LatticeSolution AsymptoticModel::psi_on_line(const LatticeLine& line) const {
  auto seeds = seed_wkb(*this, line, line.k_min, SeedFamily::psi_forward);
  SeedProvenance prov{SeedFamily::psi_forward, line.k_min, line.point(line.k_min),
                      line.point(line.k_min + 1), "standard_wkb"};
  return LatticeSolution::propagate(*problem_, line, line.k_min, seeds.first, seeds.second, prov);
}

LatticeSolution AsymptoticModel::phi_on_line(const LatticeLine& line) const {
  int k0 = line.k_max - 1;
  auto seeds = seed_wkb(*this, line, k0, SeedFamily::phi_backward);
  SeedProvenance prov{SeedFamily::phi_backward, k0, line.point(k0), line.point(k0 + 1),
                      "phi_standard"};
  return LatticeSolution::propagate(*problem_, line, k0, seeds.first, seeds.second, prov);
}

ScaledComplex AsymptoticModel::f_plus_recursion(Complex z) const {
  return psi_recursion(z).value / n0_;
}

ScaledComplex AsymptoticModel::f_minus_recursion(Complex z) const {
  return n1_ * periodic_factor(z) * phi_recursion(z).value;
}

}  // namespace dwkb
