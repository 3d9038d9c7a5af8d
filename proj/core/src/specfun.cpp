#include "dwkb/specfun.hpp"

#include <cmath>

#include "dwkb/errors.hpp"

namespace dwkb::specfun {

namespace {

// Lanczos approximation, g = 607/128, 15 terms (Godfrey's coefficient set).
// Gives close to full double precision for Re z >= 1/2.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr double kLanczosCoef[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

Complex lanczos_sum(Complex zm1) {
  Complex s = kLanczosCoef[0];
  for (int k = 1; k < 15; ++k) s += kLanczosCoef[k] / (zm1 + double(k));
  return s;
}

bool near_nonpositive_integer(Complex z, double tol = 1e-12) {
  double n = std::round(z.real());
  return n <= 0.0 && std::abs(z - n) < tol;
}

bool near_positive_integer(Complex z, double tol = 1e-12) {
  double n = std::round(z.real());
  return n >= 1.0 && std::abs(z - n) < tol;
}

}  // namespace

Complex gamma(Complex z) {
  if (near_nonpositive_integer(z))
    raise(errc::pole_of_gamma, "Gamma pole at nonpositive integer");
  if (z.real() < 0.5) return kPi / (std::sin(kPi * z) * gamma(1.0 - z));
  Complex x = z - 1.0;
  Complex t = x + kLanczosG + 0.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, x + 0.5) * std::exp(-t) * lanczos_sum(x);
}

Complex log_sin_pi(Complex z) {
  // Factor out the dominant exponential so nothing overflows.
  const Complex i(0.0, 1.0);
  const Complex log_half_i = Complex(std::log(0.5), kPi / 2.0);  // log(i/2)
  if (z.imag() >= 0.0) {
    // sin(pi z) = -(exp(-i pi z) / (2 i)) (1 - exp(2 i pi z))
    return -i * kPi * z + std::log(1.0 - std::exp(2.0 * i * kPi * z)) + log_half_i;
  }
  // sin(pi z) = (exp(i pi z) / (2 i)) (1 - exp(-2 i pi z)); 1/(2i) = -i/2
  return i * kPi * z + std::log(1.0 - std::exp(-2.0 * i * kPi * z)) +
         Complex(std::log(0.5), -kPi / 2.0);
}

Complex log_gamma(Complex z) {
  if (near_nonpositive_integer(z))
    raise(errc::pole_of_gamma, "log Gamma pole at nonpositive integer");
  if (z.real() < 0.5)
    return std::log(kPi) - log_sin_pi(z) - log_gamma(1.0 - z);
  Complex x = z - 1.0;
  Complex t = x + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (x + 0.5) * std::log(t) - t + std::log(lanczos_sum(x));
}

Complex reflection(Complex z) {
  if (std::abs(z - std::round(z.real())) < 1e-12)
    raise(errc::integer_argument, "reflection undefined at integer argument");
  return kPi / (std::sin(kPi * z) * gamma(z));
}

Complex stirling_leading(Complex zeta) {
  return std::sqrt(2.0 * kPi * zeta) * std::exp(zeta * (std::log(zeta) - 1.0));
}

Complex stirling_sector(Complex zeta, SectorSpec sector) {
  if (std::abs(std::arg(zeta)) > kPi - sector.epsilon)
    raise(errc::outside_sector, "arg zeta outside |arg| <= pi - epsilon");
  return stirling_leading(zeta);
}

Complex log_gamma_one_minus(Complex z) {
  if (near_positive_integer(z))
    raise(errc::pole_of_gamma, "Gamma(1 - z) pole: z is a positive integer");
  if (z.real() >= 0.5)
    return std::log(kPi) - log_sin_pi(z) - log_gamma(z);
  return log_gamma(1.0 - z);
}

ScaledComplex gamma_scaled(Complex z) { return ScaledComplex::from_log(log_gamma(z)); }

ScaledComplex gamma_one_minus_scaled(Complex z) {
  return ScaledComplex::from_log(log_gamma_one_minus(z));
}

}  // namespace dwkb::specfun
