#pragma once

#include "dwkb/scaled_complex.hpp"

namespace dwkb::specfun {

// Admissible sector |arg zeta| <= pi - epsilon for the large-argument
// asymptotics of Gamma(1 + zeta).
struct SectorSpec {
  double epsilon = 0.2;
};

// Euler Gamma function, relative error < 1e-12 for |z| <= 50.
// Raises PoleOfGamma within 1e-12 of a nonpositive integer.
Complex gamma(Complex z);

// log Gamma(z): the real part is exact log|Gamma|, the imaginary part is the
// phase modulo 2*pi (no unwinding across branch cuts).
Complex log_gamma(Complex z);

// Gamma(1 - z) evaluated as pi / (sin(pi z) * Gamma(z)).
// Raises IntegerArgument within 1e-12 of any integer.
Complex reflection(Complex z);

// Leading Stirling term sqrt(2 pi zeta) * exp(zeta (log zeta - 1)) for
// Gamma(1 + zeta), principal branches (sqrt(1) = 1, log(1) = 0).
Complex stirling_leading(Complex zeta);

// Same with the sector precondition enforced; raises OutsideSector.
Complex stirling_sector(Complex zeta, SectorSpec sector);

// log(sin(pi z)), stable for large |Im z|.
Complex log_sin_pi(Complex z);

// log Gamma(1 - z); uses the reflection identity when Re z >= 1/2 so that
// arguments deep in the left half plane never hit the direct evaluation.
Complex log_gamma_one_minus(Complex z);

ScaledComplex gamma_scaled(Complex z);
ScaledComplex gamma_one_minus_scaled(Complex z);

}  // namespace dwkb::specfun
