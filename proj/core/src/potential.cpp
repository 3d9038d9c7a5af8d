#include "dwkb/potential.hpp"

#include <algorithm>
#include <cmath>

#include "dwkb/errors.hpp"
#include "polyseries.hpp"

namespace dwkb {

namespace {

// cot(x) - 1/x = sum_k c_k x^k, odd k, from the Bernoulli expansion.
// Terms through x^15 keep the truncation below 2e-14 for |x| <= 0.5.
constexpr double kCotCoef[8] = {
    -1.0 / 3.0,
    -1.0 / 45.0,
    -2.0 / 945.0,
    -1.0 / 4725.0,
    -2.0 / 93555.0,
    -1382.0 / 638512875.0,
    -4.0 / 18243225.0,
    -3617.0 / 325641566250.0,
};

Complex cot_minus_pole(Complex x) {
  if (std::abs(x) <= 0.5) {
    Complex x2 = x * x, acc = 0.0, pw = x;
    for (int k = 0; k < 8; ++k) {
      acc += kCotCoef[k] * pw;
      pw *= x2;
    }
    return acc;
  }
  return std::cos(x) / std::sin(x) - 1.0 / x;
}

Complex cot_minus_pole_derivative(Complex x) {
  if (std::abs(x) <= 0.5) {
    Complex x2 = x * x, acc = 0.0, pw = 1.0;
    for (int k = 0; k < 8; ++k) {
      acc += kCotCoef[k] * double(2 * k + 1) * pw;
      pw *= x2;
    }
    return acc;
  }
  Complex s = std::sin(x);
  return -1.0 / (s * s) + 1.0 / (x * x);
}

struct TermEval {
  Complex value, derivative;
};

TermEval eval_term(const AnalyticTerm& term, Complex z) {
  using detail::poly_derivative;
  using detail::poly_eval;
  if (const auto* p = std::get_if<PolyTerm>(&term))
    return {poly_eval(p->coeffs, z), poly_eval(poly_derivative(p->coeffs), z)};
  if (const auto* r = std::get_if<RationalTerm>(&term)) {
    Complex n = poly_eval(r->num, z), d = poly_eval(r->den, z);
    Complex np = poly_eval(poly_derivative(r->num), z), dp = poly_eval(poly_derivative(r->den), z);
    return {n / d, (np * d - n * dp) / (d * d)};
  }
  const auto& c = std::get<CotTerm>(term);
  Complex x = kPi * z;
  return {c.lambda * cot_minus_pole(x), c.lambda * kPi * cot_minus_pole_derivative(x)};
}

}  // namespace

MeromorphicPotential::MeromorphicPotential(Complex residue, std::vector<AnalyticTerm> terms,
                                           std::string description) {
  if (residue == Complex(0.0))
    raise(errc::validation_error, "residue must be nonzero; use MeromorphicPotential::analytic");
  residue_ = residue;
  terms_ = std::move(terms);
  description_ = std::move(description);
}

MeromorphicPotential MeromorphicPotential::analytic(std::vector<AnalyticTerm> terms,
                                                    std::string description) {
  MeromorphicPotential v;
  v.residue_ = 0.0;
  v.terms_ = std::move(terms);
  v.description_ = std::move(description);
  return v;
}

Complex MeromorphicPotential::value(Complex z) const {
  Complex acc = has_pole() ? residue_ / z : Complex(0.0);
  for (const auto& t : terms_) acc += eval_term(t, z).value;
  return acc;
}

Complex MeromorphicPotential::derivative(Complex z) const {
  Complex acc = has_pole() ? -residue_ / (z * z) : Complex(0.0);
  for (const auto& t : terms_) acc += eval_term(t, z).derivative;
  return acc;
}

std::vector<Complex> MeromorphicPotential::taylor_analytic(int order) const {
  std::vector<Complex> c(order + 1, Complex(0.0));
  for (const auto& t : terms_) {
    if (const auto* p = std::get_if<PolyTerm>(&t)) {
      for (int k = 0; k <= order && k < int(p->coeffs.size()); ++k) c[k] += p->coeffs[k];
    } else if (const auto* r = std::get_if<RationalTerm>(&t)) {
      auto s = detail::series_divide(r->num, r->den, order);
      for (int k = 0; k <= order; ++k) c[k] += s[k];
    } else {
      const auto& ct = std::get<CotTerm>(t);
      // lambda * sum c_k (pi z)^k over odd k
      double pw = kPi;
      for (int k = 0; k < 8; ++k) {
        int deg = 2 * k + 1;
        if (deg <= order) c[deg] += ct.lambda * kCotCoef[k] * pw;
        pw *= kPi * kPi;
      }
    }
  }
  return c;
}

SpectralProblem::SpectralProblem(MeromorphicPotential v, Complex energy, Strip strip,
                                 double pole_guard)
    : potential_(std::move(v)), energy_(energy), strip_(strip), pole_guard_(pole_guard) {
  if (strip_.d_x <= 0.0 || strip_.d_y <= 0.0)
    raise(errc::validation_error, "strip half-widths must be positive");
  // The analytic part must be pole-free on the closed strip.
  for (const auto& t : potential_.terms()) {
    if (const auto* r = std::get_if<RationalTerm>(&t)) {
      if (r->den.empty() || std::abs(detail::poly_eval(r->den, 0.0)) == 0.0)
        raise(errc::validation_error, "rational term denominator vanishes at 0");
      for (Complex root : detail::poly_roots(r->den)) {
        if (std::abs(root.real()) <= strip_.d_x && std::abs(root.imag()) <= strip_.d_y)
          raise(errc::validation_error, "rational term has a pole inside the strip");
      }
    } else if (std::holds_alternative<CotTerm>(t)) {
      if (strip_.d_x >= 1.0)
        raise(errc::validation_error, "cot-type term has poles at nonzero integers; need d_x < 1");
    }
  }
}

Complex SpectralProblem::eval(Complex z) const {
  if (!strip_.contains(z)) raise(errc::outside_strip, "evaluation point outside the strip");
  if (potential_.has_pole() && std::abs(z) <= pole_guard_)
    raise(errc::pole_hit, "evaluation point within pole guard of 0");
  return potential_.value(z) - energy_;
}

Complex SpectralProblem::eval_derivative(Complex z) const {
  if (!strip_.contains(z)) raise(errc::outside_strip, "evaluation point outside the strip");
  if (potential_.has_pole() && std::abs(z) <= pole_guard_)
    raise(errc::pole_hit, "evaluation point within pole guard of 0");
  return potential_.derivative(z);
}

LaurentData SpectralProblem::laurent(int order) const {
  if (order < 0 || order > 16) raise(errc::invalid_argument, "laurent order must be in [0, 16]");
  LaurentData data;
  data.residue = potential_.residue();
  data.coefficients = potential_.taylor_analytic(order);
  data.coefficients[0] -= energy_;
  return data;
}

std::vector<Complex> SpectralProblem::turning_points(const Rect& region,
                                                     int seeds_per_axis) const {
  if (seeds_per_axis < 2) raise(errc::invalid_argument, "need at least 2 seeds per axis");
  const double guard = std::max(pole_guard_ * 10.0, 1e-11);
  const double span = std::hypot(region.re_max - region.re_min, region.im_max - region.im_min);
  Rect box{region.re_min - 0.2 * span, region.re_max + 0.2 * span, region.im_min - 0.2 * span,
           region.im_max + 0.2 * span};

  std::vector<Complex> roots;
  auto record = [&](Complex z) {
    for (Complex r : roots)
      if (std::abs(r - z) < 1e-8) return;
    roots.push_back(z);
  };

  for (double sign : {2.0, -2.0}) {
    for (int i = 0; i < seeds_per_axis; ++i) {
      for (int j = 0; j < seeds_per_axis; ++j) {
        Complex z(region.re_min + (region.re_max - region.re_min) * (i + 0.5) / seeds_per_axis,
                  region.im_min + (region.im_max - region.im_min) * (j + 0.5) / seeds_per_axis);
        if (std::abs(z) <= guard || !strip_.contains(z)) continue;
        bool in_box = true;
        Complex f = potential_.value(z) - energy_ - sign;
        for (int it = 0; it < 80; ++it) {
          if (std::abs(f) < 1e-13) break;
          Complex df = potential_.derivative(z);
          if (std::abs(df) == 0.0) break;
          Complex step = f / df;
          double lambda = 1.0;
          Complex zn = z, fn = f;
          bool moved = false;
          for (int d = 0; d < 18; ++d) {
            Complex zc = z - lambda * step;
            if (std::abs(zc) <= guard) {
              lambda *= 0.5;
              continue;
            }
            zn = zc;
            fn = potential_.value(zc) - energy_ - sign;
            moved = true;
            if (std::abs(fn) < std::abs(f)) break;
            lambda *= 0.5;
          }
          if (!moved) break;
          z = zn;
          f = fn;
          if (!box.contains(z) || std::abs(z) <= guard) {
            in_box = false;
            break;
          }
        }
        if (!in_box) continue;
        if (std::abs(f) < 1e-10) {
          if (region.contains(z) && std::abs(z) > guard && strip_.contains(z)) record(z);
        } else if (std::abs(f) < 1e-6) {
          // Stalled next to a root without reaching the polish tolerance.
          raise(errc::non_convergence, "turning-point polish failed below 1e-10");
        }
      }
    }
  }
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

RegularityReport SpectralProblem::verify_regular(int grid_per_axis, int seeds_per_axis) const {
  RegularityReport report;
  const double inset = 1.0 - 1e-9;
  Rect region{-strip_.d_x * inset, strip_.d_x * inset, -strip_.d_y * inset, strip_.d_y * inset};
  report.turning_points_found = turning_points(region, seeds_per_axis);

  double min_margin = std::numeric_limits<double>::infinity();
  Complex worst{};
  const double guard = std::max(pole_guard_ * 10.0, 1e-9);
  for (int i = 0; i < grid_per_axis; ++i) {
    for (int j = 0; j < grid_per_axis; ++j) {
      Complex z(-strip_.d_x + 2.0 * strip_.d_x * (i + 0.5) / grid_per_axis,
                -strip_.d_y + 2.0 * strip_.d_y * (j + 0.5) / grid_per_axis);
      if (potential_.has_pole() && std::abs(z) <= guard) continue;
      Complex w = potential_.value(z) - energy_;
      double margin = std::abs(std::acos(-w / 2.0).imag());
      if (margin < min_margin) {
        min_margin = margin;
        worst = z;
      }
    }
  }
  report.min_abs_im_p = min_margin;
  report.worst_point = worst;
  report.regular = report.turning_points_found.empty() && min_margin > 1e-12;
  return report;
}

}  // namespace dwkb
