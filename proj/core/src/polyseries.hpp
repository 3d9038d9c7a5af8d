#pragma once

// Internal polynomial / power-series helpers shared by the potential catalog
// and the expression compiler.

#include <algorithm>
#include <cmath>
#include <vector>

#include "dwkb/errors.hpp"
#include "dwkb/scaled_complex.hpp"

namespace dwkb::detail {

using Poly = std::vector<Complex>;  // coefficients, ascending powers

inline Poly poly_trim(Poly p) {
  while (p.size() > 1 && std::abs(p.back()) == 0.0) p.pop_back();
  return p;
}

inline int poly_degree(const Poly& p) { return int(poly_trim(p).size()) - 1; }

inline Complex poly_eval(const Poly& p, Complex z) {
  Complex acc = 0.0;
  for (size_t i = p.size(); i-- > 0;) acc = acc * z + p[i];
  return acc;
}

inline Poly poly_add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), Complex(0.0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

inline Poly poly_scale(const Poly& a, Complex c) {
  Poly r = a;
  for (auto& x : r) x *= c;
  return r;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {Complex(0.0)};
  Poly r(a.size() + b.size() - 1, Complex(0.0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline Poly poly_derivative(const Poly& a) {
  if (a.size() <= 1) return {Complex(0.0)};
  Poly r(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * double(i);
  return r;
}

// Exact division by z for a polynomial vanishing at 0.
inline Poly poly_shift_down(const Poly& a) {
  if (a.size() <= 1) return {Complex(0.0)};
  return Poly(a.begin() + 1, a.end());
}

// Taylor coefficients of num/den at 0 through the given order; den[0] != 0.
inline std::vector<Complex> series_divide(const Poly& num, const Poly& den, int order) {
  std::vector<Complex> c(order + 1, Complex(0.0));
  for (int k = 0; k <= order; ++k) {
    Complex s = k < int(num.size()) ? num[k] : Complex(0.0);
    for (int j = 1; j <= k; ++j) {
      Complex dj = j < int(den.size()) ? den[j] : Complex(0.0);
      s -= dj * c[k - j];
    }
    c[k] = s / den[0];
  }
  return c;
}

// Durand-Kerner root finder; leading coefficient must be nonzero.
inline std::vector<Complex> poly_roots(const Poly& poly_in) {
  Poly p = poly_trim(poly_in);
  int n = int(p.size()) - 1;
  if (n <= 0) return {};
  Complex lead = p.back();
  for (auto& c : p) c /= lead;
  double radius = 1.0;
  for (int i = 0; i < n; ++i) radius = std::max(radius, std::pow(std::abs(p[i]), 1.0 / (n - i)));
  std::vector<Complex> roots(n);
  for (int i = 0; i < n; ++i) {
    double angle = 2.0 * kPi * i / n + 0.4;  // avoid symmetry locking
    roots[i] = (1.2 * radius) * Complex(std::cos(angle), std::sin(angle));
  }
  for (int it = 0; it < 300; ++it) {
    double move = 0.0;
    for (int i = 0; i < n; ++i) {
      Complex f = poly_eval(p, roots[i]);
      Complex d = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i) d *= roots[i] - roots[j];
      if (std::abs(d) == 0.0) continue;
      Complex delta = f / d;
      roots[i] -= delta;
      move = std::max(move, std::abs(delta));
    }
    if (move < 1e-14 * std::max(1.0, radius)) break;
  }
  return roots;
}

}  // namespace dwkb::detail
