#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace dwkb {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Complex value carried as unit * exp(log_mag), with |unit| == 1, so that
// exponentially large and small quantities remain comparable without
// overflowing a double.  unit == 0 together with log_mag == -inf encodes an
// exact zero.
class ScaledComplex {
 public:
  ScaledComplex() : log_mag_(-std::numeric_limits<double>::infinity()), unit_(0.0) {}

  static ScaledComplex from(Complex v) {
    double m = std::abs(v);
    if (m == 0.0) return ScaledComplex();
    return ScaledComplex(std::log(m), v / m);
  }

  // exp(log_value): real part sets the magnitude, imaginary part the phase.
  static ScaledComplex from_log(Complex log_value) {
    return ScaledComplex(log_value.real(),
                         Complex(std::cos(log_value.imag()), std::sin(log_value.imag())));
  }

  bool is_zero() const { return unit_ == Complex(0.0); }
  double log_abs() const { return log_mag_; }
  Complex unit() const { return unit_; }

  // May overflow/underflow deliberately when |log_mag| is out of double range.
  Complex value() const { return is_zero() ? Complex(0.0) : unit_ * std::exp(log_mag_); }

  Complex log() const {
    return Complex(log_mag_, std::atan2(unit_.imag(), unit_.real()));
  }

  friend ScaledComplex operator*(const ScaledComplex& a, const ScaledComplex& b) {
    if (a.is_zero() || b.is_zero()) return ScaledComplex();
    return normalized(a.log_mag_ + b.log_mag_, a.unit_ * b.unit_);
  }

  friend ScaledComplex operator/(const ScaledComplex& a, const ScaledComplex& b) {
    if (a.is_zero()) return ScaledComplex();
    return normalized(a.log_mag_ - b.log_mag_, a.unit_ / b.unit_);
  }

  friend ScaledComplex operator*(const ScaledComplex& a, Complex c) {
    return a * ScaledComplex::from(c);
  }
  friend ScaledComplex operator*(Complex c, const ScaledComplex& a) {
    return a * ScaledComplex::from(c);
  }
  friend ScaledComplex operator/(const ScaledComplex& a, Complex c) {
    return a / ScaledComplex::from(c);
  }
  friend ScaledComplex operator/(Complex c, const ScaledComplex& a) {
    return ScaledComplex::from(c) / a;
  }

  friend ScaledComplex operator-(const ScaledComplex& a) {
    if (a.is_zero()) return a;
    return ScaledComplex(a.log_mag_, -a.unit_);
  }

  friend ScaledComplex operator+(const ScaledComplex& a, const ScaledComplex& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    double m = std::max(a.log_mag_, b.log_mag_);
    Complex s = a.unit_ * std::exp(a.log_mag_ - m) + b.unit_ * std::exp(b.log_mag_ - m);
    double sm = std::abs(s);
    if (sm == 0.0) return ScaledComplex();
    return normalized(m + std::log(sm), s / sm);
  }

  friend ScaledComplex operator-(const ScaledComplex& a, const ScaledComplex& b) {
    return a + (-b);
  }

  // a / b collapsed to a plain complex; safe whenever the magnitudes are of
  // comparable scale.
  static Complex ratio(const ScaledComplex& a, const ScaledComplex& b) {
    return (a / b).value();
  }

 private:
  ScaledComplex(double log_mag, Complex unit) : log_mag_(log_mag), unit_(unit) {}

  static ScaledComplex normalized(double log_mag, Complex unit) {
    double m = std::abs(unit);
    return ScaledComplex(log_mag + std::log(m), unit / m);
  }

  double log_mag_;
  Complex unit_;
};

}  // namespace dwkb
