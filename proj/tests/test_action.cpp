#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "dwkb/action.hpp"
#include "dwkb/errors.hpp"
#include "dwkb/harness.hpp"

using dwkb::Complex;
using dwkb::kPi;
using dwkb::MomentumBranch;
using dwkb::PathPolyline;

namespace {

std::shared_ptr<const dwkb::SpectralProblem> problem_of(const std::string& expr, double d_x,
                                                        double d_y) {
  return std::make_shared<dwkb::SpectralProblem>(dwkb::compile_potential(expr), Complex(0.0),
                                                 dwkb::Strip{d_x, d_y});
}

std::shared_ptr<const dwkb::SpectralProblem> constant_w(Complex w, double d = 3.5) {
  auto v = dwkb::MeromorphicPotential::analytic({dwkb::PolyTerm{{w}}}, "constant");
  return std::make_shared<dwkb::SpectralProblem>(std::move(v), Complex(0.0), dwkb::Strip{d, d});
}

std::shared_ptr<const dwkb::SpectralProblem> reference() {
  return problem_of("1/z + 0.3*z", 0.35, 0.35);
}

}  // namespace

TEST_CASE("integrate_p basics") {
  SUBCASE("constant p over a segment gives p times length") {
    auto branch = MomentumBranch::at(constant_w(5.0), Complex(-1.0, 0.0));
    Complex a(-1.0, 0.0), b(1.5, 0.7);
    Complex integral = dwkb::integrate_p(branch, PathPolyline::through({a, b}));
    CHECK(std::abs(integral - branch.base_value() * (b - a)) < 1e-11);
  }
  SUBCASE("closed contractible loop integrates to zero") {
    auto branch = MomentumBranch::at(reference(), Complex(-0.25, 0.0));
    PathPolyline loop = PathPolyline::through({Complex(-0.25, 0.02), Complex(-0.05, 0.02),
                                               Complex(-0.05, 0.25), Complex(-0.25, 0.25),
                                               Complex(-0.25, 0.02)});
    CHECK(std::abs(dwkb::integrate_p(branch, loop)) < 1e-10);
  }
  SUBCASE("real segment of 1/z against a composite fixed-grid oracle") {
    auto problem = problem_of("1/z", 0.45, 0.45);
    auto branch = MomentumBranch::at(problem, Complex(-0.3, 0.0));
    Complex integral =
        dwkb::integrate_p(branch, PathPolyline::through({Complex(-0.3, 0.0), Complex(-0.2, 0.0)}));
    // On [-0.3, -0.2], w = 1/x < -2, and p(x) = -i arccosh(|w|/2); integrate
    // with a 10^4-node composite Simpson rule on std::acosh.
    const int n = 10000;
    double a = -0.3, b = -0.2;
    double acc = 0.0;
    auto f = [](double x) { return std::acosh(-0.5 / x); };
    for (int i = 0; i < n; ++i) {
      double x0 = a + (b - a) * i / n, x1 = a + (b - a) * (i + 1) / n;
      acc += (x1 - x0) / 6.0 * (f(x0) + 4.0 * f(0.5 * (x0 + x1)) + f(x1));
    }
    Complex oracle(0.0, -acc);
    CHECK(std::abs(integral - oracle) < 1e-10);
  }
}

TEST_CASE("integral additivity and path independence") {
  auto branch = MomentumBranch::at(reference(), Complex(-0.25, 0.0));
  Complex a(-0.25, 0.05), mid(-0.1, 0.18), b(0.2, 0.1);
  Complex whole = dwkb::integrate_p(branch, PathPolyline::through({a, mid, b}));
  Complex part1 = dwkb::integrate_p(branch, PathPolyline::through({a, mid}));
  Complex part2 = dwkb::integrate_p(branch, PathPolyline::through({mid, b}));
  CHECK(std::abs(whole - (part1 + part2)) < 1e-11);

  Complex other_route = dwkb::integrate_p(
      branch, PathPolyline::through({a, Complex(-0.25, 0.25), Complex(0.2, 0.25), b}));
  CHECK(std::abs(whole - other_route) < 1e-10);
}

TEST_CASE("regularized action") {
  auto branch = MomentumBranch::at(reference(), Complex(-0.25, 0.0));

  SUBCASE("zero at z = 0") { CHECK(dwkb::regularized_action(branch, Complex(0.0)) == Complex(0.0)); }

  SUBCASE("path independence inside S") {
    Complex z(0.12, 0.2);
    Complex direct = dwkb::regularized_action(branch, z);
    PathPolyline detour;
    detour.vertices = {Complex(0.0), Complex(-0.15, 0.1), Complex(-0.1, 0.28), z};
    Complex via = dwkb::regularized_action(branch, z, &detour);
    CHECK(std::abs(direct - via) < 1e-10);
  }

  SUBCASE("derivative recovers the integrand") {
    // d/dz at z = -0.1: central differences at 1e-4 and 1e-5.
    Complex z0(-0.1, 0.0);
    auto reg = [&](Complex z) { return dwkb::regularized_action(branch, z); };
    Complex d4 = (reg(z0 + 1e-4) - reg(z0 - 1e-4)) / 2e-4;
    Complex d5 = (reg(z0 + 1e-5) - reg(z0 - 1e-5)) / 2e-5;
    Complex expected = branch.value(z0) - Complex(0.0, 1.0) * dwkb::log_neg(z0);
    CHECK(std::abs(d4 - expected) < 1e-6);
    CHECK(std::abs(d5 - expected) < 1e-7);
    CHECK(std::abs(d5 - expected) < std::abs(d4 - expected));
  }

  SUBCASE("log primitive splits the full action") {
    // int_a^z p = [Reg(z) - Reg(a)] + i [zeta ln(-zeta) - zeta]_a^z in S'.
    Complex a(-0.2, 0.1), z(0.15, 0.2);
    Complex full = dwkb::integrate_p(branch, PathPolyline::through({a, z}));
    auto primitive = [](Complex zeta) {
      return Complex(0.0, 1.0) * (zeta * dwkb::log_neg(zeta) - zeta);
    };
    Complex split = dwkb::regularized_action(branch, z) - dwkb::regularized_action(branch, a) +
                    primitive(z) - primitive(a);
    CHECK(std::abs(full - split) < 1e-9);
  }
}

TEST_CASE("canonicity of vertical curves") {
  SUBCASE("constant p = pi/2 - i passes") {
    // w = -2 cos(pi/2 - i) = -2 i sinh 1
    auto branch = MomentumBranch::at(constant_w(Complex(0.0, -2.0 * std::sinh(1.0))),
                                     Complex(-1.0, 0.0));
    CHECK(std::abs(branch.base_value() - Complex(kPi / 2.0, -1.0)) < 1e-12);
    auto report = dwkb::canonicity({Complex(0.3, -0.5), Complex(0.3, 0.5)}, branch);
    CHECK(report.canonical);
    CHECK(report.margin_up == doctest::Approx(kPi / 2.0).epsilon(1e-10));
    CHECK(report.margin_down == doctest::Approx(kPi / 2.0).epsilon(1e-10));
  }
  SUBCASE("constant p = -pi/2 - i fails the first inequality") {
    auto branch = MomentumBranch::at(constant_w(Complex(0.0, 2.0 * std::sinh(1.0))),
                                     Complex(-1.0, 0.0));
    CHECK(std::abs(branch.base_value() - Complex(-kPi / 2.0, -1.0)) < 1e-12);
    auto report = dwkb::canonicity({Complex(0.3, -0.5), Complex(0.3, 0.5)}, branch);
    CHECK_FALSE(report.canonical);
    CHECK(report.margin_up < 0.0);
  }
  SUBCASE("corners check both one-sided derivatives") {
    auto branch = MomentumBranch::at(constant_w(Complex(0.0, -2.0 * std::sinh(1.0))),
                                     Complex(-1.0, 0.0));
    // First leg vertical (passes); second leg slanted so hard that
    // Im((p - pi) z') >= 0 fails only on that side of the corner.
    std::vector<Complex> curve = {Complex(0.3, -0.5), Complex(0.3, 0.0), Complex(1.8, 0.5)};
    auto report = dwkb::canonicity(curve, branch);
    CHECK_FALSE(report.canonical);
    CHECK(report.worst_y >= 0.0);
    // The same corner with a gentle slant stays canonical.
    auto gentle = dwkb::canonicity({Complex(0.3, -0.5), Complex(0.3, 0.0), Complex(0.45, 0.5)},
                                   branch);
    CHECK(gentle.canonical);
  }
  SUBCASE("non-graph curves are rejected") {
    auto branch = MomentumBranch::at(constant_w(5.0), Complex(-1.0, 0.0));
    CHECK_THROWS_AS(dwkb::canonicity({Complex(0.0, 0.5), Complex(0.0, -0.5)}, branch),
                    dwkb::Error);
  }
}

TEST_CASE("action cache agrees with fresh quadrature") {
  auto branch = std::make_shared<const MomentumBranch>(
      MomentumBranch::at(reference(), Complex(-0.25, 0.0)));
  dwkb::ActionCache cache(branch);
  Complex z(0.1, 0.15);
  Complex cached = cache.action_to(z);
  Complex fresh = dwkb::integrate_p(*branch, branch->sprime_path_to(z), 1e-12);
  CHECK(std::abs(cached - fresh) < 1e-10);
  CHECK(cache.action_to(z) == cached);  // memo hit returns the identical value
}
