#include "dwkb/action.hpp"

#include <cmath>
#include <cstring>

#include "dwkb/errors.hpp"

namespace dwkb {

namespace {

// 15-point Kronrod nodes on [-1, 1] with the embedded 7-point Gauss rule.
constexpr double kXgk[15] = {
    -0.99145537112081263921, -0.94910791234275852453, -0.86486442335976907279,
    -0.74153118559939443986, -0.58608723546769113029, -0.40584515137739716691,
    -0.20778495500789846760, 0.0,
    0.20778495500789846760,  0.40584515137739716691,  0.58608723546769113029,
    0.74153118559939443986,  0.86486442335976907279,  0.94910791234275852453,
    0.99145537112081263921};
constexpr double kWgk[15] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801, 0.20443294007529889241,
    0.19035057806478540991, 0.16900472663926790283, 0.14065325971552591875,
    0.10479001032225018384, 0.06309209262997855329, 0.02293532201052922496};
constexpr double kWg7[15] = {
    0.0, 0.12948496616886969327, 0.0, 0.27970539148927666790, 0.0, 0.38183005050511894495,
    0.0, 0.41795918367346938776, 0.0, 0.38183005050511894495, 0.0, 0.27970539148927666790,
    0.0, 0.12948496616886969327, 0.0};

struct GkResult {
  Complex integral;
  double error;
};

GkResult gk15(const std::function<Complex(Complex)>& f, Complex a, Complex b) {
  Complex half = 0.5 * (b - a), mid = 0.5 * (a + b);
  Complex ik = 0.0, ig = 0.0;
  for (int i = 0; i < 15; ++i) {
    Complex v = f(mid + kXgk[i] * half);
    ik += kWgk[i] * v;
    ig += kWg7[i] * v;
  }
  ik *= half;
  ig *= half;
  return {ik, std::abs(ik - ig)};
}

Complex adaptive(const std::function<Complex(Complex)>& f, Complex a, Complex b, double tol,
                 int depth) {
  auto r = gk15(f, a, b);
  if (r.error <= tol || r.error <= 1e-15 * std::abs(r.integral)) return r.integral;
  if (depth >= 24)
    raise(errc::quadrature_failure, "tolerance unreachable within max subdivisions");
  Complex mid = 0.5 * (a + b);
  return adaptive(f, a, mid, 0.5 * tol, depth + 1) + adaptive(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace

Complex integrate_function(const std::function<Complex(Complex)>& f, const PathPolyline& path,
                           double seg_abs_tol) {
  if (path.vertices.size() < 2) return 0.0;
  Complex acc = 0.0;
  for (size_t i = 1; i < path.vertices.size(); ++i) {
    Complex a = path.vertices[i - 1], b = path.vertices[i];
    if (a == b) continue;
    acc += adaptive(f, a, b, seg_abs_tol, 0);
  }
  return acc;
}

Complex integrate_p(const MomentumBranch& branch, const PathPolyline& path, double seg_abs_tol) {
  if (path.vertices.size() < 2) return 0.0;
  // Chain the continuation along the path so every quadrature node gets its
  // predictor from the previous node; segments are pre-split until the
  // momentum varies slowly across them.
  Complex acc = 0.0;
  Complex z_prev = path.vertices.front();
  Complex p_prev = branch.value(z_prev);
  Complex s_prev = branch.sqrt_sin(z_prev);
  for (size_t i = 1; i < path.vertices.size(); ++i) {
    Complex a = path.vertices[i - 1], b = path.vertices[i];
    double len = std::abs(b - a);
    if (len == 0.0) continue;
    int n = std::max(1, int(std::ceil(len / path.max_step)));
    for (int k = 1; k <= n; ++k) {
      Complex target = a + (b - a) * (double(k) / n);
      auto tracker = [&](Complex zeta) {
        auto next = branch.hop(z_prev, p_prev, s_prev, zeta);
        z_prev = zeta;
        p_prev = next.first;
        s_prev = next.second;
        return next.first;
      };
      acc += adaptive(tracker, z_prev, target, seg_abs_tol * (double(1) / n), 0);
      tracker(target);
    }
  }
  return acc;
}

Complex regularized_integrand(const MomentumBranch& branch, Complex zeta) {
  const double guard = branch.problem().pole_guard();
  if (std::abs(zeta) < guard) {
    if (zeta == Complex(0.0)) zeta = Complex(-guard, 0.0);
    else zeta *= guard / std::abs(zeta);
  }
  if (zeta.imag() == 0.0 && zeta.real() > 0.0) {
    // On the cut: limit from C+, p = p_up and ln(-zeta) = ln zeta - i pi.
    return branch.value_up(zeta) - Complex(0.0, 1.0) * Complex(std::log(zeta.real()), -kPi);
  }
  return branch.value(zeta) - Complex(0.0, 1.0) * log_neg(zeta);
}

Complex regularized_action(const MomentumBranch& branch, Complex z, const PathPolyline* path,
                           double seg_abs_tol) {
  if (z == Complex(0.0) && path == nullptr) return 0.0;
  PathPolyline straight;
  if (path == nullptr) {
    straight.vertices = {Complex(0.0), z};
    path = &straight;
  }
  auto f = [&branch](Complex zeta) { return regularized_integrand(branch, zeta); };
  return integrate_function(f, *path, seg_abs_tol);
}

CanonicityReport canonicity(const std::vector<Complex>& curve_vertices,
                            const MomentumBranch& branch, int samples_per_segment) {
  if (curve_vertices.size() < 2)
    raise(errc::invalid_argument, "curve needs at least two vertices");
  for (size_t i = 1; i < curve_vertices.size(); ++i)
    if (curve_vertices[i].imag() <= curve_vertices[i - 1].imag())
      raise(errc::not_vertical, "curve is not a graph over increasing Im z");

  CanonicityReport report;
  report.margin_up = std::numeric_limits<double>::infinity();
  report.margin_down = std::numeric_limits<double>::infinity();

  Complex z_prev = curve_vertices.front();
  Complex p_prev = branch.value(z_prev);
  Complex s_prev = branch.sqrt_sin(z_prev);
  for (size_t i = 1; i < curve_vertices.size(); ++i) {
    Complex a = curve_vertices[i - 1], b = curve_vertices[i];
    Complex zdot = (b - a) / (b.imag() - a.imag());
    for (int k = 0; k <= samples_per_segment; ++k) {
      Complex z = a + (b - a) * (double(k) / samples_per_segment);
      auto next = branch.hop(z_prev, p_prev, s_prev, z);
      z_prev = z;
      p_prev = next.first;
      s_prev = next.second;
      double up = (p_prev * zdot).imag();
      double down = -((p_prev - kPi) * zdot).imag();
      if (up < report.margin_up) {
        report.margin_up = up;
        report.worst_y = z.imag();
      }
      if (down < report.margin_down) {
        report.margin_down = down;
        report.worst_y = z.imag();
      }
    }
  }
  report.canonical = report.margin_up > 0.0 && report.margin_down > 0.0;
  return report;
}

ActionCache::ActionCache(std::shared_ptr<const MomentumBranch> branch, double quad_tol)
    : branch_(std::move(branch)), quad_tol_(quad_tol) {}

namespace {
std::pair<uint64_t, uint64_t> point_key(Complex z) {
  uint64_t re_bits, im_bits;
  double re = z.real(), im = z.imag();
  std::memcpy(&re_bits, &re, 8);
  std::memcpy(&im_bits, &im, 8);
  return {re_bits, im_bits};
}
}  // namespace

Complex ActionCache::action_to(Complex z) const {
  auto key = point_key(z);
  {
    std::lock_guard<std::mutex> lock(memo_->mutex);
    auto it = memo_->action.find(key);
    if (it != memo_->action.end()) return it->second;
  }
  Complex value = integrate_p(*branch_, branch_->sprime_path_to(z), quad_tol_);
  std::lock_guard<std::mutex> lock(memo_->mutex);
  memo_->action.emplace(key, value);
  return value;
}

Complex ActionCache::regularized_to(Complex z) const {
  auto key = point_key(z);
  {
    std::lock_guard<std::mutex> lock(memo_->mutex);
    auto it = memo_->regularized.find(key);
    if (it != memo_->regularized.end()) return it->second;
  }
  Complex value = regularized_action(*branch_, z, nullptr, quad_tol_);
  std::lock_guard<std::mutex> lock(memo_->mutex);
  memo_->regularized.emplace(key, value);
  return value;
}

}  // namespace dwkb
