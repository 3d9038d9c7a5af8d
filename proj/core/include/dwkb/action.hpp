#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "dwkb/momentum.hpp"

namespace dwkb {

struct CanonicityReport {
  bool canonical = false;
  double margin_up = 0.0;    // min over samples of d/dy Im int p
  double margin_down = 0.0;  // min over samples of -d/dy Im int (p - pi)
  double worst_y = 0.0;
};

// Integral of the continued momentum branch along the polyline.  Adaptive
// Gauss-Kronrod refinement; absolute tolerance per segment.
Complex integrate_p(const MomentumBranch& branch, const PathPolyline& path,
                    double seg_abs_tol = 1e-11);

// Integral along the polyline of an arbitrary integrand (no continuation
// chaining; the integrand owns its branch bookkeeping).
Complex integrate_function(const std::function<Complex(Complex)>& f, const PathPolyline& path,
                           double seg_abs_tol = 1e-11);

// int_0^z (p(zeta) - i ln(-zeta)) dzeta.  The integrand is analytic in S, so
// the value is path independent; path defaults to the straight segment [0, z].
Complex regularized_action(const MomentumBranch& branch, Complex z,
                           const PathPolyline* path = nullptr, double seg_abs_tol = 1e-12);

// The integrand of the regularized action, assembled from S'-branch values
// off R+ and the continued-from-above p_up values on R+ itself.
Complex regularized_integrand(const MomentumBranch& branch, Complex zeta);

// Vertical-curve canonicity check: along z(y) both d/dy Im int p dzeta > 0
// and d/dy Im int (p - pi) dzeta < 0, with one-sided derivatives at corners.
// The derivatives are evaluated analytically as Im(p(z(y)) z'(y)).
CanonicityReport canonicity(const std::vector<Complex>& curve_vertices,
                            const MomentumBranch& branch, int samples_per_segment = 9);

// Memo of action integrals from the branch base point along canonical
// S'-paths, plus regularized actions from 0.  Append-only, thread safe.
class ActionCache {
 public:
  explicit ActionCache(std::shared_ptr<const MomentumBranch> branch, double quad_tol = 1e-12);

  const MomentumBranch& branch() const { return *branch_; }

  Complex action_to(Complex z) const;       // int_{base}^{z} p dzeta, S' path
  Complex regularized_to(Complex z) const;  // int_0^z (p - i ln(-zeta)) dzeta

 private:
  std::shared_ptr<const MomentumBranch> branch_;
  double quad_tol_;
  struct Memo {
    std::mutex mutex;
    std::map<std::pair<uint64_t, uint64_t>, Complex> action, regularized;
  };
  std::shared_ptr<Memo> memo_ = std::make_shared<Memo>();
};

}  // namespace dwkb
