#pragma once

#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

#include "dwkb/potential.hpp"

namespace dwkb {

struct PathPolyline {
  std::vector<Complex> vertices;
  double max_step = 0.02;

  static PathPolyline through(std::initializer_list<Complex> pts, double step = 0.02) {
    return PathPolyline{std::vector<Complex>(pts), step};
  }
  double length() const;
};

struct ContinuationSample {
  Complex z, p;
};

struct PoleDecomposition {
  Complex C;                            // p(z) - i ln z -> C as z -> 0
  std::function<Complex(Complex)> g;    // analytic remainder, g(0) == 0
};

// ln z analytic in C \ R+, fixed by arg z in (0, 2pi); ln(-1) = i pi.
Complex log_cut_pos(Complex z);
// ln(-z) analytic in C \ R+, fixed by ln(-z)|_{z=-1} = 0.
Complex log_neg(Complex z);

// One analytic branch of the complex momentum: 2 cos p(z) + w(z) = 0 with
// Im p < 0 on S' = S \ R+ and the base representative in Re p in (-pi, pi].
// value()/sqrt_sin() continue along canonical S'-paths; value_up()/
// sqrt_sin_up() continue from S' through C+ across R+* (the p_up family).
class MomentumBranch {
 public:
  static MomentumBranch at(std::shared_ptr<const SpectralProblem> problem, Complex z_ref);

  const SpectralProblem& problem() const { return *problem_; }
  std::shared_ptr<const SpectralProblem> problem_ptr() const { return problem_; }
  Complex base_point() const { return base_point_; }
  Complex base_value() const { return base_value_; }
  Complex base_sqrt_sin() const { return base_sqrt_sin_; }
  double continuation_step() const { return step_; }

  Complex value(Complex z) const;
  Complex sqrt_sin(Complex z) const;
  Complex value_up(Complex z) const;
  Complex sqrt_sin_up(Complex z) const;

  // Predictor-corrector continuation along an explicit path; samples satisfy
  // |p_{k+1} - p_k| < pi/4 and the defining identity to machine level.
  std::vector<ContinuationSample> continue_along(const PathPolyline& path) const;

  // Continuation of (p, sqrt(sin p)) from an explicit start along a straight
  // hop, with internal bisection; StepCollapse when bisection cannot settle.
  std::pair<Complex, Complex> hop(Complex z_from, Complex p_from, Complex s_from, Complex z_to,
                                  int depth = 0) const;

  PoleDecomposition decompose_near_pole() const;

  PathPolyline sprime_path_to(Complex z) const;
  PathPolyline up_path_to(Complex z) const;

 private:
  MomentumBranch(std::shared_ptr<const SpectralProblem> problem, Complex z_ref, Complex p_ref,
                 Complex s_ref, double step);

  std::pair<Complex, Complex> walk(const PathPolyline& path) const;
  // Single corrector step; empty when the phase or root tracking criteria
  // reject the hop and a subdivision is needed.
  std::optional<std::pair<Complex, Complex>> try_step(Complex p_from, Complex s_from,
                                                      Complex z_to) const;

  std::shared_ptr<const SpectralProblem> problem_;
  Complex base_point_{}, base_value_{}, base_sqrt_sin_{};
  double step_ = 0.02;

  // Append-only memo of continued (p, sqrt sin p) values, keyed by the exact
  // bits of z and the continuation family.
  struct Memo {
    std::mutex mutex;
    std::map<std::tuple<uint64_t, uint64_t, bool>, std::pair<Complex, Complex>> values;
  };
  std::shared_ptr<Memo> memo_ = std::make_shared<Memo>();

  std::pair<Complex, Complex> cached(Complex z, bool up_family) const;
};

}  // namespace dwkb
