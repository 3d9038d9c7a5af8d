#include "dwkb/momentum.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "dwkb/errors.hpp"

namespace dwkb {

namespace {

constexpr double kMaxPhaseStep = kPi / 4.0;
constexpr double kMinHop = 1e-9;

// Nearest solution of 2 cos p + w = 0 to the predictor, over both sign
// families and 2 pi shifts, polished by two Newton steps.
Complex solve_near(Complex w, Complex predictor) {
  Complex a = std::acos(-0.5 * w);
  Complex best{};
  double best_dist = std::numeric_limits<double>::infinity();
  for (double s : {1.0, -1.0}) {
    Complex cand = s * a;
    double m = std::round((predictor.real() - cand.real()) / (2.0 * kPi));
    cand += 2.0 * kPi * m;
    double d = std::abs(cand - predictor);
    if (d < best_dist) {
      best_dist = d;
      best = cand;
    }
  }
  for (int it = 0; it < 2; ++it) {
    Complex sn = std::sin(best);
    if (std::abs(sn) < 1e-14) break;
    best -= (2.0 * std::cos(best) + w) / (-2.0 * sn);
  }
  return best;
}

}  // namespace

double PathPolyline::length() const {
  double acc = 0.0;
  for (size_t i = 1; i < vertices.size(); ++i) acc += std::abs(vertices[i] - vertices[i - 1]);
  return acc;
}

Complex log_cut_pos(Complex z) { return std::log(-z) + Complex(0.0, kPi); }

Complex log_neg(Complex z) {
  if (z.imag() == 0.0 && z.real() > 0.0) {
    // Limit from C+ (the S' convention on the cut): ln(-x) = ln x - i pi.
    return Complex(std::log(z.real()), -kPi);
  }
  return std::log(-z);
}

MomentumBranch::MomentumBranch(std::shared_ptr<const SpectralProblem> problem, Complex z_ref,
                               Complex p_ref, Complex s_ref, double step)
    : problem_(std::move(problem)),
      base_point_(z_ref),
      base_value_(p_ref),
      base_sqrt_sin_(s_ref),
      step_(step) {}

MomentumBranch MomentumBranch::at(std::shared_ptr<const SpectralProblem> problem, Complex z_ref) {
  const auto& prob = *problem;
  if (!prob.strip().contains(z_ref) || (z_ref.imag() == 0.0 && z_ref.real() >= 0.0 &&
                                        prob.potential().has_pole()))
    raise(errc::outside_strip, "branch base point must lie in S'");
  Complex w = prob.eval(z_ref);
  if (std::min(std::abs(w - 2.0), std::abs(w + 2.0)) < 1e-10)
    raise(errc::turning_point, "w within 1e-10 of +-2 at the base point");
  Complex a = std::acos(-0.5 * w);
  if (std::abs(a.imag()) < 1e-10)
    raise(errc::ambiguous_branch, "Im p vanishes at the base point (w in [-2, 2])");
  Complex p = a.imag() < 0.0 ? a : -a;
  if (p.real() <= -kPi) p += 2.0 * kPi;
  else if (p.real() > kPi) p -= 2.0 * kPi;
  for (int it = 0; it < 2; ++it) p -= (2.0 * std::cos(p) + w) / (-2.0 * std::sin(p));
  return MomentumBranch(std::move(problem), z_ref, p, std::sqrt(std::sin(p)), 0.02);
}

std::optional<std::pair<Complex, Complex>> MomentumBranch::try_step(Complex p_from, Complex s_from,
                                                                    Complex z_to) const {
  Complex p_next = solve_near(problem_->eval(z_to), p_from);
  if (std::abs(p_next - p_from) >= kMaxPhaseStep) return std::nullopt;
  Complex sin_next = std::sin(p_next);
  Complex ratio = sin_next / std::sin(p_from);
  if (!(ratio.real() > 0.0)) return std::nullopt;  // root tracking ambiguous past pi/2
  Complex cand = std::sqrt(sin_next);
  Complex s_next = std::abs(cand - s_from) <= std::abs(cand + s_from) ? cand : -cand;
  return std::make_pair(p_next, s_next);
}

std::pair<Complex, Complex> MomentumBranch::hop(Complex z_from, Complex p_from, Complex s_from,
                                                Complex z_to, int depth) const {
  if (z_from == z_to) return {p_from, s_from};
  if (auto step = try_step(p_from, s_from, z_to)) return *step;
  if (depth >= 60 || std::abs(z_to - z_from) < kMinHop * std::abs(z_to))
    raise(errc::step_collapse, "continuation step collapsed near a singular point");
  Complex mid = 0.5 * (z_from + z_to);
  auto half = hop(z_from, p_from, s_from, mid, depth + 1);
  return hop(mid, half.first, half.second, z_to, depth + 1);
}

std::pair<Complex, Complex> MomentumBranch::walk(const PathPolyline& path) const {
  Complex p = base_value_, s = base_sqrt_sin_;
  Complex z = path.vertices.at(0);
  for (size_t i = 1; i < path.vertices.size(); ++i) {
    Complex a = path.vertices[i - 1], b = path.vertices[i];
    double len = std::abs(b - a);
    if (len == 0.0) continue;
    int n = std::max(1, int(std::ceil(len / path.max_step)));
    for (int k = 1; k <= n; ++k) {
      Complex target = a + (b - a) * (double(k) / n);
      auto next = hop(z, p, s, target);
      p = next.first;
      s = next.second;
      z = target;
    }
  }
  return {p, s};
}

PathPolyline MomentumBranch::sprime_path_to(Complex z) const {
  PathPolyline path;
  path.max_step = step_;
  const Strip& strip = problem_->strip();
  double clearance = 0.25 * strip.d_y;
  if (problem_->potential().has_pole() && z.imag() != 0.0 && std::abs(z.imag()) < clearance) {
    // Travel at a safe height on the same side of the cut and descend
    // vertically, so the horizontal leg never grazes the pole.
    double y = z.imag() > 0.0 ? clearance : -clearance;
    path.vertices = {base_point_, Complex(base_point_.real(), y), Complex(z.real(), y), z};
    return path;
  }
  path.vertices = {base_point_, Complex(base_point_.real(), z.imag()), z};
  return path;
}

PathPolyline MomentumBranch::up_path_to(Complex z) const {
  const Strip& strip = problem_->strip();
  double y_up = 0.6 * strip.d_y;
  double x_down = std::max(z.real(), 0.5 * strip.d_x);
  PathPolyline path;
  path.max_step = step_;
  path.vertices = {base_point_, Complex(base_point_.real(), y_up), Complex(x_down, y_up),
                   Complex(x_down, z.imag()), z};
  return path;
}

std::pair<Complex, Complex> MomentumBranch::cached(Complex z, bool up_family) const {
  uint64_t re_bits, im_bits;
  double re = z.real(), im = z.imag();
  static_assert(sizeof(double) == sizeof(uint64_t));
  std::memcpy(&re_bits, &re, 8);
  std::memcpy(&im_bits, &im, 8);
  auto key = std::make_tuple(re_bits, im_bits, up_family);
  {
    std::lock_guard<std::mutex> lock(memo_->mutex);
    auto it = memo_->values.find(key);
    if (it != memo_->values.end()) return it->second;
  }
  auto result = walk(up_family ? up_path_to(z) : sprime_path_to(z));
  {
    std::lock_guard<std::mutex> lock(memo_->mutex);
    memo_->values.emplace(key, result);
  }
  return result;
}

Complex MomentumBranch::value(Complex z) const { return cached(z, false).first; }
Complex MomentumBranch::sqrt_sin(Complex z) const { return cached(z, false).second; }
Complex MomentumBranch::value_up(Complex z) const { return cached(z, true).first; }
Complex MomentumBranch::sqrt_sin_up(Complex z) const { return cached(z, true).second; }

std::vector<ContinuationSample> MomentumBranch::continue_along(const PathPolyline& path) const {
  if (path.vertices.size() < 2) raise(errc::invalid_argument, "path needs at least two vertices");
  std::vector<ContinuationSample> samples;
  Complex z0 = path.vertices.front();
  Complex p = value(z0), s = sqrt_sin(z0);
  samples.push_back({z0, p});
  Complex z = z0;
  for (size_t i = 1; i < path.vertices.size(); ++i) {
    Complex a = path.vertices[i - 1], b = path.vertices[i];
    double len = std::abs(b - a);
    if (len == 0.0) continue;
    int n = std::max(1, int(std::ceil(len / path.max_step)));
    for (int k = 1; k <= n; ++k) {
      // Explicit step-halving so every recorded consecutive pair satisfies
      // |p_{k+1} - p_k| < pi/4.
      std::vector<Complex> pending = {a + (b - a) * (double(k) / n)};
      while (!pending.empty()) {
        Complex target = pending.back();
        if (target == z) {
          pending.pop_back();
          continue;
        }
        if (auto step = try_step(p, s, target)) {
          p = step->first;
          s = step->second;
          z = target;
          samples.push_back({z, p});
          pending.pop_back();
          continue;
        }
        if (pending.size() > 80 || std::abs(target - z) < kMinHop * std::abs(target))
          raise(errc::step_collapse, "continuation step collapsed near a singular point");
        pending.push_back(0.5 * (z + target));
      }
    }
  }
  return samples;
}

PoleDecomposition MomentumBranch::decompose_near_pole() const {
  if (!problem_->potential().has_pole())
    raise(errc::invalid_argument, "pole decomposition requires a potential with a pole");
  // Richardson extrapolation of p(-t) - i ln(-t) to t -> 0 on geometric scales.
  const int levels = 5;
  const double t0 = 1e-3;
  double ts[levels];
  Complex table[levels][levels];
  for (int j = 0; j < levels; ++j) {
    ts[j] = t0 * std::pow(0.5, j);
    Complex z(-ts[j], 0.0);
    table[j][0] = value(z) - Complex(0.0, 1.0) * log_cut_pos(z);
  }
  for (int m = 1; m < levels; ++m)
    for (int j = m; j < levels; ++j)
      table[j][m] =
          table[j][m - 1] + (table[j][m - 1] - table[j - 1][m - 1]) / (ts[j - m] / ts[j] - 1.0);
  Complex C = table[levels - 1][levels - 1];
  if (std::abs(C - table[levels - 1][levels - 2]) > 1e-8)
    raise(errc::extrapolation_unstable, "successive pole-constant extrapolants differ > 1e-8");
  auto self = *this;
  return PoleDecomposition{
      C, [self, C](Complex z) -> Complex {
        if (z == Complex(0.0)) return 0.0;
        return self.value(z) - Complex(0.0, 1.0) * log_cut_pos(z) - C;
      }};
}

}  // namespace dwkb
