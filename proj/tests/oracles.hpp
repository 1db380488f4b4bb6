#pragma once

// Test-side oracles, deliberately independent of the library's evaluation
// paths: a fixed-step RK4 on the defining trig system (the library uses an
// adaptive embedded pair plus a symmetry-folded table), closed forms for the
// p = 2 / N = 1 reductions, and a plain adaptive-Simpson quadrature.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace oracles {

inline double phi(double s, double e) {
  if (s == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(s), e - 1.0), s);
}

inline double pi_p_closed_form(double p) {
  return 2.0 * std::numbers::pi * std::pow(p - 1.0, 1.0 / p) /
         (p * std::sin(std::numbers::pi / p));
}

struct TrigState {
  double x, y;
};

/// One RK4 step of the defining system x' = -phi_{p'}(y), y' = phi_p(x).
inline TrigState trig_rk4_step(TrigState s, double h, double p, double pc) {
  auto f = [&](TrigState a) {
    return TrigState{-phi(a.y, pc), phi(a.x, p)};
  };
  const TrigState k1 = f(s);
  const TrigState k2 = f({s.x + 0.5 * h * k1.x, s.y + 0.5 * h * k1.y});
  const TrigState k3 = f({s.x + 0.5 * h * k2.x, s.y + 0.5 * h * k2.y});
  const TrigState k4 = f({s.x + h * k3.x, s.y + h * k3.y});
  return {s.x + h / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
          s.y + h / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y)};
}

/// Fixed-step RK4 integration of the defining system from (1, 0).
inline TrigState trig_rk4(double p, double theta, int steps_per_unit = 20000) {
  const double pc = p / (p - 1.0);
  const int n = std::max(64, int(std::abs(theta) * steps_per_unit));
  const double h = theta / n;
  TrigState s{1.0, 0.0};
  for (int i = 0; i < n; ++i) s = trig_rk4_step(s, h, p, pc);
  return s;
}

/// Pruefer angle of u'' + lambda u = 0, u(0) = -1, u'(0) = 0 in the
/// convention u = rho cos(theta), u' = -rho sin(theta), theta(0) = pi:
/// tan(theta - pi) = sqrt(lambda) tan(sqrt(lambda) r), unwrapped.
inline double linear_pruefer_angle(double lambda, double r) {
  const double pi = std::numbers::pi;
  if (lambda == 0.0) return pi;
  const double psi = std::sqrt(lambda) * r;
  const double m = std::floor(psi / pi + 0.5);
  return pi + m * pi + std::atan(std::sqrt(lambda) * std::tan(psi - m * pi));
}

/// First positive root of tan x = x (Neumann condition for the radial
/// eigenfunction sin(sqrt(lambda) r)/r on the unit ball, N = 3, p = 2).
inline double tan_x_equals_x_root() {
  const double pi = std::numbers::pi;
  double lo = pi + 1e-9, hi = 1.5 * pi - 1e-9;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::tan(mid) - mid > 0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

/// Adaptive Simpson quadrature (plain recursive form).
inline double simpson_rec(const std::function<double(double)>& g, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double flm = g(0.5 * (a + m)), frm = g(0.5 * (m + b));
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double quad(const std::function<double(double)>& g, double a, double b,
                   double tol = 1e-12) {
  if (a == b) return 0.0;
  const double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(g, a, b, fa, fm, fb, whole, tol, 46);
}

/// Quarter period of the defining flow by quadrature:
/// pi_p/2 = (p-1)^{1/p} int_0^1 (1 - x^p)^{-1/p} dx, the time for x to fall
/// from 1 to 0 along the invariant curve |x|^p + (p-1)|y|^{p'} = 1. The
/// endpoint singularity is removed by x = 1 - t^beta with
/// beta = 2p/(p-1), and 1 - (1-t^beta)^p is evaluated through log1p/expm1.
inline double quarter_period_quadrature(double p) {
  const double beta = 2.0 * p / (p - 1.0);
  auto g = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double tb = std::pow(t, beta);
    if (tb >= 1.0) return std::pow(t, beta - 1.0) * beta;  // x = 0 end
    const double one_minus_xp = -std::expm1(p * std::log1p(-tb));
    return beta * std::pow(t, beta - 1.0) * std::pow(one_minus_xp, -1.0 / p);
  };
  return std::pow(p - 1.0, 1.0 / p) * quad(g, 0.0, 1.0, 1e-14);
}

struct TrigPoint {
  double theta, x, y;
};

/// A point of (cos_p, sin_p) inside the first quarter period, built without
/// any ODE stepping: choose y = frac * s_max, recover x from the invariant
/// curve, and get theta as the time-of-flight integral
/// theta = int_0^y (1 - (p-1) w^{p'})^{-(p-1)/p} dw (smooth for frac < 1).
inline TrigPoint trig_quadrature_point(double p, double frac) {
  const double pc = p / (p - 1.0);
  const double s_max = std::pow(1.0 / (p - 1.0), 1.0 / pc);
  const double y = frac * s_max;
  auto g = [&](double w) {
    return std::pow(1.0 - (p - 1.0) * std::pow(w, pc), -(p - 1.0) / p);
  };
  const double theta = quad(g, 0.0, y, 1e-14);
  const double x = std::pow(1.0 - (p - 1.0) * std::pow(y, pc), 1.0 / p);
  return {theta, x, y};
}

/// Deterministic uniform generator in [0, 1) (xorshift-style, fixed seed).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : s_(seed) {}
  double uniform() {
    s_ ^= s_ << 13;
    s_ ^= s_ >> 7;
    s_ ^= s_ << 17;
    return double(s_ >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t s_;
};

}  // namespace oracles
