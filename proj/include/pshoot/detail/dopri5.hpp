#pragma once

// Embedded Dormand-Prince 5(4) pair with PI step control, FSAL, and the
// classic 4th-order continuous extension for dense output. Header-only and
// generic over the (small, fixed) state dimension so the trig-table build,
// the radial shot system and the scalar Pruefer angle all share one stepper.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "pshoot/errors.hpp"

namespace pshoot::detail {

template <int K>
using State = std::array<double, K>;

template <int K>
struct Dopri5Options {
  double rtol = 1e-10;
  State<K> atol{};          // per-component absolute tolerance
  double h_init = 0.0;      // 0 = choose automatically
  double h_max = 0.0;       // 0 = whole span
  int cap_component = -1;   // if >= 0, bound the per-step increment ...
  double cap_delta = 0.0;   // ... of this component by cap_delta
  long max_steps = 4000000;
  // land accepted steps exactly on the grid points instead of interpolating
  // across them (needed where the right-hand side has derivative blow-ups
  // that defeat the dense interpolant)
  bool step_on_grid = false;
};

template <int K>
struct DenseCoeffs {
  double r_lo = 0.0, h = 0.0;
  State<K> c1{}, c2{}, c3{}, c4{}, c5{};

  void eval(double r, State<K>& out) const {
    const double s = (r - r_lo) / h;
    const double s1 = 1.0 - s;
    for (int i = 0; i < K; ++i)
      out[i] = c1[i] + s * (c2[i] + s1 * (c3[i] + s * (c4[i] + s1 * c5[i])));
  }
};

// rhs(r, y, dy); emit(r, y, dy) at the initial point, every requested grid
// point (dense output) and every accepted step end, in increasing r;
// post_step(r, y) may adjust the state after acceptance (e.g. project onto
// an invariant manifold).
template <int K, class RHS, class Emit, class PostStep>
void dopri5_integrate(RHS&& rhs, double r0, double r1, State<K> y,
                      const Dopri5Options<K>& opt,
                      const double* grid, const double* grid_end,
                      Emit&& emit, PostStep&& post_step) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  // dense-output weights
  static constexpr double d1 = -12715105075.0 / 11282082432.0;
  static constexpr double d3 = 87487479700.0 / 32700410799.0;
  static constexpr double d4 = -10690763975.0 / 1880347072.0;
  static constexpr double d5 = 701980252875.0 / 199316789632.0;
  static constexpr double d6 = -1453857185.0 / 822651844.0;
  static constexpr double d7 = 69997945.0 / 29380423.0;

  if (!(r1 > r0)) throw std::invalid_argument("dopri5: need r1 > r0");
  const double span = r1 - r0;
  const double h_max = opt.h_max > 0 ? opt.h_max : span;

  State<K> k1, k2, k3, k4, k5, k6, k7, ynew, ytmp, err;
  double r = r0;
  rhs(r, y, k1);
  emit(r, y, k1);

  auto sc = [&](int i, const State<K>& ya, const State<K>& yb) {
    return opt.atol[i] + opt.rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
  };

  // initial step: conservative magnitude-based guess; the controller (and a
  // handful of cheap rejections) takes it from there
  double h = opt.h_init;
  if (h <= 0) {
    double y_inf = 0, k_inf = 0;
    for (int i = 0; i < K; ++i) {
      y_inf = std::max(y_inf, std::abs(y[i]));
      k_inf = std::max(k_inf, std::abs(k1[i]));
    }
    h = std::min(0.01 * (1.0 + y_inf) / (k_inf + 1e-12), 1e-2 * span);
  }
  h = std::min({h, span, h_max});

  const double* g = grid;
  while (g != grid_end && *g <= r) ++g;

  double facold = 1e-4;
  long nstep = 0;
  bool last = false;

  while (true) {
    if (r >= r1) break;
    if (++nstep > opt.max_steps)
      throw SolverError("dopri5: step budget exceeded at r = " + std::to_string(r));

    if (opt.cap_component >= 0) {
      const double rate = std::abs(k1[opt.cap_component]);
      if (rate > 0) h = std::min(h, opt.cap_delta / rate);
    }
    double grid_target = 0.0;
    bool on_grid_target = false;
    if (opt.step_on_grid) {
      while (g != grid_end && *g <= r) ++g;
      if (g != grid_end && *g - r <= h) {
        grid_target = *g;
        h = grid_target - r;
        on_grid_target = true;
      }
    }
    if (r + h >= r1) {
      h = r1 - r;
      last = true;
      if (on_grid_target && grid_target < r1) last = false;
    } else {
      last = false;
    }
    const double h_floor =
        64 * std::numeric_limits<double>::epsilon() * std::max(std::abs(r), span);
    if (h < h_floor) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "dopri5: step size underflow at r = %.17g (h = %.3g, y0 = %.6g)",
                    r, h, y[0]);
      throw StepSizeUnderflow(buf);
    }

    for (int i = 0; i < K; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(r + c2 * h, ytmp, k2);
    for (int i = 0; i < K; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(r + c3 * h, ytmp, k3);
    for (int i = 0; i < K; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(r + c4 * h, ytmp, k4);
    for (int i = 0; i < K; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(r + c5 * h, ytmp, k5);
    for (int i = 0; i < K; ++i)
      ytmp[i] = y[i] +
                h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                     a65 * k5[i]);
    rhs(r + h, ytmp, k6);
    for (int i = 0; i < K; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                            b6 * k6[i]);
    rhs(r + h, ynew, k7);

    double errn = 0;
    for (int i = 0; i < K; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                    e6 * k6[i] + e7 * k7[i]);
      const double s = sc(i, y, ynew);
      errn += (err[i] / s) * (err[i] / s);
    }
    errn = std::sqrt(errn / K);

    bool cap_reject = false;
    if (opt.cap_component >= 0 &&
        std::abs(ynew[opt.cap_component] - y[opt.cap_component]) >
            1.5 * opt.cap_delta)
      cap_reject = true;

    if (errn <= 1.0 && !cap_reject) {
      // accepted: dense output for grid points inside (r, r+h)
      if (!opt.step_on_grid && g != grid_end && *g <= r + h) {
        DenseCoeffs<K> dc;
        dc.r_lo = r;
        dc.h = h;
        for (int i = 0; i < K; ++i) {
          const double ydiff = ynew[i] - y[i];
          const double bspl = h * k1[i] - ydiff;
          dc.c1[i] = y[i];
          dc.c2[i] = ydiff;
          dc.c3[i] = bspl;
          dc.c4[i] = ydiff - h * k7[i] - bspl;
          dc.c5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                          d6 * k6[i] + d7 * k7[i]);
        }
        State<K> yg, kg;
        while (g != grid_end && *g <= r + h) {
          const double rg = *g++;
          if (rg >= r + h - 1e-14 * std::max(1.0, std::abs(r + h))) break;
          dc.eval(rg, yg);
          rhs(rg, yg, kg);
          emit(rg, yg, kg);
        }
      }
      const double h_taken = h;
      r = on_grid_target ? grid_target : r + h;
      if (on_grid_target) ++g;
      y = ynew;
      post_step(r, y);
      rhs(r, y, k1);  // FSAL slot (post_step may have moved the state)
      emit(r, y, k1);

      const double fac11 = std::pow(std::max(errn, 1e-16), 0.17);
      double fac = fac11 / std::pow(facold, 0.04);
      fac = std::max(0.1, std::min(5.0, fac / 0.9));
      h = std::min(h_taken / fac, h_max);
      facold = std::max(errn, 1e-4);
      if (last && r >= r1) break;
    } else if (cap_reject) {
      h *= 0.5;
    } else {
      const double fac11 = std::pow(errn, 0.17);
      h /= std::min(5.0, fac11 / 0.9);
    }
  }
}

}  // namespace pshoot::detail
