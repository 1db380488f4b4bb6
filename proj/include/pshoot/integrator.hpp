#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "pshoot/model.hpp"
#include "pshoot/ptrig.hpp"

namespace pshoot {

/// Shooting parameter and solver controls. The shot starts from
/// u(R1) = 1 - d, v(R1) = 0 with d in [0, 1]. Both d and u0 = 1 - d are
/// stored: near the d = 1 end the physically meaningful quantity is the
/// tiny offset u0, which survives in floating point long after 1 - d
/// rounds to zero, and folds in the C1 = 0 regime sit exactly there.
struct ShotSpec {
  double d = 0.5;
  double u0 = 0.5;  // = 1 - d, authoritative when d is close to 1
  double tol_rel = 1e-10;
  double tol_abs = 1e-12;
  double r_start_eps = 1e-6;  // singular-start offset factor (ball, N >= 2)

  static ShotSpec from_d(double d);
  static ShotSpec from_u0(double u0);
  ShotSpec with_tols(double rel, double abs) const;

  /// Throws std::invalid_argument on d outside [0, 1] or non-positive
  /// tolerances. Shots with u(R1) < 0 are not meaningful for this problem.
  void check() const;
};

struct StateSample {
  double u, v, theta;
};

/// A trajectory r -> (u, v, theta) with the derived amplitude
/// rho^2 = |u-1|^p + (p-1)|v|^{p'} and energy H = |u'|^p/p' + F_hat(u),
/// sampled on the integrator's accepted grid plus any requested output
/// points. theta is continuous and non-decreasing; for shots with
/// d in (0, 1) the amplitude never vanishes. H is constant for N = 1 and
/// non-increasing for N >= 2. Immutable once returned.
///
/// w = u - 1 is carried as its own column: shots with small d are integrated
/// directly in w, whose values near the constant solution fall far below the
/// rounding of u itself.
struct PhasePath {
  std::vector<double> r, u, v, theta, rho2, H;
  std::vector<double> w;               // u - 1, full precision
  std::vector<double> du, dv, dtheta;  // exact nodal derivatives

  double p = 2.0;
  int N = 1;
  double R1 = 0.0, R2 = 1.0;
  double d = 0.0, u0 = 1.0;

  std::size_t size() const { return r.size(); }
  double theta_end() const { return theta.back(); }

  /// Cubic Hermite interpolation between samples (exact derivatives at the
  /// nodes). rq is clamped to the sampled range.
  StateSample eval(double rq) const;

  double min_u() const;
  double max_u() const;
  double sup_rho() const;
  double max_abs_uprime() const;
  /// |u'(R2)|; vanishes at a Neumann solution.
  double boundary_residual() const { return du.empty() ? 0.0 : std::abs(du.back()); }
};

/// State produced by the power-series start at the ball center (R1 = 0,
/// N >= 2), where the system carries an r^{-(N-1)/(p-1)} singularity.
struct SingularStart {
  double r0;
  double u, v, theta;
  double w;  // u - 1, computed without forming 1 - d
};

/// Asymptotic start for the ball: with u0 = 1 - d,
///   u(r0) = u0 + (p-1)/p * phi_{p'}(-f_hat(u0)/N) * r0^{p'},
///   v(r0) = -(r0^N/N) * f_hat(u0),
/// valid to O(r0^{2p'}); r0 = max(r_start_eps, 1e-8) * R2.
SingularStart singular_start(const PContext& ctx, const Nonlinearity& nl,
                             const RadialDomain& dom, const ShotSpec& spec);

/// Integrates the radial shot over [R1, R2]. When emit_grid is given (sorted,
/// inside [R1, R2]) its points are included in the returned samples through
/// dense output. Throws StepSizeUnderflow / InvariantBreach on solver
/// trouble; both indicate a configuration problem, not a mathematical one.
PhasePath integrate_shot(const PContext& ctx, const Nonlinearity& nl,
                         const RadialDomain& dom, const ShotSpec& spec,
                         const std::vector<double>* emit_grid = nullptr);

/// Largest positive increment of H between consecutive samples (solver
/// health; the exact flow has H' = -(N-1)/r |u'|^p <= 0).
double energy_profile(const PhasePath& path);

}  // namespace pshoot
