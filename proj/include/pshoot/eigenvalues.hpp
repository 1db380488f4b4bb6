#pragma once

#include <vector>

#include "pshoot/model.hpp"
#include "pshoot/ptrig.hpp"

namespace pshoot {

/// Controls for the Pruefer-angle eigenvalue machinery.
struct EigenOptions {
  double tol_rel = 1e-11;
  double tol_abs = 1e-13;
  double r_start_eps = 1e-6;      // ball singular-start offset factor
  double lambda_rel_tol = 1e-10;  // bisection width on lambda
  double lambda_cap = 1e12;       // bracketing ceiling
};

struct EigenResult {
  int k = 1;
  double lambda = 0.0;
  double theta_end = 0.0;  // equals k*pi_p at a true eigenvalue
  int eigen_zeros = 0;     // = k - 1 interior zeros of the eigenfunction
};

/// Terminal Pruefer angle of the radial Neumann eigenvalue problem:
/// integrates
///   theta' = r^{N-1} [ (p-1) r^{-(N-1)p'} |sin_p theta|^{p'}
///                      + lambda |cos_p theta|^p ]
/// from theta(R1) = pi_p and returns theta(R2). lambda = 0 is the
/// equilibrium theta == pi_p. Non-decreasing in lambda.
double eigen_angle(const PContext& ctx, const RadialDomain& dom, double lambda,
                   const EigenOptions& opt = {});

/// Same integration, sampling theta at the given sorted grid points. The
/// returned vector matches the grid (points at or below the singular start
/// take the value pi_p + the power-series offset).
std::vector<double> eigen_angle_profile(const PContext& ctx,
                                        const RadialDomain& dom, double lambda,
                                        const std::vector<double>& grid,
                                        const EigenOptions& opt = {});

/// k-th radial Neumann eigenvalue. k = 1 returns lambda = 0 exactly; k >= 2
/// brackets by doubling and bisects theta_lambda(R2) = k*pi_p. Throws
/// BracketOverflow past opt.lambda_cap.
EigenResult radial_eigenvalue(const PContext& ctx, const RadialDomain& dom,
                              int k, const EigenOptions& opt = {});

/// Eigenfunction reconstruction (diagnostics): integrates the radial
/// eigen-equation with phi(R1) = 1, phi'(R1) = 0.
struct EigenFunction {
  std::vector<double> r, phi, dphi;
  int sign_changes = 0;
  double boundary_residual = 0.0;  // |phi'(R2)|
  double max_abs_dphi = 0.0;
};

EigenFunction eigenfunction(const PContext& ctx, const RadialDomain& dom,
                            double lambda, const EigenOptions& opt = {});

}  // namespace pshoot
