#pragma once

#include <string>
#include <vector>

#include "pshoot/integrator.hpp"
#include "pshoot/model.hpp"
#include "pshoot/ptrig.hpp"

namespace pshoot {

struct PathDigest {
  double min_u = 0.0, max_u = 0.0, sup_rho = 0.0;
};

/// Terminal angle of one shot. theta_end >= pi_p up to solver noise, and
/// theta_end = pi_p at d = 1. winding counts half-turns beyond the start.
struct ShootOutcome {
  double d = 0.0, u0 = 1.0;
  double theta_end = 0.0;
  double winding = 0.0;  // (theta_end - pi_p) / pi_p
  PathDigest digest;
};

ShootOutcome shooting_map(const PContext& ctx, const Nonlinearity& nl,
                          const RadialDomain& dom, const ShotSpec& spec);

enum class BranchLabel { Unique, Minus, Plus };
std::string to_string(BranchLabel label);

/// A certified non-constant radial solution: theta_d(R2) = (j+1) pi_p, the
/// profile crosses u = 1 exactly j times, u stays positive, u'(R2) vanishes
/// within the root tolerance.
struct SolutionRecord {
  double d = 0.0;
  double u0 = 1.0;  // = 1 - d; authoritative near the d = 1 fold
  int j = 0;
  BranchLabel branch = BranchLabel::Unique;
  PhasePath profile;
  double theta_end = 0.0;
  double boundary_residual = 0.0;
  bool positive = false;
  std::vector<double> crossing_radii;  // the j radii where u crosses 1
  bool ambiguous_level = false;        // more than 2 roots found at this j
};

/// d-scan grid specification. Nodes are refined geometrically toward both
/// endpoints, deeply: in the C1 = 0 regime roots approach the endpoints
/// exponentially (the rotation deficit scales like d^{2-p} near 0), and the
/// near-1 side is parametrized by u0 = 1 - d so that folds sitting
/// exponentially close to d = 1 on large domains remain resolvable (shots
/// with small d integrate in the shifted variable w = u - 1, so tiny d
/// survives rounding just as tiny u0 does).
struct ScanSpec {
  int points = 256;  // >= 64
  double d_min = 1e-30;
  double u0_min = 1e-45;
  int threads = 1;
};

struct FindOptions {
  int j_max = 1;
  ScanSpec scan;
  double d_tol = 1e-12;    // bisection width on d (and on u0 near the fold)
  double tie_tol = 1e-10;  // |theta - level| treated as already at the level
  std::vector<double> hint_u0;  // warm-start: extra scan windows around these
};

struct LevelDiagnostics {
  int j = 0;
  int roots = 0;
  bool ambiguous = false;  // more than 2 roots at this level
};

struct FindResult {
  std::vector<SolutionRecord> records;  // sorted by (j, d)
  std::vector<LevelDiagnostics> levels;
  int scan_points_used = 0;
};

/// Scan grid for the shooting parameter, sorted by increasing d. Hints add
/// local refinement windows (advisory: dropping them costs speed, not
/// correctness).
std::vector<ShotSpec> scan_grid(const ScanSpec& scan, const ShotSpec& base,
                                const std::vector<double>& hint_u0 = {});

/// Adjusts the scan to the nonlinearity's C1 regime: with C1 = +infinity the
/// deep d -> 0 tail is clamped (the angle winds like 1/d there, past every
/// reportable level).
ScanSpec effective_scan(ScanSpec scan, const Nonlinearity& nl);

/// Scans d over the refined grid, brackets every sign change of
/// g_j(d) = theta_d(R2) - (j+1) pi_p for j <= j_max, refines each bracket by
/// bisection and returns one certified record per root. Levels with no sign
/// change are reported as absent (not an error); levels with more than two
/// roots trigger one rescan at double resolution and are flagged.
FindResult find_solutions(const PContext& ctx, const Nonlinearity& nl,
                          const RadialDomain& dom, const FindOptions& opt,
                          const ShotSpec& base);

struct Classification {
  int zeros = 0;                // crossings of u = 1 in (R1, R2)
  std::vector<double> extrema;  // interior radii with v = 0
  bool monotone = false;
};

Classification classify(const PContext& ctx, const SolutionRecord& record);

/// Max-norm residual of the profile against the radial equation
/// v' + r^{N-1} f_hat(u) = 0, evaluated by differencing v across a fresh
/// n-point uniform grid (4th-order stencil).
double equation_residual(const PContext& ctx, const Nonlinearity& nl,
                         const RadialDomain& dom, const ShotSpec& spec,
                         int n = 512);

}  // namespace pshoot
