#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pshoot/config.hpp"
#include "pshoot/phase.hpp"

namespace pshoot {

enum class SweepParam { Q, P, R2 };
std::string to_string(SweepParam p);
SweepParam sweep_param_from_string(const std::string& s);

/// One solution on a continuation branch: the swept parameter value, the
/// oscillation level j, the fold label, the shooting parameter and the
/// profile endpoints.
struct BranchPoint {
  SweepParam param = SweepParam::Q;
  double param_value = 0.0;
  int j = 0;
  BranchLabel label = BranchLabel::Unique;
  double d = 0.0;
  double u0 = 1.0;      // = 1 - d
  double u_start = 0.0; // u(R1)
  double u_end = 0.0;   // u(R2)
  double residual = 0.0;
};

struct SweepOptions {
  int j_max = 1;
  double d_tol = 1e-12;
  double tie_tol = 1e-10;
  bool refine_onset = true;  // bisect the first-appearance parameter value
};

struct SweepResult {
  std::vector<BranchPoint> points;
  std::map<int, double> onset;        // level j -> parameter value at onset
  std::vector<std::string> warnings;  // skipped points, branch breaks
};

/// Re-solves find_solutions along the ordered parameter values, warm-starting
/// each scan with windows around the previous roots. Per-point solver
/// failures are recorded in warnings and skipped, never abort the sweep.
SweepResult sweep_branches(const ProblemConfig& base, SweepParam param,
                           const std::vector<double>& values,
                           const SweepOptions& opt);

/// branches.csv emission/parsing; columns param, j, label, d, u0, uR2,
/// residual (u0 here is u(R1), the bifurcation-diagram ordinate).
void emit_branches_csv(const std::vector<BranchPoint>& points,
                       const std::string& config_echo,
                       const std::filesystem::path& path);
std::vector<BranchPoint> parse_branches_csv(const std::filesystem::path& path);

/// SVG scatter/polyline of u(R1) against the parameter, one polyline per
/// (j, label), with the constant solution u = 1 as a reference line.
/// Throws EmptySelection on an empty point set.
void emit_diagram_svg(const std::vector<BranchPoint>& points,
                      const std::filesystem::path& path);

}  // namespace pshoot
