#pragma once

#include <memory>
#include <string>

#include "pshoot/integrator.hpp"
#include "pshoot/model.hpp"
#include "pshoot/phase.hpp"
#include "pshoot/ptrig.hpp"

namespace pshoot {

/// Problem + solver configuration, read from `key = value` files with CLI
/// flag overrides (flags win). Validation happens before any run; invalid
/// entries are rejected with a ConfigError naming the key (and line).
struct ProblemConfig {
  double p = 2.0;
  double q = 0.0;  // prototype exponent; required when nonlinearity=prototype
  std::string nonlinearity = "prototype";  // prototype | plugin:<name>
  double R1 = 0.0;
  double R2 = 1.0;
  int N = 1;

  double tol_rel = 1e-10;
  double tol_abs = 1e-12;
  double r_start_eps = 1e-6;
  int scan_points = 256;
  double scan_d_min = 1e-30;
  double scan_u0_min = 1e-45;
  int trig_nodes = 4096;
  int threads = 1;

  std::string out_dir;

  /// needs_nonlinearity: eigen runs only use (p, R1, R2, N).
  void validate(bool needs_nonlinearity) const;

  ShotSpec base_shot() const;
  ScanSpec scan_spec() const;

  /// Canonical one-line echo of every effective setting.
  std::string echo() const;
};

ProblemConfig parse_config_file(const std::string& path);

/// Applies one key/value pair (line_no used in diagnostics; 0 for CLI flags).
void apply_config_entry(ProblemConfig& cfg, const std::string& key,
                        const std::string& value, int line_no);

/// Materialized problem: trig context, nonlinearity, domain.
struct Problem {
  PContext ctx;
  std::shared_ptr<const Nonlinearity> nl;  // null for eigen-only runs
  RadialDomain dom;
};

Problem make_problem(const ProblemConfig& cfg, bool needs_nonlinearity = true);

}  // namespace pshoot
