#include "pshoot/cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "pshoot/config.hpp"
#include "pshoot/eigenvalues.hpp"
#include "pshoot/errors.hpp"
#include "pshoot/output.hpp"
#include "pshoot/sweep.hpp"
#include "pshoot/version.hpp"

namespace pshoot {

namespace {

struct Overrides {
  std::string config;
  std::optional<double> p, q, R1, R2, tol_rel, tol_abs, r_start_eps;
  std::optional<int> N, scan, trig_nodes;
  std::optional<std::string> nonlinearity;
};

void add_problem_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "key = value configuration file");
  sub->add_option("--p", o.p, "exponent p (> 1)");
  sub->add_option("--q", o.q, "prototype exponent q (> p)");
  sub->add_option("--R1", o.R1, "inner radius (0 for a ball)");
  sub->add_option("--R2", o.R2, "outer radius");
  sub->add_option("--N", o.N, "space dimension");
  sub->add_option("--nonlinearity", o.nonlinearity, "prototype | plugin:<name>");
  sub->add_option("--tol-rel", o.tol_rel, "integrator relative tolerance");
  sub->add_option("--tol-abs", o.tol_abs, "integrator absolute tolerance");
  sub->add_option("--r-start-eps", o.r_start_eps, "ball singular-start offset");
  sub->add_option("--scan", o.scan, "d-scan resolution");
  sub->add_option("--trig-nodes", o.trig_nodes, "p-trig table nodes per quarter");
}

ProblemConfig build_config(const Overrides& o, int threads) {
  ProblemConfig cfg;
  if (!o.config.empty()) cfg = parse_config_file(o.config);
  if (o.p) cfg.p = *o.p;
  if (o.q) cfg.q = *o.q;
  if (o.R1) cfg.R1 = *o.R1;
  if (o.R2) cfg.R2 = *o.R2;
  if (o.N) cfg.N = *o.N;
  if (o.nonlinearity) cfg.nonlinearity = *o.nonlinearity;
  if (o.tol_rel) cfg.tol_rel = *o.tol_rel;
  if (o.tol_abs) cfg.tol_abs = *o.tol_abs;
  if (o.r_start_eps) cfg.r_start_eps = *o.r_start_eps;
  if (o.scan) cfg.scan_points = *o.scan;
  if (o.trig_nodes) cfg.trig_nodes = *o.trig_nodes;
  if (threads > 0) cfg.threads = threads;
  return cfg;
}

std::string path_csv(const PhasePath& path, const std::string& echo) {
  std::string body = csv_preamble(echo);
  body += "r,u,v,theta,rho2,H\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    body += fmt_g17(path.r[i]);
    body += ",";
    body += fmt_g17(path.u[i]);
    body += ",";
    body += fmt_g17(path.v[i]);
    body += ",";
    body += fmt_g17(path.theta[i]);
    body += ",";
    body += fmt_g17(path.rho2[i]);
    body += ",";
    body += fmt_g17(path.H[i]);
    body += "\n";
  }
  return body;
}

int run_ptrig(const ProblemConfig& cfg, bool has_theta, double theta,
              int table_n, const std::string& out) {
  const PContext ctx(cfg.p, cfg.trig_nodes);
  if (table_n > 0) {
    if (out.empty())
      throw ConfigError("ptrig: --table requires --out <csv>");
    std::string body = csv_preamble(cfg.echo());
    body += "theta,cos_p,sin_p,identity_residual\n";
    const double p = ctx.p(), pc = ctx.p_conj();
    for (int i = 0; i < table_n; ++i) {
      const double th = 2.0 * ctx.pi_p() * double(i) / double(table_n - 1);
      const CosSinP cs = ctx.cos_sin(th);
      const double resid = std::abs(std::pow(std::abs(cs.c), p) / p +
                                    std::pow(std::abs(cs.s), pc) / pc - 1.0 / p);
      body += fmt_g17(th);
      body += ",";
      body += fmt_g17(cs.c);
      body += ",";
      body += fmt_g17(cs.s);
      body += ",";
      body += fmt_g17(resid);
      body += "\n";
    }
    atomic_write(out, body);
  }
  if (has_theta) {
    const CosSinP cs = ctx.cos_sin(theta);
    std::printf("cos_p(%s) = %s\nsin_p(%s) = %s\n", fmt_g17(theta).c_str(),
                fmt_g17(cs.c).c_str(), fmt_g17(theta).c_str(),
                fmt_g17(cs.s).c_str());
  }
  if (!has_theta && table_n <= 0)
    std::printf("p = %s  p' = %s  pi_p = %s\n", fmt_g17(ctx.p()).c_str(),
                fmt_g17(ctx.p_conj()).c_str(), fmt_g17(ctx.pi_p()).c_str());
  return 0;
}

int run_shoot(const ProblemConfig& cfg, double d, std::optional<double> u0,
              const std::string& out) {
  const Problem pr = make_problem(cfg);
  ShotSpec spec = u0 ? ShotSpec::from_u0(*u0) : ShotSpec::from_d(d);
  spec.tol_rel = cfg.tol_rel;
  spec.tol_abs = cfg.tol_abs;
  spec.r_start_eps = cfg.r_start_eps;
  const PhasePath path = integrate_shot(pr.ctx, *pr.nl, pr.dom, spec);
  atomic_write(out, path_csv(path, cfg.echo() + " d=" + fmt_g17(spec.d) +
                                       " u0=" + fmt_g17(spec.u0)));
  std::printf("theta(R2) = %s  winding = %s\n",
              fmt_g17(path.theta_end()).c_str(),
              fmt_g17((path.theta_end() - pr.ctx.pi_p()) / pr.ctx.pi_p()).c_str());
  return 0;
}

int run_solve(const ProblemConfig& cfg, int jmax, const std::string& out_dir,
              bool require_solution) {
  const Problem pr = make_problem(cfg);
  FindOptions opt;
  opt.j_max = jmax;
  opt.scan = cfg.scan_spec();
  const FindResult res =
      find_solutions(pr.ctx, *pr.nl, pr.dom, opt, cfg.base_shot());

  const std::filesystem::path dir(out_dir);
  std::string table = csv_preamble(cfg.echo());
  table += "j,branch,d,u0,uR2,boundary_residual,min_u\n";
  std::map<std::pair<int, std::string>, int> name_count;
  for (const SolutionRecord& rec : res.records) {
    table += std::to_string(rec.j);
    table += ",";
    table += to_string(rec.branch);
    table += ",";
    table += fmt_g17(rec.d);
    table += ",";
    table += fmt_g17(rec.profile.u.front());
    table += ",";
    table += fmt_g17(rec.profile.u.back());
    table += ",";
    table += fmt_g17(rec.boundary_residual);
    table += ",";
    table += fmt_g17(rec.profile.min_u());
    table += "\n";

    std::string stem = "solution_j" + std::to_string(rec.j) + "_" +
                       to_string(rec.branch);
    const int k = name_count[{rec.j, to_string(rec.branch)}]++;
    if (k > 0) stem += "_" + std::to_string(k + 1);
    atomic_write(dir / (stem + ".csv"),
                 path_csv(rec.profile, cfg.echo() + " d=" + fmt_g17(rec.d) +
                                           " u0=" + fmt_g17(rec.u0) +
                                           " j=" + std::to_string(rec.j)));
  }
  atomic_write(dir / "solutions.csv", table);

  for (const LevelDiagnostics& lv : res.levels) {
    if (lv.roots == 0)
      std::fprintf(stderr, "solve: no solution at level j = %d\n", lv.j);
    if (lv.ambiguous)
      std::fprintf(stderr,
                   "solve: level j = %d carries %d roots (more than the "
                   "expected pair); all reported\n",
                   lv.j, lv.roots);
  }
  std::printf("solve: %zu solution(s) across levels 1..%d (scan %d points)\n",
              res.records.size(), jmax, res.scan_points_used);
  if (require_solution && res.records.empty()) return 4;
  return 0;
}

int run_eigen(const ProblemConfig& cfg, int k, int kmax, const std::string& out) {
  const Problem pr = make_problem(cfg, /*needs_nonlinearity=*/false);
  EigenOptions eopt;
  eopt.r_start_eps = cfg.r_start_eps;
  const int k_lo = kmax > 0 ? 1 : k;
  const int k_hi = kmax > 0 ? kmax : k;

  std::string body = csv_preamble(cfg.echo());
  body += "k,lambda,theta_end,residual\n";
  for (int kk = k_lo; kk <= k_hi; ++kk) {
    const EigenResult er = radial_eigenvalue(pr.ctx, pr.dom, kk, eopt);
    body += std::to_string(er.k);
    body += ",";
    body += fmt_g17(er.lambda);
    body += ",";
    body += fmt_g17(er.theta_end);
    body += ",";
    body += fmt_g17(std::abs(er.theta_end - kk * pr.ctx.pi_p()));
    body += "\n";
    std::printf("lambda_%d = %s\n", er.k, fmt_g17(er.lambda).c_str());
  }
  if (!out.empty()) atomic_write(out, body);
  return 0;
}

int run_sweep(const ProblemConfig& cfg, const std::string& param, double from,
              double to, double step, int jmax, const std::string& out_dir,
              bool svg) {
  if (!(step > 0)) throw ConfigError("sweep: --step must be positive");
  if (!(to >= from)) throw ConfigError("sweep: --to must be >= --from");
  const SweepParam sp = sweep_param_from_string(param);
  std::vector<double> values;
  for (double v = from; v <= to + 1e-12 * step; v += step) values.push_back(v);

  SweepOptions opt;
  opt.j_max = jmax;
  const SweepResult res = sweep_branches(cfg, sp, values, opt);

  const std::filesystem::path dir(out_dir);
  emit_branches_csv(res.points, cfg.echo(), dir / "branches.csv");
  if (svg && !res.points.empty())
    emit_diagram_svg(res.points, dir / "diagram.svg");

  for (const std::string& w : res.warnings)
    std::fprintf(stderr, "%s\n", w.c_str());
  for (const auto& [j, v] : res.onset)
    std::printf("sweep: level j = %d onset at %s = %s\n", j, param.c_str(),
                fmt_g17(v).c_str());
  std::printf("sweep: %zu branch point(s) over %zu parameter values\n",
              res.points.size(), values.size());
  return 0;
}

}  // namespace

int cli_run(const std::vector<std::string>& args) {
  CLI::App app{"radial p-Laplacian Neumann shooting toolkit"};
  app.set_version_flag("--version", std::string("pshoot ") + kVersion);
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads for scans and sweeps");

  Overrides o_ptrig, o_shoot, o_solve, o_eigen, o_sweep;

  CLI::App* sp = app.add_subcommand("ptrig", "evaluate cos_p/sin_p and pi_p");
  add_problem_flags(sp, o_ptrig);
  double theta = 0.0;
  int table_n = 0;
  std::string ptrig_out;
  CLI::Option* theta_opt = sp->add_option("--theta", theta, "evaluation angle");
  sp->add_option("--table", table_n, "emit an n-row table over [0, 2 pi_p]");
  sp->add_option("--out", ptrig_out, "table CSV path");

  CLI::App* sh = app.add_subcommand("shoot", "integrate one shot");
  add_problem_flags(sh, o_shoot);
  double shoot_d = 0.5;
  std::optional<double> shoot_u0;
  std::string shoot_out = "shot.csv";
  sh->add_option("--d", shoot_d, "shooting parameter, u(R1) = 1 - d");
  sh->add_option("--u0", shoot_u0, "start value u(R1) directly (fold shots)");
  sh->add_option("--out", shoot_out, "profile CSV path");

  CLI::App* so = app.add_subcommand("solve", "find all solutions up to --jmax");
  add_problem_flags(so, o_solve);
  int jmax = 1;
  std::string solve_out = ".";
  bool require_solution = false;
  so->add_option("--jmax", jmax, "highest oscillation level");
  so->add_option("--out", solve_out, "output directory");
  so->add_flag("--require-solution", require_solution,
               "exit 4 when nothing is found");

  CLI::App* ei = app.add_subcommand("eigen", "radial Neumann eigenvalues");
  add_problem_flags(ei, o_eigen);
  int eig_k = 1, eig_kmax = 0;
  std::string eigen_out;
  ei->add_option("--k", eig_k, "eigenvalue index");
  ei->add_option("--kmax", eig_kmax, "compute k = 1..kmax");
  ei->add_option("--out", eigen_out, "CSV path");

  CLI::App* sw = app.add_subcommand("sweep", "continuation in q, p or R2");
  add_problem_flags(sw, o_sweep);
  std::string sweep_param = "q", sweep_out = ".";
  double sweep_from = 0.0, sweep_to = 0.0, sweep_step = 1.0;
  int sweep_jmax = 1;
  bool sweep_svg = false;
  sw->add_option("--param", sweep_param, "q | p | R2");
  sw->add_option("--from", sweep_from, "first parameter value")->required();
  sw->add_option("--to", sweep_to, "last parameter value")->required();
  sw->add_option("--step", sweep_step, "parameter increment");
  sw->add_option("--jmax", sweep_jmax, "highest oscillation level");
  sw->add_option("--out", sweep_out, "output directory");
  sw->add_flag("--svg", sweep_svg, "also emit diagram.svg");

  std::vector<const char*> argv;
  argv.push_back("pshoot");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(int(argv.size()), argv.data());

    if (*sp)
      return run_ptrig(build_config(o_ptrig, threads), theta_opt->count() > 0,
                       theta, table_n, ptrig_out);
    if (*sh) return run_shoot(build_config(o_shoot, threads), shoot_d,
                              shoot_u0, shoot_out);
    if (*so) return run_solve(build_config(o_solve, threads), jmax, solve_out,
                              require_solution);
    if (*ei) return run_eigen(build_config(o_eigen, threads), eig_k, eig_kmax,
                              eigen_out);
    if (*sw)
      return run_sweep(build_config(o_sweep, threads), sweep_param, sweep_from,
                       sweep_to, sweep_step, sweep_jmax, sweep_out, sweep_svg);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace pshoot
