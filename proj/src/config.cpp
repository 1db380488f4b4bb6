#include "pshoot/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pshoot/errors.hpp"

namespace pshoot {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_real(const std::string& key, const std::string& value, int line) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' (line " + std::to_string(line) +
                      "): cannot parse real value '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value, int line) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' (line " + std::to_string(line) +
                      "): cannot parse integer value '" + value + "'");
  }
}

}  // namespace

void apply_config_entry(ProblemConfig& cfg, const std::string& key,
                        const std::string& value, int line_no) {
  if (key == "p") cfg.p = parse_real(key, value, line_no);
  else if (key == "q") cfg.q = parse_real(key, value, line_no);
  else if (key == "R1") cfg.R1 = parse_real(key, value, line_no);
  else if (key == "R2") cfg.R2 = parse_real(key, value, line_no);
  else if (key == "N") cfg.N = parse_int(key, value, line_no);
  else if (key == "nonlinearity") cfg.nonlinearity = value;
  else if (key == "tol_rel") cfg.tol_rel = parse_real(key, value, line_no);
  else if (key == "tol_abs") cfg.tol_abs = parse_real(key, value, line_no);
  else if (key == "r_start_eps") cfg.r_start_eps = parse_real(key, value, line_no);
  else if (key == "scan_points") cfg.scan_points = parse_int(key, value, line_no);
  else if (key == "scan_d_min") cfg.scan_d_min = parse_real(key, value, line_no);
  else if (key == "scan_u0_min") cfg.scan_u0_min = parse_real(key, value, line_no);
  else if (key == "trig_nodes") cfg.trig_nodes = parse_int(key, value, line_no);
  else if (key == "threads") cfg.threads = parse_int(key, value, line_no);
  else if (key == "out_dir") cfg.out_dir = value;
  else
    throw ConfigError("config: unknown key '" + key + "' (line " +
                      std::to_string(line_no) + ")");
}

ProblemConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("config: cannot open '" + path + "'");
  ProblemConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) +
                        " is not of the form key = value: '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: empty key on line " + std::to_string(line_no));
    apply_config_entry(cfg, key, value, line_no);
  }
  return cfg;
}

void ProblemConfig::validate(bool needs_nonlinearity) const {
  if (!(p > 1.0) || !std::isfinite(p))
    throw ConfigError("config: key 'p' must satisfy p > 1");
  if (!(R1 >= 0.0)) throw ConfigError("config: key 'R1' must be >= 0");
  if (!(R2 > R1)) throw ConfigError("config: key 'R2' must exceed R1");
  if (N < 1) throw ConfigError("config: key 'N' must be a positive integer");
  if (!(tol_rel > 0) || !(tol_abs > 0))
    throw ConfigError("config: keys 'tol_rel'/'tol_abs' must be positive");
  if (!(r_start_eps > 0) || r_start_eps > 0.1)
    throw ConfigError("config: key 'r_start_eps' must lie in (0, 0.1]");
  if (scan_points < 64)
    throw ConfigError("config: key 'scan_points' must be at least 64");
  if (!(scan_d_min > 0) || !(scan_d_min < 0.1))
    throw ConfigError("config: key 'scan_d_min' must lie in (0, 0.1)");
  if (!(scan_u0_min > 0) || !(scan_u0_min < 0.1))
    throw ConfigError("config: key 'scan_u0_min' must lie in (0, 0.1)");
  if (trig_nodes < 64)
    throw ConfigError("config: key 'trig_nodes' must be at least 64");
  if (threads < 1) throw ConfigError("config: key 'threads' must be >= 1");
  if (needs_nonlinearity) {
    if (nonlinearity == "prototype") {
      if (!(q > p))
        throw ConfigError("config: key 'q' must exceed p for the prototype");
    } else if (nonlinearity.rfind("plugin:", 0) != 0) {
      throw ConfigError("config: key 'nonlinearity' must be 'prototype' or "
                        "'plugin:<name>', got '" + nonlinearity + "'");
    }
  }
}

ShotSpec ProblemConfig::base_shot() const {
  ShotSpec s;
  s.tol_rel = tol_rel;
  s.tol_abs = tol_abs;
  s.r_start_eps = r_start_eps;
  return s;
}

ScanSpec ProblemConfig::scan_spec() const {
  ScanSpec s;
  s.points = scan_points;
  s.d_min = scan_d_min;
  s.u0_min = scan_u0_min;
  s.threads = threads;
  return s;
}

std::string ProblemConfig::echo() const {
  std::ostringstream os;
  os.precision(17);
  os << "p=" << p;
  if (nonlinearity == "prototype" && q > 0) os << " q=" << q;
  os << " nonlinearity=" << nonlinearity << " R1=" << R1 << " R2=" << R2
     << " N=" << N << " tol_rel=" << tol_rel << " tol_abs=" << tol_abs
     << " r_start_eps=" << r_start_eps << " scan_points=" << scan_points
     << " scan_d_min=" << scan_d_min << " scan_u0_min=" << scan_u0_min
     << " trig_nodes=" << trig_nodes << " threads=" << threads;
  return os.str();
}

Problem make_problem(const ProblemConfig& cfg, bool needs_nonlinearity) {
  cfg.validate(needs_nonlinearity);
  PContext ctx(cfg.p, cfg.trig_nodes);
  std::shared_ptr<const Nonlinearity> nl;
  if (needs_nonlinearity) {
    if (cfg.nonlinearity == "prototype") {
      nl = std::make_shared<PrototypeNonlinearity>(cfg.p, cfg.q);
    } else {
      const std::string name = cfg.nonlinearity.substr(7);
      nl = make_plugin_nonlinearity(name, cfg.p);
    }
  }
  return Problem{std::move(ctx), std::move(nl), RadialDomain(cfg.R1, cfg.R2, cfg.N)};
}

}  // namespace pshoot
