#include "pshoot/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pshoot/detail/parallel.hpp"
#include "pshoot/errors.hpp"
#include "pshoot/output.hpp"

namespace pshoot {

std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::Q: return "q";
    case SweepParam::P: return "p";
    case SweepParam::R2: return "R2";
  }
  return "q";
}

SweepParam sweep_param_from_string(const std::string& s) {
  if (s == "q") return SweepParam::Q;
  if (s == "p") return SweepParam::P;
  if (s == "R2") return SweepParam::R2;
  throw ConfigError("sweep: parameter must be one of q, p, R2; got '" + s + "'");
}

namespace {

ProblemConfig with_value(ProblemConfig cfg, SweepParam param, double v) {
  switch (param) {
    case SweepParam::Q: cfg.q = v; break;
    case SweepParam::P: cfg.p = v; break;
    case SweepParam::R2: cfg.R2 = v; break;
  }
  return cfg;
}

// does the scan see a root of theta_d(R2) = (j+1) pi_p at this config?
bool has_root_at(const ProblemConfig& cfg, int j, const SweepOptions& opt) {
  const Problem pr = make_problem(cfg);
  const std::vector<ShotSpec> nodes =
      scan_grid(effective_scan(cfg.scan_spec(), *pr.nl), cfg.base_shot());
  std::vector<double> theta(nodes.size());
  detail::parallel_for(int(nodes.size()), cfg.threads, [&](int i) {
    theta[i] = integrate_shot(pr.ctx, *pr.nl, pr.dom, nodes[i]).theta_end();
  });
  const double level = (j + 1) * pr.ctx.pi_p();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (std::abs(theta[i] - level) <= opt.tie_tol) return true;
    if (i + 1 < nodes.size() &&
        (theta[i] - level < 0) != (theta[i + 1] - level < 0))
      return true;
  }
  return false;
}

}  // namespace

SweepResult sweep_branches(const ProblemConfig& base, SweepParam param,
                           const std::vector<double>& values,
                           const SweepOptions& opt) {
  if (values.empty())
    throw std::invalid_argument("sweep: need at least one parameter value");
  SweepResult result;

  std::vector<double> warm;  // u0 of the previous value's roots
  std::vector<char> found_at(values.size(), 0);
  std::vector<std::vector<int>> levels_at(values.size());

  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    const double v = values[vi];
    const ProblemConfig cfg = with_value(base, param, v);
    try {
      const Problem pr = make_problem(cfg);
      FindOptions fopt;
      fopt.j_max = opt.j_max;
      fopt.scan = cfg.scan_spec();
      fopt.d_tol = opt.d_tol;
      fopt.tie_tol = opt.tie_tol;
      fopt.hint_u0 = warm;
      const FindResult fr = find_solutions(pr.ctx, *pr.nl, pr.dom, fopt,
                                           cfg.base_shot());
      warm.clear();
      for (const SolutionRecord& rec : fr.records) {
        warm.push_back(rec.u0);
        BranchPoint bp;
        bp.param = param;
        bp.param_value = v;
        bp.j = rec.j;
        bp.label = rec.branch;
        bp.d = rec.d;
        bp.u0 = rec.u0;
        bp.u_start = rec.profile.u.front();
        bp.u_end = rec.profile.u.back();
        bp.residual = rec.boundary_residual;
        result.points.push_back(bp);
        levels_at[vi].push_back(rec.j);
      }
      found_at[vi] = 1;
    } catch (const std::exception& e) {
      result.warnings.push_back("sweep: skipped " + to_string(param) + " = " +
                                fmt_g17(v) + ": " + e.what());
    }
  }

  // onset: first (in increasing parameter order) value where level j holds a
  // root, refined by bisection in the parameter to (local step)/16
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  for (int j = 1; j <= opt.j_max; ++j) {
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
      const std::size_t vi = order[oi];
      if (!found_at[vi]) continue;
      const bool here = std::find(levels_at[vi].begin(), levels_at[vi].end(),
                                  j) != levels_at[vi].end();
      if (!here) continue;
      double onset = values[vi];
      if (oi > 0 && opt.refine_onset) {
        const std::size_t pi_ = order[oi - 1];
        const bool prev = std::find(levels_at[pi_].begin(),
                                    levels_at[pi_].end(),
                                    j) != levels_at[pi_].end();
        if (found_at[pi_] && !prev) {
          double lo = values[pi_], hi = values[vi];
          const double width = (hi - lo) / 16.0;
          while (hi - lo > width) {
            const double mid = 0.5 * (lo + hi);
            bool ok = false;
            try {
              ok = has_root_at(with_value(base, param, mid), j, opt);
            } catch (const std::exception& e) {
              result.warnings.push_back("sweep: onset probe failed at " +
                                        fmt_g17(mid) + ": " + e.what());
              break;
            }
            (ok ? hi : lo) = mid;
          }
          onset = hi;
        }
      }
      result.onset[j] = onset;
      break;
    }
  }

  // branch continuity: consecutive points of one (j, label) series should
  // move in d by no more than ~10 local scan spacings
  std::sort(result.points.begin(), result.points.end(),
            [](const BranchPoint& a, const BranchPoint& b) {
              if (a.j != b.j) return a.j < b.j;
              if (a.label != b.label) return int(a.label) < int(b.label);
              return a.param_value < b.param_value;
            });
  const int n_side = std::max(base.scan_points / 4, 16);
  for (std::size_t i = 1; i < result.points.size(); ++i) {
    const BranchPoint& a = result.points[i - 1];
    const BranchPoint& b = result.points[i];
    if (a.j != b.j || a.label != b.label) continue;
    double spacing;
    const double u0m = std::max(std::min(a.u0, b.u0), 1e-300);
    if (u0m < 0.1)
      spacing = u0m * std::log(0.1 / base.scan_u0_min) / n_side;
    else if (std::min(a.d, b.d) < 0.1)
      spacing = std::max(std::min(a.d, b.d), base.scan_d_min) *
                std::log(0.1 / base.scan_d_min) / n_side;
    else
      spacing = 0.8 / std::max(base.scan_points / 2, 32);
    if (std::abs(b.u0 - a.u0) > 10.0 * spacing)
      result.warnings.push_back(
          "sweep: branch break at j=" + std::to_string(b.j) + " label=" +
          to_string(b.label) + " between " + to_string(param) + "=" +
          fmt_g17(a.param_value) + " and " + fmt_g17(b.param_value));
  }

  return result;
}

void emit_branches_csv(const std::vector<BranchPoint>& points,
                       const std::string& config_echo,
                       const std::filesystem::path& path) {
  std::string body = csv_preamble(config_echo);
  if (!points.empty())
    body += "# param: " + to_string(points.front().param) + "\n";
  body += "param,j,label,d,u0,uR2,residual\n";
  for (const BranchPoint& bp : points) {
    body += fmt_g17(bp.param_value);
    body += ",";
    body += std::to_string(bp.j);
    body += ",";
    body += to_string(bp.label);
    body += ",";
    body += fmt_g17(bp.d);
    body += ",";
    body += fmt_g17(bp.u_start);
    body += ",";
    body += fmt_g17(bp.u_end);
    body += ",";
    body += fmt_g17(bp.residual);
    body += "\n";
  }
  atomic_write(path, body);
}

std::vector<BranchPoint> parse_branches_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("parse_branches_csv: cannot open '" +
                             path.string() + "'");
  std::vector<BranchPoint> points;
  SweepParam param = SweepParam::Q;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.rfind("# param: ", 0) == 0) {
      param = sweep_param_from_string(line.substr(9));
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {  // column header
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    std::string field;
    BranchPoint bp;
    bp.param = param;
    std::getline(ss, field, ',');
    bp.param_value = std::stod(field);
    std::getline(ss, field, ',');
    bp.j = std::stoi(field);
    std::getline(ss, field, ',');
    bp.label = field == "minus"  ? BranchLabel::Minus
               : field == "plus" ? BranchLabel::Plus
                                 : BranchLabel::Unique;
    std::getline(ss, field, ',');
    bp.d = std::stod(field);
    std::getline(ss, field, ',');
    bp.u_start = std::stod(field);
    bp.u0 = bp.u_start;  // the shot starts exactly at u(R1) = 1 - d
    std::getline(ss, field, ',');
    bp.u_end = std::stod(field);
    std::getline(ss, field, ',');
    bp.residual = std::stod(field);
    points.push_back(bp);
  }
  return points;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#e377c2"};

}  // namespace

void emit_diagram_svg(const std::vector<BranchPoint>& points,
                      const std::filesystem::path& path) {
  if (points.empty())
    throw EmptySelection("emit_diagram: no branch points selected");

  const double W = 800, H = 560, ml = 70, mr = 20, mt = 20, mb = 50;
  double x_lo = points.front().param_value, x_hi = x_lo;
  double y_lo = 1.0, y_hi = 1.0;
  for (const BranchPoint& bp : points) {
    x_lo = std::min(x_lo, bp.param_value);
    x_hi = std::max(x_hi, bp.param_value);
    y_lo = std::min(y_lo, bp.u_start);
    y_hi = std::max(y_hi, bp.u_start);
  }
  if (x_hi == x_lo) { x_lo -= 0.5; x_hi += 0.5; }
  const double ypad = 0.08 * (y_hi - y_lo + 0.1);
  y_lo -= ypad;
  y_hi += ypad;

  auto X = [&](double v) { return ml + (v - x_lo) / (x_hi - x_lo) * (W - ml - mr); };
  auto Y = [&](double u) { return H - mb - (u - y_lo) / (y_hi - y_lo) * (H - mt - mb); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes with 6 ticks
  svg << "<g stroke=\"#444\" stroke-width=\"1\" font-size=\"12\" "
         "font-family=\"sans-serif\">\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
      << "\" y2=\"" << H - mb << "\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << H - mb << "\"/>\n";
  char buf[64];
  for (int t = 0; t <= 5; ++t) {
    const double xv = x_lo + (x_hi - x_lo) * t / 5.0;
    const double yv = y_lo + (y_hi - y_lo) * t / 5.0;
    std::snprintf(buf, sizeof buf, "%.4g", xv);
    svg << "<line x1=\"" << X(xv) << "\" y1=\"" << H - mb << "\" x2=\"" << X(xv)
        << "\" y2=\"" << H - mb + 5 << "\"/>"
        << "<text x=\"" << X(xv) << "\" y=\"" << H - mb + 18
        << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#333\">" << buf
        << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", yv);
    svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << Y(yv) << "\" x2=\"" << ml
        << "\" y2=\"" << Y(yv) << "\"/>"
        << "<text x=\"" << ml - 8 << "\" y=\"" << Y(yv) + 4
        << "\" text-anchor=\"end\" stroke=\"none\" fill=\"#333\">" << buf
        << "</text>\n";
  }
  svg << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#333\">"
      << to_string(points.front().param) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
      << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#333\" "
         "transform=\"rotate(-90 16 " << (mt + H - mb) / 2 << ")\">u(R1)</text>\n";
  svg << "</g>\n";

  // constant solution u = 1 as reference
  if (y_lo < 1.0 && 1.0 < y_hi)
    svg << "<line x1=\"" << ml << "\" y1=\"" << Y(1.0) << "\" x2=\"" << W - mr
        << "\" y2=\"" << Y(1.0)
        << "\" stroke=\"#999\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n";

  // one polyline per (j, label)
  std::vector<std::pair<int, BranchLabel>> keys;
  for (const BranchPoint& bp : points) {
    const auto key = std::make_pair(bp.j, bp.label);
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end());
  int ci = 0;
  double legend_y = mt + 14;
  for (const auto& key : keys) {
    std::vector<const BranchPoint*> series;
    for (const BranchPoint& bp : points)
      if (bp.j == key.first && bp.label == key.second) series.push_back(&bp);
    std::sort(series.begin(), series.end(),
              [](const BranchPoint* a, const BranchPoint* b) {
                return a->param_value < b->param_value;
              });
    const char* color = kPalette[ci % 8];
    const bool dashed = key.second == BranchLabel::Plus;
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.8\"";
    if (dashed) svg << " stroke-dasharray=\"5 3\"";
    svg << " points=\"";
    for (const BranchPoint* bp : series)
      svg << X(bp->param_value) << "," << Y(bp->u_start) << " ";
    svg << "\"/>\n";
    for (const BranchPoint* bp : series)
      svg << "<circle cx=\"" << X(bp->param_value) << "\" cy=\""
          << Y(bp->u_start) << "\" r=\"2.2\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << W - mr - 120 << "\" y=\"" << legend_y
        << "\" font-size=\"12\" font-family=\"sans-serif\" fill=\"" << color
        << "\">j=" << key.first << " " << to_string(key.second) << "</text>\n";
    legend_y += 16;
    ++ci;
  }
  svg << "</svg>\n";
  atomic_write(path, svg.str());
}

}  // namespace pshoot
