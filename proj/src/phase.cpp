#include "pshoot/phase.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pshoot/detail/parallel.hpp"
#include "pshoot/errors.hpp"

namespace pshoot {

std::string to_string(BranchLabel label) {
  switch (label) {
    case BranchLabel::Unique: return "unique";
    case BranchLabel::Minus: return "minus";
    case BranchLabel::Plus: return "plus";
  }
  return "unique";
}

ShootOutcome shooting_map(const PContext& ctx, const Nonlinearity& nl,
                          const RadialDomain& dom, const ShotSpec& spec) {
  const PhasePath path = integrate_shot(ctx, nl, dom, spec);
  ShootOutcome out;
  out.d = spec.d;
  out.u0 = spec.u0;
  out.theta_end = path.theta_end();
  out.winding = (out.theta_end - ctx.pi_p()) / ctx.pi_p();
  out.digest = {path.min_u(), path.max_u(), path.sup_rho()};
  return out;
}

std::vector<ShotSpec> scan_grid(const ScanSpec& scan, const ShotSpec& base,
                                const std::vector<double>& hint_u0) {
  if (scan.points < 64)
    throw std::invalid_argument("scan: resolution must be at least 64 points");
  if (!(scan.d_min > 0) || !(scan.d_min < 0.1) || !(scan.u0_min > 0) ||
      !(scan.u0_min < 0.1))
    throw std::invalid_argument("scan: endpoint margins must lie in (0, 0.1)");

  const int n_low = scan.points / 4;
  const int n_high = scan.points / 4;
  const int n_mid = scan.points - n_low - n_high;
  const double d_lo = std::max(scan.d_min, 1e-290);

  std::vector<ShotSpec> nodes;
  nodes.reserve(scan.points + 12 * hint_u0.size());
  auto push_d = [&](double d) {
    ShotSpec s = base;
    s.d = d;
    s.u0 = 1.0 - d;
    nodes.push_back(s);
  };
  auto push_u0 = [&](double u0) {
    ShotSpec s = base;
    s.u0 = u0;
    s.d = 1.0 - u0;
    nodes.push_back(s);
  };

  // log-refined toward d = 0
  for (int i = 0; i < n_low; ++i)
    push_d(d_lo * std::pow(0.1 / d_lo, double(i) / double(n_low - 1)));
  // uniform middle
  for (int i = 1; i <= n_mid; ++i)
    push_d(0.1 + 0.8 * double(i) / double(n_mid + 1));
  // log-refined toward d = 1, parametrized by u0 = 1 - d
  for (int i = 0; i < n_high; ++i)
    push_u0(0.1 *
            std::pow(scan.u0_min / 0.1, double(i) / double(n_high - 1)));

  for (double h : hint_u0) {
    if (!(h > 0) || !(h < 1)) continue;
    const double d_h = 1.0 - h;
    if (h < 0.25) {
      const double lo = std::max(h / 4.0, scan.u0_min);
      const double hi = std::min(4.0 * h, 0.5);
      for (int i = 0; i < 12; ++i)
        push_u0(lo * std::pow(hi / lo, double(i) / 11.0));
    } else if (d_h < 0.25) {
      const double lo = std::max(d_h / 4.0, scan.d_min);
      const double hi = std::min(4.0 * d_h, 0.5);
      for (int i = 0; i < 12; ++i)
        push_d(lo * std::pow(hi / lo, double(i) / 11.0));
    } else {
      for (int i = 0; i < 12; ++i) push_d(d_h - 0.05 + 0.1 * double(i) / 11.0);
    }
  }

  // increasing d; either coordinate may saturate in double precision at its
  // own far end, so order and deduplicate by the pair
  std::sort(nodes.begin(), nodes.end(), [](const ShotSpec& a, const ShotSpec& b) {
    if (a.d != b.d) return a.d < b.d;
    return a.u0 > b.u0;
  });
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](const ShotSpec& a, const ShotSpec& b) {
                            return a.d == b.d && a.u0 == b.u0;
                          }),
              nodes.end());
  return nodes;
}

namespace {

struct Bracket {
  ShotSpec lo, hi;      // g(lo) and g(hi) have opposite signs
  double g_lo, g_hi;
};

ShotSpec midpoint(const ShotSpec& a, const ShotSpec& b) {
  if (a.u0 < 0.25 && b.u0 < 0.25)
    return ShotSpec::from_u0(std::sqrt(a.u0 * b.u0)).with_tols(a.tol_rel, a.tol_abs);
  if (a.d < 0.25 && b.d < 0.25)
    return ShotSpec::from_d(std::sqrt(a.d * b.d)).with_tols(a.tol_rel, a.tol_abs);
  return ShotSpec::from_d(0.5 * (a.d + b.d)).with_tols(a.tol_rel, a.tol_abs);
}

bool bisection_converged(const ShotSpec& lo, const ShotSpec& hi, double d_tol) {
  // absolute closeness in both coordinates plus relative closeness in each:
  // roots near either endpoint live where only log spacing is meaningful
  const double dd = std::abs(hi.d - lo.d);
  const double du0 = std::abs(hi.u0 - lo.u0);
  return dd <= d_tol && du0 <= d_tol &&
         dd <= 1e-9 * std::max({lo.d, hi.d, 1e-300}) &&
         du0 <= 1e-9 * std::max({lo.u0, hi.u0, 1e-300});
}

ShotSpec preserve_eps(ShotSpec s, const ShotSpec& base) {
  s.tol_rel = base.tol_rel;
  s.tol_abs = base.tol_abs;
  s.r_start_eps = base.r_start_eps;
  return s;
}

}  // namespace

// In the C1 = +infinity regime the angle grows without bound as d -> 0
// (infinitely many solutions; only levels up to j_max are ever reported) and
// the winding rate scales like 1/d, so the deep tail of the scan is clamped:
// it could only add windings past every requested level, at hostile cost.
ScanSpec effective_scan(ScanSpec scan, const Nonlinearity& nl) {
  try {
    if (nl.classify_C1().kind == C1Class::Kind::Infinite)
      scan.d_min = std::max(scan.d_min, 1e-6);
  } catch (const ClassificationError&) {
    // indeterminate regime: leave the scan as configured
  }
  return scan;
}

FindResult find_solutions(const PContext& ctx, const Nonlinearity& nl,
                          const RadialDomain& dom, const FindOptions& opt,
                          const ShotSpec& base) {
  if (opt.j_max < 1)
    throw std::invalid_argument("find_solutions: j_max must be >= 1");

  const double pi_p = ctx.pi_p();

  ScanSpec scan = effective_scan(opt.scan, nl);
  FindResult result;

  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<ShotSpec> nodes = scan_grid(scan, base, opt.hint_u0);
    std::vector<double> theta_end(nodes.size());
    detail::parallel_for(
        int(nodes.size()), scan.threads, [&](int i) {
          theta_end[i] = integrate_shot(ctx, nl, dom, nodes[i]).theta_end();
        });
    result.scan_points_used = int(nodes.size());
    result.records.clear();
    result.levels.clear();

    bool need_rescan = false;
    for (int j = 1; j <= opt.j_max; ++j) {
      const double level = (j + 1) * pi_p;
      std::vector<ShotSpec> roots;

      // ties first: nodes sitting on the level are accepted as roots and
      // suppress the adjacent sign-change brackets
      std::vector<bool> tie(nodes.size(), false);
      for (std::size_t i = 0; i < nodes.size(); ++i)
        tie[i] = std::abs(theta_end[i] - level) <= opt.tie_tol;
      for (std::size_t i = 0; i < nodes.size(); ++i)
        if (tie[i] && (i == 0 || !tie[i - 1])) roots.push_back(nodes[i]);

      for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (tie[i] || tie[i + 1]) continue;
        const double ga = theta_end[i] - level, gb = theta_end[i + 1] - level;
        if ((ga < 0) == (gb < 0)) continue;
        Bracket br{nodes[i], nodes[i + 1], ga, gb};
        int it = 0;
        while (!bisection_converged(br.lo, br.hi, opt.d_tol) && it++ < 300) {
          ShotSpec mid = preserve_eps(midpoint(br.lo, br.hi), base);
          const double gm =
              integrate_shot(ctx, nl, dom, mid).theta_end() - level;
          if ((gm < 0) == (br.g_lo < 0)) {
            br.lo = mid;
            br.g_lo = gm;
          } else {
            br.hi = mid;
            br.g_hi = gm;
          }
        }
        roots.push_back(std::abs(br.g_lo) <= std::abs(br.g_hi) ? br.lo : br.hi);
      }

      std::sort(roots.begin(), roots.end(),
                [](const ShotSpec& a, const ShotSpec& b) {
                  if (a.d != b.d) return a.d < b.d;
                  return a.u0 > b.u0;
                });

      LevelDiagnostics diag{j, int(roots.size()), roots.size() > 2};
      result.levels.push_back(diag);
      if (diag.ambiguous && attempt == 0) need_rescan = true;

      for (std::size_t idx = 0; idx < roots.size(); ++idx) {
        SolutionRecord rec;
        rec.d = roots[idx].d;
        rec.u0 = roots[idx].u0;
        rec.j = j;
        rec.profile = integrate_shot(ctx, nl, dom, roots[idx]);
        rec.theta_end = rec.profile.theta_end();
        rec.boundary_residual = rec.profile.boundary_residual();
        rec.positive = rec.profile.min_u() > 0.0;
        rec.ambiguous_level = diag.ambiguous;
        if (roots.size() == 1)
          rec.branch = BranchLabel::Unique;
        else
          rec.branch = idx % 2 == 0 ? BranchLabel::Minus : BranchLabel::Plus;
        // the j radii where theta passes (m + 1/2) pi_p, m = 1..j
        for (int m = 1; m <= j; ++m) {
          const double target = (m + 0.5) * pi_p;
          const auto& th = rec.profile.theta;
          const auto& rs = rec.profile.r;
          auto it2 = std::lower_bound(th.begin(), th.end(), target);
          if (it2 == th.begin() || it2 == th.end()) continue;
          std::size_t i2 = std::size_t(it2 - th.begin());
          double lo = rs[i2 - 1], hi = rs[i2];
          for (int b = 0; b < 80 && hi - lo > 1e-13 * dom.R2; ++b) {
            const double mid = 0.5 * (lo + hi);
            if (rec.profile.eval(mid).theta < target)
              lo = mid;
            else
              hi = mid;
          }
          rec.crossing_radii.push_back(0.5 * (lo + hi));
        }
        result.records.push_back(std::move(rec));
      }
    }

    if (!need_rescan) break;
    scan.points *= 2;  // one rescan at doubled resolution on ambiguity
  }

  std::sort(result.records.begin(), result.records.end(),
            [](const SolutionRecord& a, const SolutionRecord& b) {
              if (a.j != b.j) return a.j < b.j;
              if (a.d != b.d) return a.d < b.d;
              return a.u0 > b.u0;
            });
  return result;
}

Classification classify(const PContext& ctx, const SolutionRecord& record) {
  Classification c;
  const double pi_p = ctx.pi_p();
  const auto& th = record.profile.theta;
  const auto& rs = record.profile.r;
  const double th_start = th.front(), th_end = th.back();

  auto crossing_radius = [&](double target) {
    auto it = std::lower_bound(th.begin(), th.end(), target);
    std::size_t i = std::size_t(it - th.begin());
    double lo = rs[i - 1], hi = rs[i];
    for (int b = 0; b < 80 && hi - lo > 1e-13 * rs.back(); ++b) {
      const double mid = 0.5 * (lo + hi);
      if (record.profile.eval(mid).theta < target)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  const double tol = 1e-9 * pi_p;
  // u = 1 crossings: theta through half-integer multiples of pi_p
  for (int m = 1;; ++m) {
    const double target = (m + 0.5) * pi_p;
    if (target >= th_end - tol) break;
    if (target > th_start + tol) ++c.zeros;
  }
  // interior extrema: theta through integer multiples (v = 0)
  for (int m = 2;; ++m) {
    const double target = m * pi_p;
    if (target >= th_end - tol) break;
    if (target > th_start + tol) c.extrema.push_back(crossing_radius(target));
  }
  c.monotone = c.zeros == 1 && c.extrema.empty();
  return c;
}

double equation_residual(const PContext& ctx, const Nonlinearity& nl,
                         const RadialDomain& dom, const ShotSpec& spec,
                         int n) {
  if (n < 16) throw std::invalid_argument("equation_residual: n too small");
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i)
    grid[i] = dom.R1 + (dom.R2 - dom.R1) * double(i) / double(n - 1);
  const PhasePath path = integrate_shot(ctx, nl, dom, spec, &grid);

  std::vector<double> u(n), v(n);
  for (int i = 0; i < n; ++i) {
    const StateSample s = path.eval(grid[i]);
    u[i] = s.u;
    v[i] = s.v;
  }
  const double h = (dom.R2 - dom.R1) / double(n - 1);
  double worst = 0.0;
  for (int i = 3; i + 3 < n; ++i) {
    // 6th-order central difference of v
    const double dv = (-v[i - 3] + 9.0 * v[i - 2] - 45.0 * v[i - 1] +
                       45.0 * v[i + 1] - 9.0 * v[i + 2] + v[i + 3]) /
                      (60.0 * h);
    const double a = dom.N == 1 ? 1.0 : std::pow(grid[i], dom.N - 1);
    worst = std::max(worst, std::abs(dv + a * nl.f_hat(u[i])));
  }
  return worst;
}

}  // namespace pshoot
