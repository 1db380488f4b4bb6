#include "pshoot/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pshoot/detail/dopri5.hpp"
#include "pshoot/errors.hpp"

namespace pshoot {

ShotSpec ShotSpec::from_d(double d) {
  ShotSpec s;
  s.d = d;
  s.u0 = 1.0 - d;
  return s;
}

ShotSpec ShotSpec::from_u0(double u0) {
  ShotSpec s;
  s.u0 = u0;
  s.d = 1.0 - u0;
  return s;
}

ShotSpec ShotSpec::with_tols(double rel, double abs) const {
  ShotSpec s = *this;
  s.tol_rel = rel;
  s.tol_abs = abs;
  return s;
}

void ShotSpec::check() const {
  if (!(d >= 0.0) || !(u0 >= 0.0) || !(u0 <= 1.0) || !(d <= 1.0))
    throw std::invalid_argument("shot: d must lie in [0, 1] (u(R1) >= 0)");
  if (!(tol_rel > 0) || !(tol_abs > 0))
    throw std::invalid_argument("shot: tolerances must be positive");
  if (!(r_start_eps > 0))
    throw std::invalid_argument("shot: r_start_eps must be positive");
}

namespace {

// The radial system in the shifted variable w = u - 1:
//   w' = phi_{p'}(v / r^{N-1}),  v' = -r^{N-1} f_hat(1 + w),
//   theta' = r^{N-1} [ (p-1)|w'|^p + w f_hat(1 + w) ] / rho^2,
//   rho^2 = |w|^p + (p-1)|v|^{p'}.
// Shots starting near d = 1 use u itself as the first component instead
// (shifted = false): there the tiny distance to u = 0 is the quantity that
// must survive rounding, while near d = 0 it is the distance to u = 1.
struct ShotRhs {
  double p, pc;
  int N;
  const Nonlinearity* nl;
  bool shifted;

  void operator()(double r, const detail::State<3>& y,
                  detail::State<3>& dy) const {
    const double first = y[0], v = y[1];
    const double wv = shifted ? first : first - 1.0;
    const double a = N == 1 ? 1.0 : std::pow(r, N - 1);
    const double ww = v / a;
    const double fh =
        shifted ? nl->f_hat_near_one(first) : nl->f_hat(first);
    dy[0] = PContext::phi_pow(ww, pc);
    dy[1] = -a * fh;
    const double rho2 = std::pow(std::abs(wv), p) +
                        (p - 1.0) * std::pow(std::abs(v), pc);
    if (rho2 > 0) {
      const double wp = ww == 0 ? 0.0 : std::pow(std::abs(ww), pc);
      dy[2] = a * ((p - 1.0) * wp + wv * fh) / rho2;
    } else {
      dy[2] = 0.0;
    }
  }
};

}  // namespace

SingularStart singular_start(const PContext& ctx, const Nonlinearity& nl,
                             const RadialDomain& dom, const ShotSpec& spec) {
  if (!dom.is_ball() || dom.N < 2)
    throw std::invalid_argument("singular_start: needs a ball with N >= 2");
  spec.check();
  const double p = ctx.p(), pc = ctx.p_conj();
  const double r0 = std::min(std::max(spec.r_start_eps, 1e-8), 0.1) * dom.R2;
  const bool shifted = spec.d <= 0.5;  // which coordinate carries precision
  const double fh =
      shifted ? nl.f_hat_near_one(-spec.d) : nl.f_hat(spec.u0);
  const double bump =
      (p - 1.0) / p * PContext::phi_pow(-fh / dom.N, pc) * std::pow(r0, pc);
  SingularStart s;
  s.r0 = r0;
  s.w = shifted ? -spec.d + bump : (spec.u0 + bump) - 1.0;
  s.u = shifted ? 1.0 + s.w : spec.u0 + bump;
  s.v = -(std::pow(r0, dom.N) / dom.N) * fh;
  if (s.w == 0.0 && s.v == 0.0)
    s.theta = ctx.pi_p();  // equilibrium shot, d = 0
  else
    s.theta = ctx.theta_from_state(s.w, s.v);
  // the angle lives on the branch starting at pi_p; fold the representative
  if (s.theta < 0.5 * ctx.pi_p()) s.theta += 2.0 * ctx.pi_p();
  return s;
}

namespace {

class PathBuilder {
 public:
  PathBuilder(PhasePath& path, const PContext& ctx, const Nonlinearity& nl,
              bool check_rho, bool shifted, double tol_rel)
      : path_(path), ctx_(ctx), nl_(nl), check_rho_(check_rho),
        shifted_(shifted),
        breach_tol_(std::max(1e-6, 100.0 * tol_rel)) {}

  void append(double r, const detail::State<3>& y, const detail::State<3>& dy) {
    if (!path_.r.empty() && !(r > path_.r.back())) return;  // dedupe
    const double w = shifted_ ? y[0] : y[0] - 1.0;
    const double u = shifted_ ? 1.0 + y[0] : y[0];
    const double v = y[1], th = y[2];
    const double rho2 = ctx_.rho_squared(w, v);
    const double up = dy[0];
    const double h = std::pow(std::abs(up), ctx_.p()) / ctx_.p_conj() +
                     nl_.F_hat(u);
    if (check_rho_ && !(rho2 > 1e-300))
      throw InvariantBreach("integrate_shot: amplitude rho^2 vanished at r = " +
                            std::to_string(r));
    max_abs_H_ = std::max(max_abs_H_, std::abs(h));
    if (!path_.H.empty() && h - path_.H.back() > breach_tol_ * (1.0 + max_abs_H_))
      throw InvariantBreach(
          "integrate_shot: energy H increased beyond tolerance at r = " +
          std::to_string(r));
    path_.r.push_back(r);
    path_.u.push_back(u);
    path_.w.push_back(w);
    path_.v.push_back(v);
    path_.theta.push_back(th);
    path_.rho2.push_back(rho2);
    path_.H.push_back(h);
    path_.du.push_back(dy[0]);
    path_.dv.push_back(dy[1]);
    path_.dtheta.push_back(dy[2]);
  }

 private:
  PhasePath& path_;
  const PContext& ctx_;
  const Nonlinearity& nl_;
  bool check_rho_;
  bool shifted_;
  double breach_tol_;
  double max_abs_H_ = 0.0;
};

}  // namespace

PhasePath integrate_shot(const PContext& ctx, const Nonlinearity& nl,
                         const RadialDomain& dom, const ShotSpec& spec,
                         const std::vector<double>* emit_grid) {
  spec.check();
  const double p = ctx.p(), pc = ctx.p_conj();

  PhasePath path;
  path.p = p;
  path.N = dom.N;
  path.R1 = dom.R1;
  path.R2 = dom.R2;
  path.d = spec.d;
  path.u0 = spec.u0;

  if (spec.d <= 0.0) {
    // the constant equilibrium u = 1; f_hat(1) = 0
    std::vector<double> grid;
    if (emit_grid) grid = *emit_grid;
    grid.push_back(dom.R1);
    grid.push_back(dom.R2);
    std::sort(grid.begin(), grid.end());
    for (double r : grid) {
      if (!path.r.empty() && !(r > path.r.back())) continue;
      path.r.push_back(r);
      path.u.push_back(1.0);
      path.w.push_back(0.0);
      path.v.push_back(0.0);
      path.theta.push_back(ctx.pi_p());
      path.rho2.push_back(0.0);
      path.H.push_back(0.0);
      path.du.push_back(0.0);
      path.dv.push_back(0.0);
      path.dtheta.push_back(0.0);
    }
    return path;
  }

  const bool shifted = spec.d <= 0.5;
  const bool check_rho = spec.d > 0.0 && spec.d < 1.0;
  PathBuilder builder(path, ctx, nl, check_rho, shifted, spec.tol_rel);

  ShotRhs rhs{p, pc, dom.N, &nl, shifted};

  double r_begin = dom.R1;
  detail::State<3> y0;
  if (dom.is_ball() && dom.N >= 2) {
    const SingularStart ss = singular_start(ctx, nl, dom, spec);
    // exact data at the center, then expansion values up to the offset r0
    detail::State<3> dy0{0.0, 0.0, 0.0};
    builder.append(
        0.0, {shifted ? -spec.d : spec.u0, 0.0, ctx.pi_p()}, dy0);
    if (emit_grid) {
      const double fh =
          shifted ? nl.f_hat_near_one(-spec.d) : nl.f_hat(spec.u0);
      for (double rg : *emit_grid) {
        if (rg <= 0.0 || rg >= ss.r0) continue;
        const double bump = (p - 1.0) / p *
                            PContext::phi_pow(-fh / dom.N, pc) *
                            std::pow(rg, pc);
        detail::State<3> yg, dyg;
        yg[0] = (shifted ? -spec.d : spec.u0) + bump;
        yg[1] = -(std::pow(rg, dom.N) / dom.N) * fh;
        const double wg = shifted ? yg[0] : yg[0] - 1.0;
        yg[2] = (wg == 0.0 && yg[1] == 0.0)
                    ? ctx.pi_p()
                    : ctx.theta_from_state(wg, yg[1]);
        if (yg[2] < 0.5 * ctx.pi_p()) yg[2] += 2.0 * ctx.pi_p();
        rhs(rg, yg, dyg);
        builder.append(rg, yg, dyg);
      }
    }
    r_begin = ss.r0;
    y0 = {shifted ? ss.w : ss.u, ss.v, ss.theta};
  } else {
    y0 = {shifted ? -spec.d : spec.u0, 0.0, ctx.pi_p()};
  }

  detail::Dopri5Options<3> opt;
  opt.rtol = spec.tol_rel;
  opt.atol = {1e-300, 1e-300, spec.tol_abs};
  opt.cap_component = 2;  // bound per-step phase advance through the
  opt.cap_delta = ctx.pi_p() / 64.0;  // non-Lipschitz corner at v = 0
  const double* gb = nullptr;
  const double* ge = nullptr;
  std::vector<double> grid;
  if (emit_grid) {
    for (double rg : *emit_grid)
      if (rg > r_begin && rg <= dom.R2) grid.push_back(rg);
    std::sort(grid.begin(), grid.end());
    gb = grid.data();
    ge = grid.data() + grid.size();
  }

  dopri5_integrate<3>(
      rhs, r_begin, dom.R2, y0, opt, gb, ge,
      [&](double r, const detail::State<3>& y, const detail::State<3>& dy) {
        builder.append(r, y, dy);
      },
      [](double, detail::State<3>&) {});

  return path;
}

double energy_profile(const PhasePath& path) {
  double worst = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i)
    worst = std::max(worst, path.H[i] - path.H[i - 1]);
  return std::max(worst, 0.0);
}

StateSample PhasePath::eval(double rq) const {
  if (r.empty()) throw std::logic_error("PhasePath::eval on empty path");
  if (rq <= r.front()) return {u.front(), v.front(), theta.front()};
  if (rq >= r.back()) return {u.back(), v.back(), theta.back()};
  const auto it = std::upper_bound(r.begin(), r.end(), rq);
  const std::size_t i = std::size_t(it - r.begin()) - 1;
  const double h = r[i + 1] - r[i];
  const double s = (rq - r[i]) / h;
  const double s1 = 1.0 - s;
  const double h00 = (1.0 + 2.0 * s) * s1 * s1;
  const double h10 = s * s1 * s1;
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);
  auto hermite = [&](const std::vector<double>& f, const std::vector<double>& df) {
    return h00 * f[i] + h * (h10 * df[i] + h11 * df[i + 1]) + h01 * f[i + 1];
  };
  return {hermite(u, du), hermite(v, dv), hermite(theta, dtheta)};
}

double PhasePath::min_u() const {
  return *std::min_element(u.begin(), u.end());
}

double PhasePath::max_u() const {
  return *std::max_element(u.begin(), u.end());
}

double PhasePath::sup_rho() const {
  return std::sqrt(*std::max_element(rho2.begin(), rho2.end()));
}

double PhasePath::max_abs_uprime() const {
  double m = 0.0;
  for (double x : du) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace pshoot
