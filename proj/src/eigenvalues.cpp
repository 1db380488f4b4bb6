#include "pshoot/eigenvalues.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pshoot/detail/dopri5.hpp"
#include "pshoot/errors.hpp"

namespace pshoot {

namespace {

struct AngleRhs {
  double p, pc, lambda;
  int N;
  const PContext* ctx;

  void operator()(double r, const detail::State<1>& y,
                  detail::State<1>& dy) const {
    const CosSinP cs = ctx->cos_sin(y[0]);
    const double sp = std::pow(std::abs(cs.s), pc);
    const double cp = std::pow(std::abs(cs.c), p);
    if (N == 1) {
      dy[0] = (p - 1.0) * sp + lambda * cp;
    } else {
      const double a = std::pow(r, N - 1);
      dy[0] = (p - 1.0) * std::pow(r, double(N - 1) * (1.0 - pc)) * sp +
              lambda * a * cp;
    }
  }
};

struct StartState {
  double r0;
  double theta;
};

// Power-series start at the ball center, same expansion as the shot
// integrator with f_hat replaced by lambda*phi_p(phi) and phi(0) = -1
// (the pi_p branch of the angle).
StartState angle_start(const PContext& ctx, const RadialDomain& dom,
                       double lambda, const EigenOptions& opt) {
  if (!(dom.is_ball() && dom.N >= 2)) return {dom.R1, ctx.pi_p()};
  const double p = ctx.p(), pc = ctx.p_conj();
  const double r0 = std::min(std::max(opt.r_start_eps, 1e-8), 0.1) * dom.R2;
  if (lambda == 0.0) return {r0, ctx.pi_p()};
  const double x = -1.0 + (p - 1.0) / p * PContext::phi_pow(lambda / dom.N, pc) *
                              std::pow(r0, pc);
  const double y = lambda * std::pow(r0, dom.N) / dom.N;
  double th = ctx.theta_from_state(x, y);
  if (th < 0.5 * ctx.pi_p()) th += 2.0 * ctx.pi_p();
  return {r0, th};
}

double integrate_angle(const PContext& ctx, const RadialDomain& dom,
                       double lambda, const EigenOptions& opt,
                       const std::vector<double>* grid,
                       std::vector<double>* out) {
  if (lambda < 0)
    throw std::invalid_argument("eigen_angle: lambda must be non-negative");
  if (lambda == 0.0) {
    if (grid && out) out->assign(grid->size(), ctx.pi_p());
    return ctx.pi_p();
  }
  const StartState st = angle_start(ctx, dom, lambda, opt);

  AngleRhs rhs{ctx.p(), ctx.p_conj(), lambda, dom.N, &ctx};
  detail::Dopri5Options<1> dopt;
  dopt.rtol = opt.tol_rel;
  dopt.atol = {opt.tol_abs};
  dopt.cap_component = 0;
  dopt.cap_delta = ctx.pi_p() / 64.0;

  std::vector<double> inner;
  if (grid) {
    for (double rg : *grid)
      if (rg > st.r0 && rg <= dom.R2) inner.push_back(rg);
    std::sort(inner.begin(), inner.end());
  }

  std::vector<double> rs, ths;
  detail::State<1> y0 = {st.theta};
  dopri5_integrate<1>(
      rhs, st.r0, dom.R2, y0, dopt, inner.data(), inner.data() + inner.size(),
      [&](double r, const detail::State<1>& y, const detail::State<1>&) {
        rs.push_back(r);
        ths.push_back(y[0]);
      },
      [](double, detail::State<1>&) {});

  if (grid && out) {
    out->clear();
    out->reserve(grid->size());
    for (double rg : *grid) {
      if (rg <= st.r0) {
        out->push_back(st.theta);
        continue;
      }
      const auto it = std::lower_bound(rs.begin(), rs.end(), rg - 1e-13 * dom.R2);
      std::size_t i = std::size_t(it - rs.begin());
      if (i >= rs.size()) i = rs.size() - 1;
      out->push_back(ths[i]);
    }
  }
  return ths.back();
}

}  // namespace

double eigen_angle(const PContext& ctx, const RadialDomain& dom, double lambda,
                   const EigenOptions& opt) {
  return integrate_angle(ctx, dom, lambda, opt, nullptr, nullptr);
}

std::vector<double> eigen_angle_profile(const PContext& ctx,
                                        const RadialDomain& dom, double lambda,
                                        const std::vector<double>& grid,
                                        const EigenOptions& opt) {
  std::vector<double> out;
  integrate_angle(ctx, dom, lambda, opt, &grid, &out);
  return out;
}

EigenResult radial_eigenvalue(const PContext& ctx, const RadialDomain& dom,
                              int k, const EigenOptions& opt) {
  if (k < 1) throw std::invalid_argument("radial_eigenvalue: k must be >= 1");
  if (k == 1) return {1, 0.0, ctx.pi_p(), 0};

  const double target = k * ctx.pi_p();
  double lo = 0.0;
  double hi = std::pow(dom.width(), -ctx.p());
  while (eigen_angle(ctx, dom, hi, opt) <= target) {
    lo = hi;
    hi *= 2.0;
    if (hi > opt.lambda_cap)
      throw BracketOverflow(
          "radial_eigenvalue: no angle crossing below lambda = " +
          std::to_string(opt.lambda_cap) + " for k = " + std::to_string(k) +
          " on [" + std::to_string(dom.R1) + ", " + std::to_string(dom.R2) +
          "], N = " + std::to_string(dom.N));
  }
  while (hi - lo > opt.lambda_rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (eigen_angle(ctx, dom, mid, opt) > target)
      hi = mid;
    else
      lo = mid;
  }
  const double lambda = 0.5 * (lo + hi);
  return {k, lambda, eigen_angle(ctx, dom, lambda, opt), k - 1};
}

EigenFunction eigenfunction(const PContext& ctx, const RadialDomain& dom,
                            double lambda, const EigenOptions& opt) {
  const double p = ctx.p(), pc = ctx.p_conj();
  const int N = dom.N;

  auto rhs = [&](double r, const detail::State<2>& y, detail::State<2>& dy) {
    const double a = N == 1 ? 1.0 : std::pow(r, N - 1);
    dy[0] = PContext::phi_pow(y[1] / a, pc);
    dy[1] = -lambda * a * PContext::phi_pow(y[0], p);
  };

  EigenFunction ef;
  double r_begin = dom.R1;
  detail::State<2> y0 = {1.0, 0.0};
  if (dom.is_ball() && N >= 2) {
    const double r0 = std::min(std::max(opt.r_start_eps, 1e-8), 0.1) * dom.R2;
    ef.r.push_back(0.0);
    ef.phi.push_back(1.0);
    ef.dphi.push_back(0.0);
    y0[0] = 1.0 - (p - 1.0) / p * PContext::phi_pow(lambda / N, pc) * std::pow(r0, pc);
    y0[1] = -lambda * std::pow(r0, N) / N;
    r_begin = r0;
  }

  detail::Dopri5Options<2> dopt;
  dopt.rtol = opt.tol_rel;
  dopt.atol = {1e-14, 1e-14};

  dopri5_integrate<2>(
      rhs, r_begin, dom.R2, y0, dopt, nullptr, nullptr,
      [&](double r, const detail::State<2>& y, const detail::State<2>& dy) {
        if (!ef.r.empty() && !(r > ef.r.back())) return;
        ef.r.push_back(r);
        ef.phi.push_back(y[0]);
        ef.dphi.push_back(dy[0]);
      },
      [](double, detail::State<2>&) {});

  for (std::size_t i = 1; i < ef.phi.size(); ++i)
    if (ef.phi[i - 1] != 0.0 && ef.phi[i] != 0.0 &&
        (ef.phi[i - 1] < 0) != (ef.phi[i] < 0))
      ++ef.sign_changes;
  ef.boundary_residual = std::abs(ef.dphi.back());
  for (double d : ef.dphi) ef.max_abs_dphi = std::max(ef.max_abs_dphi, std::abs(d));
  return ef;
}

}  // namespace pshoot
