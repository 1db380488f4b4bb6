#include "pshoot/ptrig.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pshoot/detail/dopri5.hpp"

namespace pshoot {

namespace {

// rho^2 = |x|^p + (p-1)|y|^{p'} is a first integral of the defining system;
// on the (cos_p, sin_p) orbit it equals 1, which is the identity
// |cos_p|^p/p + |sin_p|^{p'}/p' = 1/p written without denominators.
double invariant(double x, double y, double p, double pc) {
  return std::pow(std::abs(x), p) + (p - 1.0) * std::pow(std::abs(y), pc);
}

void project_to_circle(double& x, double& y, double p, double pc) {
  const double rho2 = invariant(x, y, p, pc);
  if (rho2 <= 0 || rho2 == 1.0) return;
  x *= std::pow(rho2, -1.0 / p);
  y *= std::pow(rho2, -1.0 / pc);
}

}  // namespace

struct PContext::Table {
  std::vector<double> th, x, y, dx, dy;
  double quarter = 0;
  int m = 0;  // number of intervals
};

double PContext::phi_pow(double s, double e) {
  if (s == 0.0) return 0.0;
  if (e == 2.0) return s;
  return std::copysign(std::pow(std::abs(s), e - 1.0), s);
}

PContext::PContext(double p, int quarter_nodes) : p_(p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::domain_error("PContext: exponent p must satisfy p > 1");
  if (quarter_nodes < 64)
    throw std::invalid_argument("PContext: need at least 64 quarter nodes");
  p_conj_ = p / (p - 1.0);
  pi_p_ = 2.0 * std::numbers::pi * std::pow(p - 1.0, 1.0 / p) /
          (p * std::sin(std::numbers::pi / p));

  auto table = std::make_shared<Table>();
  Table& tb = *table;
  tb.m = quarter_nodes;
  tb.quarter = 0.5 * pi_p_;
  const int m = tb.m;
  tb.th.resize(m + 1);
  // cosine-clustered nodes: higher derivatives of the pair degenerate at the
  // quarter ends for p != 2, so spacing shrinks quadratically there
  for (int i = 0; i <= m; ++i)
    tb.th[i] = tb.quarter * 0.5 *
               (1.0 - std::cos(std::numbers::pi * double(i) / double(m)));
  tb.th[0] = 0.0;
  tb.th[m] = tb.quarter;

  tb.x.assign(m + 1, 0.0);
  tb.y.assign(m + 1, 0.0);

  const double p_ = this->p_, pc_ = this->p_conj_;
  auto rhs = [p_, pc_](double, const detail::State<2>& s, detail::State<2>& d) {
    d[0] = -phi_pow(s[1], pc_);
    d[1] = phi_pow(s[0], p_);
  };

  detail::Dopri5Options<2> opt;
  opt.rtol = 1e-13;
  opt.atol = {1e-14, 1e-14};
  opt.step_on_grid = true;  // land on every node: the corners at the quarter
                            // ends defeat the dense interpolant for p != 2

  int emitted = 0;
  std::vector<double> interior(tb.th.begin() + 1, tb.th.end() - 1);
  auto emit = [&](double t, const detail::State<2>& s, const detail::State<2>&) {
    // record only the requested nodes; accepted steps in between are skipped
    while (emitted <= m && tb.th[emitted] <= t + 1e-12 * tb.quarter) {
      tb.x[emitted] = s[0];
      tb.y[emitted] = s[1];
      ++emitted;
    }
  };
  auto post = [p_, pc_](double, detail::State<2>& s) {
    project_to_circle(s[0], s[1], p_, pc_);
  };

  detail::State<2> y0 = {1.0, 0.0};
  dopri5_integrate<2>(rhs, 0.0, tb.quarter, y0, opt, interior.data(),
                      interior.data() + interior.size(), emit, post);

  // exact endpoints: cos_p(0) = 1, sin_p(0) = 0; cos_p(pi_p/2) = 0 and
  // |sin_p(pi_p/2)|^{p'} = p'/p
  tb.x[0] = 1.0;
  tb.y[0] = 0.0;
  tb.x[m] = 0.0;
  tb.y[m] = std::pow(p_conj_ / p, 1.0 / p_conj_);
  for (int i = 1; i < m; ++i) project_to_circle(tb.x[i], tb.y[i], p_, pc_);

  // iron out ulp-level jitter so both columns are monotone as stored
  for (int i = m - 1; i >= 1; --i) {
    tb.x[i] = std::max(tb.x[i], tb.x[i + 1]);
    tb.y[i] = std::min(tb.y[i], tb.y[i + 1]);
  }
  for (int i = 1; i <= m; ++i)
    if (tb.x[i] > tb.x[i - 1] || tb.y[i] < tb.y[i - 1])
      throw std::logic_error("PContext: quarter-period table not monotone");

  tb.dx.resize(m + 1);
  tb.dy.resize(m + 1);
  for (int i = 0; i <= m; ++i) {
    tb.dx[i] = -phi_pow(tb.y[i], pc_);
    tb.dy[i] = phi_pow(tb.x[i], p_);
  }
  table_ = std::move(table);
}

int PContext::quarter_nodes() const { return table_->m; }

void PContext::eval_quarter(double t, double& x, double& y) const {
  const Table& tb = *table_;
  if (t <= 0.0) {
    x = 1.0;
    y = 0.0;
    return;
  }
  if (t >= tb.quarter) {
    x = 0.0;
    y = tb.y[tb.m];
    return;
  }
  // invert the cosine node map, then fix up against rounding
  double u = 1.0 - 2.0 * t / tb.quarter;
  u = std::clamp(u, -1.0, 1.0);
  int i = int(std::acos(u) * double(tb.m) / std::numbers::pi);
  i = std::clamp(i, 0, tb.m - 1);
  while (i > 0 && t < tb.th[i]) --i;
  while (i < tb.m - 1 && t > tb.th[i + 1]) ++i;

  const double h = tb.th[i + 1] - tb.th[i];
  const double s = (t - tb.th[i]) / h;
  const double s1 = 1.0 - s;
  const double h00 = (1.0 + 2.0 * s) * s1 * s1;
  const double h10 = s * s1 * s1;
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);
  x = h00 * tb.x[i] + h * (h10 * tb.dx[i] + h11 * tb.dx[i + 1]) + h01 * tb.x[i + 1];
  y = h00 * tb.y[i] + h * (h10 * tb.dy[i] + h11 * tb.dy[i + 1]) + h01 * tb.y[i + 1];
  project_to_circle(x, y, p_, p_conj_);
}

CosSinP PContext::cos_sin(double theta) const {
  const double period = 2.0 * pi_p_;
  double t = std::fmod(theta, period);
  if (t < 0) t += period;
  const double quarter = 0.5 * pi_p_;

  double x, y;
  if (t <= quarter) {
    eval_quarter(t, x, y);
    return {x, y};
  }
  if (t <= pi_p_) {
    eval_quarter(pi_p_ - t, x, y);
    return {-x, y};
  }
  if (t <= pi_p_ + quarter) {
    eval_quarter(t - pi_p_, x, y);
    return {-x, -y};
  }
  eval_quarter(period - t, x, y);
  return {x, -y};
}

double PContext::rho_squared(double x, double y) const {
  return invariant(x, y, p_, p_conj_);
}

double PContext::arccos_p(double c) const {
  c = std::clamp(c, -1.0, 1.0);
  if (c >= 1.0) return 0.0;
  if (c <= -1.0) return pi_p_;
  double lo = 0.0, hi = pi_p_;  // cos_p decreases from 1 to -1 on [0, pi_p]
  for (int it = 0; it < 200 && hi - lo > 4e-16 * pi_p_; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cos_sin(mid).c > c)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double PContext::theta_from_state(double x, double y) const {
  const double rho2 = rho_squared(x, y);
  if (!(rho2 > 0))
    throw std::invalid_argument("theta_from_state: state is at the center (1,0)");
  const double c = std::clamp(x * std::pow(rho2, -1.0 / p_), -1.0, 1.0);
  const double s = -y * std::pow(rho2, -1.0 / p_conj_);

  // in-quarter parameter from whichever component is better conditioned
  // (the one away from its flat extremum)
  const double s_max = table_->y[table_->m];
  const double ac = std::abs(c), as = std::min(std::abs(s), s_max);
  double t;
  const double quarter = 0.5 * pi_p_;
  if (as / s_max <= ac) {
    // invert sin: y component strictly increasing on the quarter
    double lo = 0.0, hi = quarter;
    for (int it = 0; it < 200 && hi - lo > 4e-16 * quarter; ++it) {
      const double mid = 0.5 * (lo + hi);
      double xm, ym;
      eval_quarter(mid, xm, ym);
      if (ym < as)
        lo = mid;
      else
        hi = mid;
    }
    t = 0.5 * (lo + hi);
  } else {
    double lo = 0.0, hi = quarter;
    for (int it = 0; it < 200 && hi - lo > 4e-16 * quarter; ++it) {
      const double mid = 0.5 * (lo + hi);
      double xm, ym;
      eval_quarter(mid, xm, ym);
      if (xm > ac)
        lo = mid;
      else
        hi = mid;
    }
    t = 0.5 * (lo + hi);
  }

  double th;
  if (c >= 0 && s >= 0) th = t;
  else if (c < 0 && s >= 0) th = pi_p_ - t;
  else if (c < 0 && s < 0) th = pi_p_ + t;
  else th = 2.0 * pi_p_ - t;
  if (th >= 2.0 * pi_p_) th = 0.0;
  return th;
}

}  // namespace pshoot
