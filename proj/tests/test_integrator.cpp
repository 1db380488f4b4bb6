#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pshoot/errors.hpp"
#include "pshoot/integrator.hpp"

using pshoot::PContext;
using pshoot::PhasePath;
using pshoot::PrototypeNonlinearity;
using pshoot::RadialDomain;
using pshoot::ShotSpec;
using pshoot::SingularStart;
using pshoot::StateSample;

namespace {

std::vector<double> uniform_grid(double a, double b, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a + (b - a) * double(i) / double(n - 1);
  return g;
}

}  // namespace

TEST_CASE("shot spec validation") {
  CHECK_THROWS_AS(ShotSpec::from_d(-0.1).check(), std::invalid_argument);
  CHECK_THROWS_AS(ShotSpec::from_d(1.5).check(), std::invalid_argument);
  ShotSpec bad = ShotSpec::from_d(0.5);
  bad.tol_rel = -1.0;
  CHECK_THROWS_AS(bad.check(), std::invalid_argument);
  CHECK_NOTHROW(ShotSpec::from_d(0.0).check());
  CHECK_NOTHROW(ShotSpec::from_d(1.0).check());
}

TEST_CASE("equilibrium shots d = 0 and d = 1") {
  PContext ctx(2.0);
  PrototypeNonlinearity nl(2.0, 4.0);
  RadialDomain dom(0.0, 1.0, 1);

  const PhasePath zero = integrate_shot(ctx, nl, dom, ShotSpec::from_d(0.0));
  for (std::size_t i = 0; i < zero.size(); ++i) {
    CHECK(zero.u[i] == 1.0);
    CHECK(zero.v[i] == 0.0);
    CHECK(zero.theta[i] == ctx.pi_p());
  }

  const PhasePath one = integrate_shot(ctx, nl, dom, ShotSpec::from_d(1.0));
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(std::abs(one.u[i]) < 1e-12);
    CHECK(std::abs(one.v[i]) < 1e-12);
    CHECK(std::abs(one.theta[i] - ctx.pi_p()) < 1e-10);
  }
}

TEST_CASE("small-amplitude shot matches the linearized profile") {
  // at p = 2, N = 1, the linearization around u = 1 is w'' + (q-2) w = 0,
  // so u ~ 1 - d cos(sqrt(q-2) r) with O(d^2) deviation
  PContext ctx(2.0);
  PrototypeNonlinearity nl(2.0, 14.0);
  RadialDomain dom(0.0, 1.0, 1);
  const auto grid = uniform_grid(0.0, 1.0, 257);

  auto deviation = [&](double d) {
    const PhasePath path =
        integrate_shot(ctx, nl, dom, ShotSpec::from_d(d), &grid);
    double worst = 0.0;
    for (double r : grid) {
      const double want = 1.0 - d * std::cos(std::sqrt(12.0) * r);
      worst = std::max(worst, std::abs(path.eval(r).u - want));
    }
    return worst;
  };

  const double dev1 = deviation(1e-3);
  const double dev2 = deviation(2e-3);
  CHECK(dev1 < 1e-4);
  const double ratio = dev2 / dev1;
  CHECK(ratio > 2.5);  // second-order in d
  CHECK(ratio < 6.0);
}

TEST_CASE("singular start expansion") {
  PContext ctx(2.0);
  PrototypeNonlinearity nl(2.0, 4.0);
  RadialDomain ball(0.0, 1.0, 3);

  SUBCASE("equilibrium d = 0 stays at (1, 0)") {
    const SingularStart s = singular_start(ctx, nl, ball, ShotSpec::from_d(0.0));
    CHECK(s.u == 1.0);
    CHECK(s.v == 0.0);
    CHECK(s.theta == ctx.pi_p());
  }

  SUBCASE("d = 0.5 against hand-computed expansion") {
    // f_hat(0.5) = -0.5 + 0.125 = -0.375;
    // u(r0) = 0.5 + (1/2) (0.375/3) r0^2, v(r0) = 0.125 r0^3
    ShotSpec spec = ShotSpec::from_d(0.5);
    spec.r_start_eps = 1e-4;
    const SingularStart s = singular_start(ctx, nl, ball, spec);
    const double r0 = s.r0;
    CHECK(r0 == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(nl.f_hat(0.5) == doctest::Approx(-0.375).epsilon(1e-15));
    CHECK(s.u == doctest::Approx(0.5 + 0.0625 * r0 * r0).epsilon(1e-12));
    CHECK(s.v == doctest::Approx(0.125 * r0 * r0 * r0).epsilon(1e-12));
    CHECK(s.theta > ctx.pi_p());
    CHECK(s.theta < 1.5 * ctx.pi_p());
  }

  SUBCASE("advertised order 2p' under r0 halving") {
    // start at r0/2, integrate the true flow up to r0 with tight tolerances,
    // compare against the direct expansion at r0; mismatch ~ r0^{2p'}
    for (double p : {2.0, 1.5}) {
      PContext pctx(p);
      PrototypeNonlinearity pnl(p, p + 2.0);
      auto expansion_error = [&](double eps) {
        ShotSpec lo = ShotSpec::from_d(0.5);
        lo.r_start_eps = 0.5 * eps;
        lo.tol_rel = 1e-13;
        lo.tol_abs = 1e-16;
        ShotSpec hi = lo;
        hi.r_start_eps = eps;
        const SingularStart b = singular_start(pctx, pnl, ball, hi);
        RadialDomain leg(0.0, b.r0, 3);
        const PhasePath path = integrate_shot(pctx, pnl, leg, lo);
        return std::abs(path.u.back() - b.u);
      };
      // offsets large enough that the r0^{2p'} mismatch clears the solver
      // tolerance floor
      const double eps1 = p < 2.0 ? 8e-2 : 2e-2;
      const double e1 = expansion_error(eps1);
      const double e2 = expansion_error(0.5 * eps1);
      CHECK(e1 > 0);
      const double order = std::log2(e1 / e2);
      const double expect = 2.0 * p / (p - 1.0);
      CHECK(order == doctest::Approx(expect).epsilon(0.25));
    }
  }

  SUBCASE("rejected off the ball") {
    RadialDomain annulus(0.5, 1.0, 3);
    CHECK_THROWS_AS(singular_start(ctx, nl, annulus, ShotSpec::from_d(0.5)),
                    std::invalid_argument);
  }
}

TEST_CASE("energy profile diagnostics") {
  PContext ctx(2.0);
  PrototypeNonlinearity nl(2.0, 4.0);

  SUBCASE("N = 1 conserves H") {
    RadialDomain dom(0.0, 1.0, 1);
    const PhasePath path = integrate_shot(ctx, nl, dom, ShotSpec::from_d(0.5));
    double max_abs_H = 0.0;
    for (double h : path.H) max_abs_H = std::max(max_abs_H, std::abs(h));
    CHECK(energy_profile(path) <= 1e-8 * (1.0 + max_abs_H));
    // two-sided: H stays near its initial value
    for (double h : path.H)
      CHECK(std::abs(h - path.H.front()) <= 1e-8 * (1.0 + max_abs_H));
  }

  SUBCASE("d = 0 has H identically zero") {
    RadialDomain dom(0.0, 1.0, 1);
    const PhasePath path = integrate_shot(ctx, nl, dom, ShotSpec::from_d(0.0));
    CHECK(energy_profile(path) == 0.0);
    for (double h : path.H) CHECK(h == 0.0);
  }

  SUBCASE("N = 3 dissipates") {
    RadialDomain ball(0.0, 1.0, 3);
    const PhasePath path = integrate_shot(ctx, nl, ball, ShotSpec::from_d(0.5));
    double max_abs_H = 0.0;
    for (double h : path.H) max_abs_H = std::max(max_abs_H, std::abs(h));
    CHECK(energy_profile(path) <= 1e-8 * (1.0 + max_abs_H));
    CHECK(path.H.front() - path.H.back() > 1e-6);
  }
}

TEST_CASE("phase path invariants across shots") {
  for (double p : {1.5, 2.0, 3.0}) {
    PContext ctx(p);
    PrototypeNonlinearity nl(p, p + 2.0);
    for (int N : {1, 2, 3}) {
      RadialDomain dom(0.0, 1.2, N);
      for (double d : {0.2, 0.7, 0.95}) {
        const PhasePath path = integrate_shot(ctx, nl, dom, ShotSpec::from_d(d));

        // theta starts at pi_p and never decreases
        CHECK(path.theta.front() == doctest::Approx(ctx.pi_p()).epsilon(1e-12));
        for (std::size_t i = 1; i < path.size(); ++i)
          CHECK(path.theta[i] >= path.theta[i - 1] - 1e-12);

        // amplitude never vanishes for d in (0, 1)
        for (double r2 : path.rho2) CHECK(r2 > 0.0);

        // polar reconstruction consistency: (u - 1, v) from (rho, theta)
        for (std::size_t i = 0; i < path.size(); ++i) {
          const double rho2 = path.rho2[i];
          const auto cs = ctx.cos_sin(path.theta[i]);
          const double x_rec = std::pow(rho2, 1.0 / p) * cs.c;
          const double y_rec = -std::pow(rho2, 1.0 / ctx.p_conj()) * cs.s;
          const double scale = std::pow(rho2, 1.0 / p) + 1e-30;
          CHECK(std::abs(x_rec - path.w[i]) <= 1e-7 * scale);
          const double vscale = std::pow(rho2, 1.0 / ctx.p_conj()) + 1e-30;
          CHECK(std::abs(y_rec - path.v[i]) <= 1e-7 * vscale);
        }
      }
    }
  }
}

TEST_CASE("grid refinement convergence of theta(R2)") {
  PContext ctx(2.0);
  PrototypeNonlinearity nl(2.0, 10.0);
  RadialDomain dom(0.0, 1.0, 1);
  for (double d : {0.3, 0.9}) {
    ShotSpec coarse = ShotSpec::from_d(d);
    const double t1 = integrate_shot(ctx, nl, dom, coarse).theta_end();
    ShotSpec fine = coarse.with_tols(coarse.tol_rel / 2, coarse.tol_abs / 2);
    const double t2 = integrate_shot(ctx, nl, dom, fine).theta_end();
    CHECK(std::abs(t1 - t2) <= 10.0 * coarse.tol_rel * (1.0 + std::abs(t1)));
  }
}

TEST_CASE("continuous dependence on d") {
  PContext ctx(2.0);
  PrototypeNonlinearity nl(2.0, 10.0);
  RadialDomain dom(0.0, 1.0, 1);
  const auto grid = uniform_grid(0.0, 1.0, 129);
  const double d = 0.4;
  const PhasePath base = integrate_shot(ctx, nl, dom, ShotSpec::from_d(d), &grid);

  double prev = 1e300;
  for (int m = 3; m <= 6; ++m) {
    const double off = std::pow(10.0, -m);
    double worst = 0.0;
    for (double sgn : {-1.0, 1.0}) {
      const PhasePath near_ =
          integrate_shot(ctx, nl, dom, ShotSpec::from_d(d + sgn * off), &grid);
      for (double r : grid)
        worst = std::max(worst,
                         std::abs(near_.eval(r).theta - base.eval(r).theta));
    }
    CHECK(worst < prev);
    prev = worst;
  }
  CHECK(prev < 1e-4);  // at offset 1e-6 the trajectories are very close
}

TEST_CASE("vanishing amplitude as d -> 0") {
  PContext ctx(2.0);
  PrototypeNonlinearity nl(2.0, 10.0);
  RadialDomain dom(0.0, 1.0, 1);
  double prev_sup = 1e300;
  for (int m = 2; m <= 5; ++m) {
    const double d = std::pow(10.0, -m);
    const PhasePath path = integrate_shot(ctx, nl, dom, ShotSpec::from_d(d));
    const double sup = path.sup_rho();
    CHECK(sup < prev_sup);
    prev_sup = sup;
  }
  CHECK(prev_sup < 1e-3);
}

TEST_CASE("dense output lands on requested grid points") {
  PContext ctx(1.5);
  PrototypeNonlinearity nl(1.5, 3.0);
  RadialDomain dom(0.0, 2.0, 1);
  const auto grid = uniform_grid(0.1, 1.9, 37);
  const PhasePath path =
      integrate_shot(ctx, nl, dom, ShotSpec::from_d(0.6), &grid);
  for (double rg : grid) {
    bool found = false;
    for (double r : path.r)
      if (std::abs(r - rg) <= 1e-12) {
        found = true;
        break;
      }
    CHECK(found);
  }
}

TEST_CASE("hermite eval agrees with stored samples and a tight re-run") {
  PContext ctx(2.0);
  PrototypeNonlinearity nl(2.0, 6.0);
  RadialDomain dom(0.0, 1.0, 1);
  const PhasePath path = integrate_shot(ctx, nl, dom, ShotSpec::from_d(0.5));
  for (std::size_t i = 0; i < path.size(); i += 7) {
    const StateSample s = path.eval(path.r[i]);
    CHECK(s.u == doctest::Approx(path.u[i]).epsilon(1e-15));
    CHECK(s.theta == doctest::Approx(path.theta[i]).epsilon(1e-15));
  }
  std::vector<double> probes;
  for (std::size_t i = 1; i + 1 < path.size(); i += 9)
    probes.push_back(0.5 * (path.r[i] + path.r[i + 1]));
  ShotSpec tight = ShotSpec::from_d(0.5).with_tols(1e-12, 1e-14);
  const PhasePath ref = integrate_shot(ctx, nl, dom, tight, &probes);
  for (double rp : probes) {
    CHECK(std::abs(path.eval(rp).u - ref.eval(rp).u) < 1e-8);
    CHECK(std::abs(path.eval(rp).theta - ref.eval(rp).theta) < 1e-7);
  }
}

TEST_CASE("equilibrium d = 1 on the ball goes through the singular start") {
  PContext ctx(2.0);
  PrototypeNonlinearity nl(2.0, 4.0);
  RadialDomain ball(0.0, 1.0, 3);
  const PhasePath path = integrate_shot(ctx, nl, ball, ShotSpec::from_d(1.0));
  for (std::size_t i = 0; i < path.size(); ++i) {
    CHECK(std::abs(path.u[i]) < 1e-12);
    CHECK(std::abs(path.v[i]) < 1e-12);
    CHECK(std::abs(path.theta[i] - ctx.pi_p()) < 1e-10);
  }
}

TEST_CASE("coarse tolerances stay usable") {
  // the solver-health check scales with the requested accuracy instead of
  // rejecting every low-accuracy run
  PContext ctx(2.0);
  PrototypeNonlinearity nl(2.0, 10.0);
  RadialDomain dom(0.0, 1.0, 1);
  ShotSpec rough = ShotSpec::from_d(0.6).with_tols(1e-5, 1e-7);
  const PhasePath path = integrate_shot(ctx, nl, dom, rough);
  CHECK(path.theta_end() > ctx.pi_p());
  // still close to the tight answer at the scale of the tolerance
  const double tight =
      integrate_shot(ctx, nl, dom, ShotSpec::from_d(0.6)).theta_end();
  CHECK(std::abs(path.theta_end() - tight) < 1e-3);
}

TEST_CASE("annulus shots need no singular machinery") {
  PContext ctx(3.0);
  PrototypeNonlinearity nl(3.0, 5.0);
  RadialDomain annulus(0.5, 2.0, 3);
  const PhasePath path = integrate_shot(ctx, nl, annulus, ShotSpec::from_d(0.4));
  CHECK(path.r.front() == 0.5);
  CHECK(path.r.back() == 2.0);
  CHECK(path.u.front() == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(path.v.front() == 0.0);
}

TEST_CASE("deep fold shots survive: tiny u0 under relative control") {
  // the C1 = 0 regime parks trajectories exponentially close to u = 0;
  // the relative-dominant error control has to hold u0 ~ 1e-20 accurately
  PContext ctx(1.5);
  PrototypeNonlinearity nl(1.5, 3.0);
  RadialDomain dom(0.0, 40.0, 1);
  const PhasePath path = integrate_shot(ctx, nl, dom, ShotSpec::from_u0(1e-20));
  CHECK(path.min_u() > 0.0);
  CHECK(path.min_u() <= 1e-19);
  CHECK(path.theta_end() > 2.0 * ctx.pi_p());  // still past one full loop
  double max_abs_H = 0.0;
  for (double h : path.H) max_abs_H = std::max(max_abs_H, std::abs(h));
  CHECK(energy_profile(path) <= 1e-8 * (1.0 + max_abs_H));
}
