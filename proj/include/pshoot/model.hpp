#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pshoot {

/// Regime of the limit C1 = lim_{s->1} f(s)/phi_p(s-1), which selects the
/// solver strategy: C1 > 0 gives one solution per oscillation level, C1 = 0
/// gives folded pairs on large domains.
struct C1Class {
  enum class Kind { Zero, Finite, Infinite };
  Kind kind = Kind::Finite;
  double value = 0.0;  // meaningful for Finite (0 for Zero, +inf for Infinite)
  bool estimated = false;

  static C1Class zero(bool est = false) { return {Kind::Zero, 0.0, est}; }
  static C1Class finite(double v, bool est = false) { return {Kind::Finite, v, est}; }
  static C1Class infinite(bool est = false) {
    return {Kind::Infinite, std::numeric_limits<double>::infinity(), est};
  }
};

/// A nonlinearity f on [0, inf) subject to
///   f continuous on [0,inf), C^1 on (0,inf);
///   f(0) = f(1) = 0, f < 0 on (0,1), f > 0 on (1,inf);
///   f(s)/s^{p-1} -> -C0 as s -> 0+ with C0 in [0,inf);
///   f(s)/phi_p(s-1) -> C1 as s -> 1 with C1 in [0,inf].
/// The sign structure and the limit constants are spot-checked numerically at
/// construction (validate()); violations throw std::invalid_argument.
///
/// Instances are immutable after construction and safe to share across
/// threads.
class Nonlinearity {
 public:
  virtual ~Nonlinearity() = default;

  /// The exponent p this nonlinearity is paired with.
  double p() const { return p_; }

  virtual double f(double s) const = 0;
  virtual double f_prime(double s) const = 0;

  /// Zero extension: f(s) for s >= 0, 0 for s < 0.
  double f_hat(double s) const { return s < 0 ? 0.0 : f(s); }

  /// f_hat(1 + w). Overridden where a cancellation-free form exists: the
  /// shooting machinery evaluates the nonlinearity at offsets |w| far below
  /// the rounding of 1 + w when chasing roots that hug the constant solution.
  virtual double f_hat_near_one(double w) const { return f_hat(1.0 + w); }

  /// Primitive F_hat(s) = int_1^s f_hat; non-negative, vanishing only at 1.
  virtual double F_hat(double s) const;

  /// C0 when known or estimated; empty when the (f_0) limit probes stay
  /// bounded but do not converge (the weaker hypothesis), in which case
  /// C0-dependent diagnostics are skipped.
  std::optional<double> C0() const { return c0_; }
  bool C0_estimated() const { return c0_estimated_; }

  /// Returns the C1 regime. Throws ClassificationError when the numeric limit
  /// probes disagree by more than 10% and no closed form is registered.
  C1Class classify_C1() const;

  std::string name() const { return name_; }

 protected:
  Nonlinearity(double p, std::string name) : p_(p), name_(std::move(name)) {}

  /// Runs the construction-time spot checks and fills C0 (probing it when no
  /// closed form was supplied). Must be called by every concrete constructor.
  void validate(std::optional<double> c0_closed, std::optional<C1Class> c1_closed);

  std::optional<C1Class> c1_closed_;

 private:
  double p_ = 2.0;
  std::string name_;
  std::optional<double> c0_;
  bool c0_estimated_ = false;
};

/// The prototype family f(s) = -s^{p-1} + s^{q-1}, q > p, with closed-form
/// primitive and constants C0 = 1 and C1 = 0 / q-2 / +inf for p < 2 / = 2 / > 2.
class PrototypeNonlinearity final : public Nonlinearity {
 public:
  PrototypeNonlinearity(double p, double q);

  double q() const { return q_; }
  double f(double s) const override;
  double f_prime(double s) const override;
  double F_hat(double s) const override;
  double f_hat_near_one(double w) const override;

 private:
  double q_;
};

/// User-supplied nonlinearity: f required, f' and the constants optional.
/// Missing constants are estimated by limit probes and flagged as estimated;
/// F_hat is computed by adaptive quadrature from 1, cached on a unit grid.
class CustomNonlinearity final : public Nonlinearity {
 public:
  struct Spec {
    std::function<double(double)> f;
    std::function<double(double)> f_prime;  // optional; else central differences
    std::optional<double> C0;
    std::optional<C1Class> C1;
    std::string name = "custom";
  };

  CustomNonlinearity(double p, Spec spec);

  double f(double s) const override;
  double f_prime(double s) const override;
  double F_hat(double s) const override;

 private:
  Spec spec_;
  std::vector<double> cache_;  // cumulative integrals on the grid, built once
};

/// Registry of named nonlinearity factories for the `plugin:<name>` config
/// syntax. Factories receive the exponent p.
using NonlinearityFactory =
    std::function<std::unique_ptr<Nonlinearity>(double p)>;
void register_nonlinearity(const std::string& name, NonlinearityFactory factory);
std::unique_ptr<Nonlinearity> make_plugin_nonlinearity(const std::string& name,
                                                       double p);

/// Radial domain: annulus R1 > 0 or ball R1 = 0, outer radius R2, dimension N.
struct RadialDomain {
  double R1 = 0.0;
  double R2 = 1.0;
  int N = 1;

  RadialDomain(double r1, double r2, int n);
  bool is_ball() const { return R1 == 0.0; }
  double width() const { return R2 - R1; }
};

}  // namespace pshoot
