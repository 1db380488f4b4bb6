#pragma once

#include <memory>
#include <vector>

namespace pshoot {

struct CosSinP {
  double c;  // cos_p(theta)
  double s;  // sin_p(theta)
};

/// Exponent context for the p-Laplacian: the exponent p, its conjugate p'
/// (1/p + 1/p' = 1), the half-period pi_p of the generalized trigonometric
/// pair, and a tabulated evaluator for (cos_p, sin_p).
///
/// (cos_p, sin_p) is the solution of  x' = -phi_{p'}(y), y' = phi_p(x),
/// x(0) = 1, y(0) = 0.  It satisfies |x|^p/p + |y|^{p'}/p' = 1/p identically,
/// is 2*pi_p periodic, cos_p is even, sin_p odd, and both flip sign under a
/// pi_p shift; cos_p vanishes exactly at pi_p/2 + k*pi_p and sin_p at k*pi_p.
///
/// The pair is tabulated once, on the quarter period [0, pi_p/2], by adaptive
/// integration of the defining system with a projection onto the invariant
/// |x|^p + (p-1)|y|^{p'} = 1 at every stored node; all other arguments are
/// reached through the symmetries above, and evaluation between nodes uses
/// cubic Hermite interpolation with the exact derivatives
/// cos_p' = -phi_{p'}(sin_p), sin_p' = phi_p(cos_p), followed by the same
/// projection. Periodicity and the zero sets are exact by construction.
///
/// Instances are immutable after construction; copies share the table.
/// Every operation is pure and safe for concurrent use.
class PContext {
 public:
  /// Requires p > 1 (throws std::domain_error otherwise). `quarter_nodes`
  /// is the number of table intervals per quarter period; nodes are
  /// clustered toward both quarter ends, where higher derivatives of the
  /// pair degenerate for p != 2.
  explicit PContext(double p, int quarter_nodes = 4096);

  double p() const { return p_; }
  double p_conj() const { return p_conj_; }
  double pi_p() const { return pi_p_; }

  /// phi_p(s) = |s|^{p-2} s, with the continuous value 0 at s = 0.
  double phi(double s) const { return phi_pow(s, p_); }
  /// phi_p^{-1} = phi_{p'}.
  double phi_inv(double s) const { return phi_pow(s, p_conj_); }

  CosSinP cos_sin(double theta) const;

  /// The p-polar angle in [0, 2*pi_p) of a state (x, y) written as
  /// x = rho^{2/p} cos_p(theta), y = -rho^{2/p'} sin_p(theta).
  /// Requires (x, y) != (0, 0).
  double theta_from_state(double x, double y) const;

  /// rho^2 = |x|^p + (p-1) |y|^{p'} of the same polar representation.
  double rho_squared(double x, double y) const;

  /// Monotone inverse of cos_p on [0, pi_p]: returns theta with
  /// cos_p(theta) = c for c in [-1, 1].
  double arccos_p(double c) const;

  int quarter_nodes() const;

  /// |s|^{e-1} sign(s): the power map phi_e for arbitrary exponent e > 1.
  static double phi_pow(double s, double e);

 private:
  struct Table;

  double p_;
  double p_conj_;
  double pi_p_;
  std::shared_ptr<const Table> table_;

  void eval_quarter(double t, double& x, double& y) const;
};

}  // namespace pshoot
