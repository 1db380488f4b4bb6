#pragma once

#include <stdexcept>
#include <string>

namespace pshoot {

/// Base class for failures of the numerical machinery (as opposed to
/// invalid arguments, which throw std::invalid_argument / std::domain_error).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// The adaptive integrator stalled: the step size collapsed below the
/// representable floor. Carries the radius and a state snapshot in the message.
class StepSizeUnderflow : public SolverError {
 public:
  explicit StepSizeUnderflow(const std::string& what) : SolverError(what) {}
};

/// A structural invariant of the flow (energy monotonicity, positive
/// amplitude) failed beyond tolerance. Signals a solver-configuration
/// problem, not a mathematical one.
class InvariantBreach : public SolverError {
 public:
  explicit InvariantBreach(const std::string& what) : SolverError(what) {}
};

/// Eigenvalue bracketing exceeded the hard lambda ceiling without crossing
/// the target angle: almost certainly a domain/configuration error.
class BracketOverflow : public SolverError {
 public:
  explicit BracketOverflow(const std::string& what) : SolverError(what) {}
};

/// Numeric limit probes for C0/C1 disagree and no closed form is registered.
class ClassificationError : public SolverError {
 public:
  explicit ClassificationError(const std::string& what) : SolverError(what) {}
};

/// Asked to plot/serialize an empty selection of points.
class EmptySelection : public std::runtime_error {
 public:
  explicit EmptySelection(const std::string& what) : std::runtime_error(what) {}
};

/// Config file / CLI parameter rejected; message carries the key (and line).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pshoot
