#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace flockstab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A decentralization constraint (weights summing to -1) does not hold.
class ConstraintViolation : public Error {
 public:
  ConstraintViolation(int agent, char channel, double residual)
      : Error(describe(agent, channel, residual)),
        agent_(agent),
        channel_(channel),
        residual_(residual) {}

  int agent() const noexcept { return agent_; }
  char channel() const noexcept { return channel_; }
  /// Weight sum minus the required -1.
  double residual() const noexcept { return residual_; }

 private:
  static std::string describe(int agent, char channel, double residual) {
    std::ostringstream os;
    os << "agent " << agent + 1 << ": rho_" << channel << " weights sum to " << -1.0 + residual
       << " instead of -1 (residual " << std::showpos << residual << ")";
    return os.str();
  }

  int agent_;
  char channel_;
  double residual_;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class WrongArrangement : public Error {
 public:
  using Error::Error;
};

class DegenerateLeadingCoefficient : public Error {
 public:
  using Error::Error;
};

/// State norm crossed the overflow guard during integration.
class BlowUp : public Error {
 public:
  explicit BlowUp(double time)
      : Error("trajectory blew up at t=" + std::to_string(time)), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class HypothesisViolated : public Error {
 public:
  using Error::Error;
};

class BranchAmbiguity : public Error {
 public:
  using Error::Error;
};

/// Malformed input document.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace flockstab
