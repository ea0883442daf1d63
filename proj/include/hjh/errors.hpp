#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hjh {

// Malformed experiment description or invalid numeric parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CflViolation : public std::runtime_error {
 public:
  CflViolation(double requested, double allowed);
  double requested() const noexcept { return requested_; }
  double required() const noexcept { return allowed_; }

 private:
  double requested_;
  double allowed_;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, std::vector<double> residual_history);
  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

// The Legendre maximizer sits on the edge of the p-lattice.
class BoundaryAttainment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hjh
