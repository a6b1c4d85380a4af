#pragma once

#include <stdexcept>
#include <string>

namespace lacount {

/// Raised when a quadrature or filtering evaluation loses all numerical mass.
/// `t` and `lag` identify the offending pair (0-based time index), or -1.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, int t = -1, int lag = -1)
      : std::runtime_error(what), t_(t), lag_(lag) {}

  [[nodiscard]] int t() const noexcept { return t_; }
  [[nodiscard]] int lag() const noexcept { return lag_; }

 private:
  int t_;
  int lag_;
};

/// Raised when the sensitivity matrix cannot be inverted reliably.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, double condition_number)
      : std::runtime_error(what), condition_number_(condition_number) {}

  [[nodiscard]] double condition_number() const noexcept {
    return condition_number_;
  }

 private:
  double condition_number_;
};

}  // namespace lacount
