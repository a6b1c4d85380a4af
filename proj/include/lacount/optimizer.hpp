#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace lacount {

/// Objective for minimization: returns f(x) and writes the gradient when
/// `grad` is non-null. Throwing NumericalError marks x as infeasible.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct BfgsOptions {
  int max_iter = 500;
  double rel_tol = 1e-6;         // relative decrease of f
  double grad_tol = 1e-6;        // ||g||_inf alone is enough
  double loose_grad_tol = 1e-3;  // ||g||_inf bound that goes with rel_tol
  double max_step = 5.0;    // cap on ||step||_inf per iteration
  double c1 = 1e-4;
  double c2 = 0.9;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd grad;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string message;
};

/// Quasi-Newton minimization with inverse-Hessian BFGS updates and a
/// strong-Wolfe line search.
BfgsResult minimize_bfgs(const Objective& objective, Eigen::VectorXd x0,
                         const BfgsOptions& options = {});

}  // namespace lacount
