#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace lacount {

/**
 * Gauss-Hermite rule for the weight function exp(-x^2) (physicists'
 * convention). Nodes are sorted increasingly and symmetric about zero; the
 * weights sum to sqrt(pi).
 */
struct QuadRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  /// Integral of f(x) exp(-x^2) over the real line.
  [[nodiscard]] double integrate(const std::function<double(double)>& f) const;

  /// Expectation of f(Z), Z ~ N(0, variance).
  [[nodiscard]] double expect_normal(const std::function<double(double)>& f,
                                     double variance) const;
};

/// Order-point Gauss-Hermite rule, 1 <= order <= 100.
QuadRule gauss_hermite(int order);

/// Process-wide immutable cache of `gauss_hermite(order)`.
const QuadRule& cached_gauss_hermite(int order);

/**
 * Tensor-product Hermite rule mapped onto the bivariate normal law with
 * covariance tau2 * [[1, rho], [rho, 1]].
 *
 * Point (j, k) is stored at index j * order + k and equals sqrt(2) L (x_j, x_k)
 * with L the lower Cholesky factor, i.e.
 *   u = a x_j,  v = a (rho x_j + c x_k),  a = sqrt(2 tau2), c = sqrt(1 - rho^2).
 * Weights are w_j w_k / pi and sum to one.
 */
struct BivariateRule {
  int order = 0;
  double tau2 = 0.0;
  double rho = 0.0;
  double scale = 0.0;       // a = sqrt(2 tau2)
  double complement = 1.0;  // c = sqrt(1 - rho^2)
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> weights;
  std::vector<double> log_weights;

  /// Recomputes the mapped points in place; reuses storage when the order
  /// is unchanged.
  void reset(const QuadRule& rule, double tau2, double rho);

  /// E[f(u, v)] under the bivariate normal law.
  [[nodiscard]] double expect(
      const std::function<double(double, double)>& f) const;

  [[nodiscard]] std::size_t size() const noexcept { return u.size(); }
};

BivariateRule bivariate_normal_rule(const QuadRule& rule, double tau2,
                                    double rho);

}  // namespace lacount
