#include "lacount/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lacount {

namespace {

constexpr int kMaxOrder = 100;

// Orthonormal Hermite polynomials p_0..p_{n} at x (weight exp(-x^2)).
// Returns {p_n(x), p_{n-1}(x), sum_{k<n} p_k(x)^2}.
struct HermiteEval {
  double pn;
  double pn1;
  double christoffel_sum;
};

HermiteEval eval_orthonormal(int n, double x) {
  double prev = 0.0;
  double cur = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    sum += cur * cur;
    const double next = std::sqrt(2.0 / (k + 1)) * x * cur -
                        std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return {cur, prev, sum};
}

}  // namespace

double QuadRule::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (int j = 0; j < order; ++j) s += weights[j] * f(nodes[j]);
  return s;
}

double QuadRule::expect_normal(const std::function<double(double)>& f,
                               double variance) const {
  const double a = std::sqrt(2.0 * variance);
  double s = 0.0;
  for (int j = 0; j < order; ++j) s += weights[j] * f(a * nodes[j]);
  return s / std::sqrt(std::numbers::pi);
}

QuadRule gauss_hermite(int order) {
  if (order < 1 || order > kMaxOrder) {
    throw std::invalid_argument("gauss_hermite: order must be in [1, 100], got " +
                                std::to_string(order));
  }
  QuadRule rule;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);

  // Golub-Welsch: eigenvalues of the symmetric Jacobi matrix.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(std::max(order - 1, 0));
  for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("gauss_hermite: Jacobi eigen-decomposition failed");
  }
  const Eigen::VectorXd& eig = solver.eigenvalues();

  // Newton polish of each node, then Christoffel weights. The eigenvector
  // route loses relative accuracy on the tiny tail weights.
  for (int j = 0; j < order; ++j) {
    double x = eig[j];
    for (int it = 0; it < 3; ++it) {
      const HermiteEval h = eval_orthonormal(order, x);
      const double deriv = std::sqrt(2.0 * order) * h.pn1;
      if (deriv == 0.0) break;
      const double step = h.pn / deriv;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    rule.nodes[j] = x;
    rule.weights[j] = 1.0 / eval_orthonormal(order, x).christoffel_sum;
  }

  for (int j = 0; j < order / 2; ++j) {
    const int m = order - 1 - j;
    const double x = 0.5 * (rule.nodes[m] - rule.nodes[j]);
    const double w = 0.5 * (rule.weights[m] + rule.weights[j]);
    rule.nodes[j] = -x;
    rule.nodes[m] = x;
    rule.weights[j] = w;
    rule.weights[m] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

const QuadRule& cached_gauss_hermite(int order) {
  if (order < 1 || order > kMaxOrder) {
    throw std::invalid_argument("gauss_hermite: order must be in [1, 100], got " +
                                std::to_string(order));
  }
  static std::array<std::unique_ptr<const QuadRule>, kMaxOrder + 1> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<const QuadRule>(gauss_hermite(order));
  return *slot;
}

void BivariateRule::reset(const QuadRule& rule, double tau2_in, double rho_in) {
  if (!(tau2_in >= 0.0) || !std::isfinite(tau2_in)) {
    throw std::invalid_argument("bivariate_normal_rule: tau2 must be finite and >= 0");
  }
  if (!(std::abs(rho_in) < 1.0)) {
    throw std::invalid_argument("bivariate_normal_rule: |rho| must be < 1");
  }
  const int n = rule.order;
  const auto nn = static_cast<std::size_t>(n) * n;
  if (order != n) {
    order = n;
    u.resize(nn);
    v.resize(nn);
    weights.resize(nn);
    log_weights.resize(nn);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double w = rule.weights[j] * rule.weights[k] / std::numbers::pi;
        weights[j * n + k] = w;
        log_weights[j * n + k] = std::log(w);
      }
    }
  }
  tau2 = tau2_in;
  rho = rho_in;
  scale = std::sqrt(2.0 * tau2);
  complement = std::sqrt((1.0 - rho) * (1.0 + rho));
  for (int j = 0; j < n; ++j) {
    const double uj = scale * rule.nodes[j];
    const double base = rho * uj;
    for (int k = 0; k < n; ++k) {
      u[j * n + k] = uj;
      v[j * n + k] = base + scale * complement * rule.nodes[k];
    }
  }
}

double BivariateRule::expect(
    const std::function<double(double, double)>& f) const {
  double s = 0.0;
  for (std::size_t q = 0; q < u.size(); ++q) s += weights[q] * f(u[q], v[q]);
  return s;
}

BivariateRule bivariate_normal_rule(const QuadRule& rule, double tau2,
                                    double rho) {
  if (!(tau2 > 0.0)) {
    throw std::invalid_argument("bivariate_normal_rule: tau2 must be > 0");
  }
  BivariateRule out;
  out.reset(rule, tau2, rho);
  return out;
}

}  // namespace lacount
