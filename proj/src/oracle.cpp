#include "lacount/oracle.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lacount/errors.hpp"
#include "lacount/simulate.hpp"

namespace lacount::oracle {

namespace {

double normal_pdf(double x, double sd) {
  const double z = x / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

McEstimate summarize(double sum, double sum_sq, long n) {
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

}  // namespace

GridSpec GridSpec::covering(const Params& p, int m, double half_width_sd) {
  const double half = half_width_sd * std::sqrt(p.tau2());
  return {-half, half, m};
}

void GridSpec::validate() const {
  if (!(lo < hi)) throw std::invalid_argument("grid: lo must be < hi");
  if (m < 200) throw std::invalid_argument("grid: need at least 200 points");
}

double full_loglik_filter(const CountSeries& series, const Params& p,
                          const GridSpec& grid) {
  p.validate();
  grid.validate();
  const int n = series.size();
  if (n < 1 || n > 50) throw std::invalid_argument("full_loglik_filter: need 1 <= n <= 50");
  if (std::abs(p.phi) > 0.6) {
    throw std::invalid_argument("full_loglik_filter: |phi| must be <= 0.6");
  }
  if (series.X.rows() != n || series.X.cols() != p.beta.size()) {
    throw std::invalid_argument("full_loglik_filter: design does not match parameters");
  }
  const double tau = std::sqrt(p.tau2());
  if (grid.lo > -7.0 * tau || grid.hi < 7.0 * tau) {
    throw std::invalid_argument("full_loglik_filter: grid must cover the latent law");
  }

  const int m = grid.m;
  const double h = (grid.hi - grid.lo) / (m - 1);
  Eigen::VectorXd u(m), omega(m);
  for (int k = 0; k < m; ++k) {
    u[k] = grid.lo + k * h;
    omega[k] = (k == 0 || k == m - 1) ? 0.5 * h : h;
  }
  // kernel(k, l) = omega_l N(u_k; phi u_l, sigma2)
  const double sigma = std::sqrt(p.sigma2);
  Eigen::MatrixXd kernel(m, m);
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < m; ++l) kernel(k, l) = omega[l] * normal_pdf(u[k] - p.phi * u[l], sigma);
  }

  Eigen::VectorXd pred(m);
  for (int k = 0; k < m; ++k) pred[k] = normal_pdf(u[k], tau);
  const Eigen::VectorXd eta = series.X * p.beta;

  double loglik = 0.0;
  Eigen::VectorXd lp(m), filtered(m);
  for (int t = 0; t < n; ++t) {
    const double mass = omega.dot(pred);
    if (std::abs(mass - 1.0) > 1e-4) {
      throw NumericalError("filter grid too coarse: predictive mass " +
                               std::to_string(mass) + " at t=" + std::to_string(t),
                           t);
    }
    for (int k = 0; k < m; ++k) lp[k] = poisson_log_pmf(series.y[t], eta[t] + u[k]);
    const double top = lp.maxCoeff();
    double s = 0.0;
    for (int k = 0; k < m; ++k) {
      filtered[k] = pred[k] * std::exp(lp[k] - top);
      s += omega[k] * filtered[k];
    }
    if (!(s > 0.0)) throw NumericalError("filter underflow at t=" + std::to_string(t), t);
    loglik += top + std::log(s);
    filtered /= s;
    if (t + 1 < n) pred = kernel * filtered;
  }
  return loglik;
}

McEstimate mc_pair_density(int y1, int y2, const Eigen::Ref<const Eigen::VectorXd>& x1,
                           const Eigen::Ref<const Eigen::VectorXd>& x2, int lag,
                           const Params& p, long n_draws, std::uint64_t seed) {
  p.validate();
  if (lag < 1) throw std::invalid_argument("mc_pair_density: lag must be >= 1");
  if (n_draws < 100000) throw std::invalid_argument("mc_pair_density: need >= 1e5 draws");
  const double tau = std::sqrt(p.tau2());
  const double rho = std::pow(p.phi, lag);
  const double c = std::sqrt((1.0 - rho) * (1.0 + rho));
  const double eta1 = x1.dot(p.beta), eta2 = x2.dot(p.beta);
  auto rng = make_stream(seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  double sum = 0.0, sum_sq = 0.0;
  for (long r = 0; r < n_draws; ++r) {
    const double z1 = normal(rng);
    const double z2 = normal(rng);
    const double u = tau * z1;
    const double v = tau * (rho * z1 + c * z2);
    const double val =
        std::exp(poisson_log_pmf(y1, eta1 + u) + poisson_log_pmf(y2, eta2 + v));
    sum += val;
    sum_sq += val * val;
  }
  return summarize(sum, sum_sq, n_draws);
}

McEstimate mc_full_likelihood(const CountSeries& series, const Params& p, long n_draws,
                              std::uint64_t seed) {
  p.validate();
  if (n_draws < 2) throw std::invalid_argument("mc_full_likelihood: need >= 2 draws");
  const int n = series.size();
  const Eigen::VectorXd eta = series.X * p.beta;
  auto rng = make_stream(seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double tau = std::sqrt(p.tau2());
  const double sigma = std::sqrt(p.sigma2);
  double sum = 0.0, sum_sq = 0.0;
  for (long r = 0; r < n_draws; ++r) {
    double u = 0.0, lp = 0.0;
    for (int t = 0; t < n; ++t) {
      const double z = normal(rng);
      u = t == 0 ? tau * z : p.phi * u + sigma * z;
      lp += poisson_log_pmf(series.y[t], eta[t] + u);
    }
    const double val = std::exp(lp);
    sum += val;
    sum_sq += val * val;
  }
  return summarize(sum, sum_sq, n_draws);
}

}  // namespace lacount::oracle
