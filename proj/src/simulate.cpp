#include "lacount/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lacount {

namespace {

void check_sim_params(const Params& p) {
  if (!(p.sigma2 >= 0.0) || !std::isfinite(p.sigma2)) {
    throw std::invalid_argument("simulate: sigma2 must be finite and >= 0");
  }
  if (!(std::abs(p.phi) < 1.0)) throw std::invalid_argument("simulate: |phi| must be < 1");
  if (p.beta.size() == 0 || !p.beta.allFinite()) {
    throw std::invalid_argument("simulate: beta must be non-empty and finite");
  }
}

int draw_poisson(double mean, std::mt19937_64& rng) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<int> pois(mean);
  return pois(rng);
}

}  // namespace

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate),
                    static_cast<std::uint32_t>(replicate >> 32), 0x6c61u};
  return std::mt19937_64(seq);
}

std::vector<double> simulate_latent(const Params& p, int length, std::mt19937_64& rng) {
  check_sim_params(p);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> u(std::max(length, 0));
  const double tau = std::sqrt(p.tau2());
  const double sigma = std::sqrt(p.sigma2);
  for (int t = 0; t < length; ++t) {
    const double z = normal(rng);
    u[t] = t == 0 ? tau * z : p.phi * u[t - 1] + sigma * z;
  }
  return u;
}

CountSeries simulate_series(const SimConfig& config, int replicate) {
  check_sim_params(config.params);
  if (config.X.cols() != config.params.beta.size()) {
    throw std::invalid_argument("simulate: X has " + std::to_string(config.X.cols()) +
                                " columns for " +
                                std::to_string(config.params.beta.size()) + " coefficients");
  }
  const int n = static_cast<int>(config.X.rows());
  auto rng = make_stream(config.seed, static_cast<std::uint64_t>(replicate));
  const std::vector<double> u = simulate_latent(config.params, n, rng);
  const Eigen::VectorXd eta = config.X * config.params.beta;
  CountSeries s;
  s.X = config.X;
  s.y.resize(n);
  for (int t = 0; t < n; ++t) s.y[t] = draw_poisson(std::exp(eta[t] + u[t]), rng);
  return s;
}

std::vector<CountSeries> simulate_replicates(const SimConfig& config) {
  if (config.n_rep < 1) throw std::invalid_argument("simulate: n_rep must be >= 1");
  std::vector<CountSeries> out;
  out.reserve(config.n_rep);
  for (int r = 0; r < config.n_rep; ++r) out.push_back(simulate_series(config, r));
  return out;
}

int nearest_rank_quantile(std::vector<int>& values, double level) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(level > 0.0 && level <= 1.0)) {
    throw std::invalid_argument("quantile level must be in (0, 1]");
  }
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[rank - 1];
}

PredictionBand predict(const Params& params, const Eigen::MatrixXd& X, int n_sim,
                       std::uint64_t seed, double level) {
  if (n_sim < 1) throw std::invalid_argument("predict: n_sim must be >= 1");
  SimConfig cfg{params, X, n_sim, seed};
  const int horizon = static_cast<int>(X.rows());
  std::vector<std::vector<int>> draws(horizon, std::vector<int>(n_sim));
  for (int s = 0; s < n_sim; ++s) {
    const CountSeries path = simulate_series(cfg, s);
    for (int t = 0; t < horizon; ++t) draws[t][s] = path.y[t];
  }
  PredictionBand band;
  band.level = level;
  band.n_sim = n_sim;
  band.point.resize(horizon);
  band.upper.resize(horizon);
  for (int t = 0; t < horizon; ++t) {
    double sum = 0.0;
    for (int v : draws[t]) sum += v;
    band.point[t] = sum / n_sim;
    band.upper[t] = nearest_rank_quantile(draws[t], level);
  }
  return band;
}

PredictionBand predict(const FitResult& fit, const Eigen::MatrixXd& X, int n_sim,
                       std::uint64_t seed, double level) {
  if (!fit.converged) {
    throw std::invalid_argument("predict: refusing a fit that did not converge (" +
                                fit.message + ")");
  }
  return predict(fit.params_hat, X, n_sim, seed, level);
}

}  // namespace lacount
