#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

#include "lacount/estimation.hpp"
#include "lacount/model.hpp"

namespace lacount {

struct SimConfig {
  Params params;      // sigma2 = 0 is allowed here (no latent noise)
  Eigen::MatrixXd X;  // rows define the horizon
  int n_rep = 1;
  std::uint64_t seed = 0;
};

/// Independent random stream for replicate `replicate` of run `seed`.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t replicate);

/// Stationary latent AR(1) path: u_0 ~ N(0, tau2), u_t = phi u_{t-1} + eps_t.
std::vector<double> simulate_latent(const Params& p, int length, std::mt19937_64& rng);

/// One replicate; identical (config, replicate) always yields identical counts.
CountSeries simulate_series(const SimConfig& config, int replicate = 0);

/// All `config.n_rep` replicates, in replicate order.
std::vector<CountSeries> simulate_replicates(const SimConfig& config);

struct PredictionBand {
  std::vector<double> point;  // mean of simulated counts
  std::vector<int> upper;     // nearest-rank quantile at `level`
  double level = 0.95;
  int n_sim = 0;
};

/// ceil(level * n)-th smallest value (nearest-rank). Reorders `values`.
int nearest_rank_quantile(std::vector<int>& values, double level);

/**
 * Simulation-based prediction: n_sim latent paths drawn unconditionally from
 * the stationary model over all rows of X, Poisson counts on top. Returns
 * per-row mean and upper quantile.
 */
PredictionBand predict(const Params& params, const Eigen::MatrixXd& X, int n_sim = 10000,
                       std::uint64_t seed = 0, double level = 0.95);

/// As above; refuses fits that did not converge.
PredictionBand predict(const FitResult& fit, const Eigen::MatrixXd& X, int n_sim = 10000,
                       std::uint64_t seed = 0, double level = 0.95);

}  // namespace lacount
