#pragma once

// Slow reference implementations for verification. Not used by fitting.

#include <Eigen/Dense>

#include <cstdint>

#include "lacount/model.hpp"

namespace lacount::oracle {

/// Dense latent grid [lo, hi] with m points, trapezoid weights.
struct GridSpec {
  double lo = -1.0;
  double hi = 1.0;
  int m = 400;

  /// Symmetric grid covering +-half_width_sd standard deviations of the
  /// stationary latent law.
  static GridSpec covering(const Params& p, int m = 400, double half_width_sd = 8.0);
  void validate() const;
};

/**
 * Full log-likelihood by the predictive-density (filtering) recursion on a
 * dense grid. Test scale only: n <= 50 and |phi| <= 0.6. Throws NumericalError
 * when a predictive density loses more than 1e-4 of its mass on the grid.
 */
double full_loglik_filter(const CountSeries& series, const Params& p,
                          const GridSpec& grid);

struct McEstimate {
  double estimate = 0.0;
  double se = 0.0;
};

/// Monte Carlo estimate of p(y1, y2) for observations `lag` apart.
McEstimate mc_pair_density(int y1, int y2, const Eigen::Ref<const Eigen::VectorXd>& x1,
                           const Eigen::Ref<const Eigen::VectorXd>& x2, int lag,
                           const Params& p, long n_draws, std::uint64_t seed);

/// Monte Carlo estimate of the full likelihood (the n-fold integral) by
/// averaging prod_t Pois(y_t | u_t) over simulated latent paths.
McEstimate mc_full_likelihood(const CountSeries& series, const Params& p, long n_draws,
                              std::uint64_t seed);

}  // namespace lacount::oracle
