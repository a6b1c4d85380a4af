#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

#include "lacount/calendar.hpp"
#include "lacount/quadrature.hpp"

namespace lacount {

/**
 * Latent AR(1) Poisson model parameters on the natural scale:
 *   u_t = phi u_{t-1} + eps_t,  eps_t ~ N(0, sigma2),
 *   y_t | u_t ~ Poisson(exp(x_t' beta + u_t)).
 */
struct Params {
  Eigen::VectorXd beta;
  double sigma2 = 1.0;
  double phi = 0.0;

  /// Stationary latent variance sigma2 / (1 - phi^2).
  [[nodiscard]] double tau2() const noexcept {
    return sigma2 / ((1.0 - phi) * (1.0 + phi));
  }

  /// Throws std::invalid_argument unless sigma2 > 0, |phi| < 1, beta finite.
  void validate() const;
};

/// Unconstrained optimization surface: (beta, log sigma2, atanh phi).
struct WorkingParams {
  Eigen::VectorXd beta;
  double log_sigma2 = 0.0;
  double z_phi = 0.0;

  static WorkingParams from_params(const Params& p);
  static WorkingParams from_vector(const Eigen::Ref<const Eigen::VectorXd>& v);

  [[nodiscard]] Params to_params() const;
  [[nodiscard]] Eigen::VectorXd to_vector() const;
  [[nodiscard]] int size() const noexcept {
    return static_cast<int>(beta.size()) + 2;
  }
};

/// Observed counts with their design matrix (first column all ones).
struct CountSeries {
  std::vector<int> y;
  Eigen::MatrixXd X;
  std::vector<YearMonth> dates;  // optional labels, empty or size n

  static CountSeries intercept_only(std::vector<int> counts);

  [[nodiscard]] int size() const noexcept { return static_cast<int>(y.size()); }
  [[nodiscard]] int n_coef() const noexcept { return static_cast<int>(X.cols()); }

  /// Checks non-negative counts, matching row count and full column rank,
  /// and n > window.
  void validate(int window = 0) const;
};

enum class WeightScheme { rectangular, trapezoidal };

[[nodiscard]] std::string to_string(WeightScheme s);
/// Accepts "rect", "rectangular", "trap", "trapezoidal".
[[nodiscard]] WeightScheme parse_weight_scheme(std::string_view text);

/**
 * Normalized pair weights w_1..w_L of a pairwise likelihood of order d.
 *
 * `window` is m_d (d for rectangular, 2d for trapezoidal) and fixes where the
 * outer time sum starts. The trapezoidal weight at lag 2d is zero and is not
 * stored, so `lags()` is d or 2d - 1.
 */
struct PairWeights {
  int d = 1;
  WeightScheme scheme = WeightScheme::rectangular;
  int window = 1;
  std::vector<double> w;
  std::vector<double> unnormalized;

  [[nodiscard]] int lags() const noexcept { return static_cast<int>(w.size()); }
};

PairWeights make_weights(int d, WeightScheme scheme);

// Marginal moments of the observed process.
double marginal_mean(const Eigen::Ref<const Eigen::VectorXd>& x, const Params& p);
double marginal_var(const Eigen::Ref<const Eigen::VectorXd>& x, const Params& p);
double autocorrelation(int lag, const Eigen::Ref<const Eigen::VectorXd>& x_t,
                       const Eigen::Ref<const Eigen::VectorXd>& x_lagged,
                       const Params& p);
/// D_t = E(y_t) (exp(tau2) - 1).
double dispersion_index(const Eigen::Ref<const Eigen::VectorXd>& x, const Params& p);

/// log Poisson(y; exp(log_mean)), via lgamma.
double poisson_log_pmf(int y, double log_mean) noexcept;

/// Log of the Gauss-Hermite approximation of p(y1, y2) for two observations
/// `lag` steps apart. Throws NumericalError if every grid term underflows.
double pair_log_density(int y1, int y2, const Eigen::Ref<const Eigen::VectorXd>& x1,
                        const Eigen::Ref<const Eigen::VectorXd>& x2, int lag,
                        const Params& p, const QuadRule& rule);

/// Whether the latent process enters the pair densities. `none` pins
/// tau2 = 0 so that every pair density is a product of two Poisson pmfs.
enum class LatentMode { ar1, none };

/**
 * Weighted pairwise log-likelihood
 *   l_d(theta) = sum_{t = m_d}^{n-1} sum_{i=1}^{L} w_i log p(y_{t-i}, y_t)
 * (0-based t) together with its exact gradient on the working scale.
 *
 * Pair densities that share counts, lag and covariate rows are evaluated
 * once per call; sums are accumulated in fixed (t, i) order so results are
 * bit-reproducible.
 */
class PairwiseLikelihood {
 public:
  PairwiseLikelihood(CountSeries series, PairWeights weights, const QuadRule& rule);

  struct Value {
    double loglik = 0.0;
    Eigen::VectorXd score;  // empty unless requested
  };

  /// Per-pair score contributions g_{t,i} (unweighted rows, pair order) and
  /// per-time averaged scores psi_t = sum_i w_i g_{t,i} (row t - window).
  struct Scores {
    std::vector<int> t;
    std::vector<int> lag;
    std::vector<double> weight;
    Eigen::MatrixXd pair;
    Eigen::MatrixXd per_time;
  };

  [[nodiscard]] double loglik(const Params& p, LatentMode mode = LatentMode::ar1) const;
  [[nodiscard]] Value evaluate(const WorkingParams& w, bool with_score,
                               LatentMode mode = LatentMode::ar1) const;
  [[nodiscard]] Scores scores(const WorkingParams& w,
                              LatentMode mode = LatentMode::ar1) const;

  [[nodiscard]] const CountSeries& series() const noexcept { return series_; }
  [[nodiscard]] const PairWeights& weights() const noexcept { return weights_; }
  [[nodiscard]] const QuadRule& rule() const noexcept { return rule_; }
  [[nodiscard]] int dimension() const noexcept { return series_.n_coef() + 2; }
  [[nodiscard]] int n_pairs() const noexcept { return static_cast<int>(pairs_.size()); }
  [[nodiscard]] int n_unique_pairs() const noexcept {
    return static_cast<int>(keys_.size());
  }

 private:
  struct Pair {
    int t;
    int lag;
    int key;
  };
  struct Key {
    int y1, y2, lag, row1, row2;  // row1/row2 index representative X rows
    int t;                        // first occurrence, for diagnostics
    bool swapped;                 // counts swapped into canonical order
  };
  struct KeyEval {
    double logp, d_eta1, d_eta2, d_scale, d_rho;
  };

  std::vector<KeyEval> eval_keys(const Params& p, bool with_grad, LatentMode mode) const;
  Eigen::VectorXd chain(const KeyEval& e, const Pair& pr, const Params& p,
                        LatentMode mode) const;

  CountSeries series_;
  PairWeights weights_;
  QuadRule rule_;
  std::vector<int> row_class_;  // representative row per time point
  std::vector<Pair> pairs_;
  std::vector<Key> keys_;
};

double pairwise_loglik(const CountSeries& series, const Params& p,
                       const PairWeights& weights, const QuadRule& rule);

/// Gradient of pairwise_loglik with respect to (beta, log sigma2, atanh phi).
Eigen::VectorXd pairwise_score(const CountSeries& series, const WorkingParams& w,
                               const PairWeights& weights, const QuadRule& rule);

/// Averaged pairwise score psi_t for 0-based t in [window, n).
Eigen::VectorXd per_t_score(const CountSeries& series, int t, const WorkingParams& w,
                            const PairWeights& weights, const QuadRule& rule);

}  // namespace lacount
