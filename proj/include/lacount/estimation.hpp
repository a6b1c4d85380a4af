#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lacount/model.hpp"
#include "lacount/optimizer.hpp"

namespace lacount {

/// Which parameters are estimated. `phi_zero` fixes phi = 0; `independence`
/// drops the latent process (tau2 = 0) and leaves only beta free.
enum class Restriction { none, phi_zero, independence };

[[nodiscard]] std::string to_string(Restriction r);
/// Accepts "none", "phi0", "phi_zero", "indep", "independence".
[[nodiscard]] Restriction parse_restriction(std::string_view text);

struct GlmFit {
  Eigen::VectorXd beta;
  int iterations = 0;
  bool converged = false;
};

/// Poisson log-link GLM by iteratively reweighted least squares. Optional
/// per-observation weights multiply each log-likelihood term.
GlmFit poisson_glm(const Eigen::MatrixXd& X, std::span<const int> y,
                   std::span<const double> obs_weights = {});

/// Floor applied to the moment estimate of tau2.
inline constexpr double kMomentTau2Floor = 0.05;
/// Bound on |phi| for the moment estimate.
inline constexpr double kMomentPhiClamp = 0.95;

/**
 * Method-of-moments starting values: Poisson GLM for the marginal mean,
 * excess variance for tau2, inverted lag-1 autocovariance for phi. The
 * intercept (if the first design column is constant one) is shifted by
 * -tau2/2 so that exp(x'beta + tau2/2) reproduces the GLM mean.
 */
Params moment_init(const CountSeries& series);

/// floor(10 log10 n).
int default_hac_lags(int n);

struct FitOptions {
  int quad_order = 20;
  Restriction restriction = Restriction::none;
  std::optional<Params> init;
  std::optional<int> hac_lags;
  BfgsOptions optimizer;
  /// Return estimates with NaN SEs and CLIC when H is singular (e.g. the
  /// latent variance collapsed to zero) instead of throwing.
  bool allow_singular_H = false;
};

struct FitResult {
  Params params_hat;
  WorkingParams working_hat;
  Restriction restriction = Restriction::none;
  std::vector<int> free;  // indices of estimated working coordinates

  double loglik = 0.0;
  // Matrices live on the free working coordinates.
  Eigen::MatrixXd H_hat;
  Eigen::MatrixXd J_hat;
  Eigen::MatrixXd godambe;       // empty when J_hat is singular
  Eigen::MatrixXd avar_working;  // H^-1 J H^-1 / n
  Eigen::VectorXd se;            // (beta, sigma2, phi, tau2); 0 where fixed
  double trace_penalty = 0.0;    // trace(H^-1 J)
  bool singular_H = false;       // only with allow_singular_H
  double h_condition = 0.0;      // equilibrated condition number of H
  double clic = 0.0;
  int hac_lags = 0;

  int n = 0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string message;
  int quad_order = 0;
  PairWeights weights;

  /// Estimates on the reporting scale (beta, sigma2, phi, tau2).
  [[nodiscard]] Eigen::VectorXd estimates() const;
};

/// Outer-product sensitivity (1/n) sum_{t,i} w_i g_{t,i} g_{t,i}'.
Eigen::MatrixXd sensitivity_H(const PairwiseLikelihood::Scores& scores, int n);
Eigen::MatrixXd sensitivity_H(const CountSeries& series, const WorkingParams& theta,
                              const PairWeights& weights, const QuadRule& rule);

/// Bartlett-kernel HAC estimate from the per-time scores psi_t (rows).
/// Lags with zero kernel weight are skipped; r <= 1 keeps only lag 0.
Eigen::MatrixXd variability_J(const Eigen::MatrixXd& per_time, int n, int r);
Eigen::MatrixXd variability_J(const CountSeries& series, const WorkingParams& theta,
                              const PairWeights& weights, const QuadRule& rule,
                              std::optional<int> r = std::nullopt);

/// Inverse of a symmetric positive definite matrix after diagonal
/// equilibration. Throws SingularMatrixError when the equilibrated
/// condition number exceeds 1e12.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m);
/// max/min eigenvalue of D m D with D = diag(m)^-1/2; inf if not PD.
double equilibrated_condition(const Eigen::MatrixXd& m);

/// Jacobian of (beta, sigma2, phi, tau2) with respect to the working vector.
Eigen::MatrixXd reporting_jacobian(const WorkingParams& w);

/// Robust standard errors on the reporting scale for a full (unrestricted)
/// parameter vector: sqrt(diag(D H^-1 J H^-1 D') / n).
Eigen::VectorXd robust_se(const Eigen::MatrixXd& H, const Eigen::MatrixXd& J, int n,
                          const WorkingParams& theta_hat);

/// -2 loglik + 2 trace(H^-1 J).
double clic(double loglik, const Eigen::MatrixXd& H, const Eigen::MatrixXd& J);
double clic(const FitResult& fit);

FitResult fit(const CountSeries& series, const PairWeights& weights,
              const FitOptions& options = {});

FitResult fit_restricted(const CountSeries& series, const PairWeights& weights,
                         int quad_order, Restriction restriction);

}  // namespace lacount
