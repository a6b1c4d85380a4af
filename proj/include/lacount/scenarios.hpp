#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lacount/estimation.hpp"
#include "lacount/model.hpp"

namespace lacount {

/// Intercept-only simulation design: dispersion index D, log-mean beta,
/// latent autocorrelation phi, innovation sd sigma, stationary variance tau2.
struct Scenario {
  int id;
  double D;
  double beta;
  double phi;
  double sigma;
  double tau2;

  [[nodiscard]] Params params() const;
};

/// The nine reference designs (ids 1..9).
const std::array<Scenario, 9>& scenario_table();
const Scenario& scenario(int id);

struct ReplicateSpec {
  Params truth;            // sigma2 = 0 gives pure Poisson GLM data
  int n_series = 100;
  int n_len = 500;
  std::uint64_t seed = 1;  // replicate r uses stream (seed, r)
  int d = 1;
  WeightScheme scheme = WeightScheme::trapezoidal;
  int quad_order = 20;
  Restriction restriction = Restriction::none;
};

struct ReplicateFit {
  int replicate = 0;
  bool ok = false;  // fit finished without throwing
  bool converged = false;
  bool singular = false;      // H singular: estimates kept, SEs and CLIC NaN
  Eigen::VectorXd estimates;  // (beta, sigma2, phi, tau2)
  Eigen::VectorXd se;
  double loglik = 0.0;
  double clic = 0.0;
  double trace_penalty = 0.0;
  double j_min_eigen = 0.0;
  double j_asymmetry = 0.0;
  std::string error;
};

/// Simulates `n_series` intercept-only series from `truth` and fits each.
/// Replicate datasets depend only on (truth, n_len, seed, r).
std::vector<ReplicateFit> run_replicates(const ReplicateSpec& spec);

struct ParamSummary {
  std::string name;
  double truth = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double median_bias = 0.0;
  double rmse = 0.0;
  double sd = 0.0;
  double mean_se = 0.0;
  int n_ok = 0;
  int n_se = 0;
};

/// Per-parameter summaries (beta, sigma2, phi, tau2) over fits that returned
/// estimates; `mean_se` averages finite SEs only.
std::vector<ParamSummary> summarize_replicates(const Params& truth,
                                               const std::vector<ReplicateFit>& fits);

}  // namespace lacount
