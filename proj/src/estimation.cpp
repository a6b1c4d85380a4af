#include "lacount/estimation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lacount/errors.hpp"

namespace lacount {

std::string to_string(Restriction r) {
  switch (r) {
    case Restriction::none: return "none";
    case Restriction::phi_zero: return "phi0";
    case Restriction::independence: return "indep";
  }
  return "none";
}

Restriction parse_restriction(std::string_view text) {
  if (text == "none") return Restriction::none;
  if (text == "phi0" || text == "phi_zero") return Restriction::phi_zero;
  if (text == "indep" || text == "independence") return Restriction::independence;
  throw std::invalid_argument("unknown restriction '" + std::string(text) + "'");
}

GlmFit poisson_glm(const Eigen::MatrixXd& X, std::span<const int> y,
                   std::span<const double> obs_weights) {
  const auto n = X.rows();
  if (static_cast<std::size_t>(n) != y.size()) {
    throw std::invalid_argument("poisson_glm: X rows do not match y");
  }
  if (!obs_weights.empty() && obs_weights.size() != y.size()) {
    throw std::invalid_argument("poisson_glm: weight length does not match y");
  }
  auto obs_w = [&](Eigen::Index t) {
    return obs_weights.empty() ? 1.0 : obs_weights[t];
  };
  bool any_positive = false;
  for (Eigen::Index t = 0; t < n; ++t) any_positive |= (y[t] > 0 && obs_w(t) > 0);
  if (!any_positive) throw std::invalid_argument("poisson_glm: all counts are zero");

  GlmFit out;
  Eigen::VectorXd eta(n);
  for (Eigen::Index t = 0; t < n; ++t) eta[t] = std::log(y[t] + 0.1);
  out.beta = Eigen::VectorXd::Zero(X.cols());
  double dev_old = std::numeric_limits<double>::infinity();
  for (out.iterations = 1; out.iterations <= 100; ++out.iterations) {
    Eigen::VectorXd wts(n), z(n);
    for (Eigen::Index t = 0; t < n; ++t) {
      const double mu = std::exp(eta[t]);
      wts[t] = obs_w(t) * mu;
      z[t] = eta[t] + (y[t] - mu) / mu;
    }
    const Eigen::MatrixXd xtw = X.transpose() * wts.asDiagonal();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(xtw * X);
    if (ldlt.info() != Eigen::Success) {
      throw std::invalid_argument("poisson_glm: weighted normal equations are singular");
    }
    out.beta = ldlt.solve(xtw * z);
    eta = X * out.beta;
    double dev = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
      const double mu = std::exp(eta[t]);
      const double term = y[t] > 0 ? y[t] * std::log(y[t] / mu) : 0.0;
      dev += 2.0 * obs_w(t) * (term - (y[t] - mu));
    }
    if (std::abs(dev - dev_old) <= 1e-12 * (std::abs(dev) + 0.1)) {
      out.converged = true;
      break;
    }
    dev_old = dev;
  }
  return out;
}

Params moment_init(const CountSeries& series) {
  series.validate();
  const int n = series.size();
  if (n < 30) {
    throw std::invalid_argument("moment_init: need at least 30 observations, got " +
                                std::to_string(n));
  }
  const GlmFit glm = poisson_glm(series.X, series.y);
  const Eigen::VectorXd mu = (series.X * glm.beta).array().exp();

  double excess = 0.0, mu_sq = 0.0;
  for (int t = 0; t < n; ++t) {
    const double r = series.y[t] - mu[t];
    excess += r * r - mu[t];
    mu_sq += mu[t] * mu[t];
  }
  const double tau2 = std::max(kMomentTau2Floor, std::log1p(std::max(0.0, excess / mu_sq)));

  double c1 = 0.0;
  for (int t = 1; t < n; ++t) c1 += (series.y[t] - mu[t]) * (series.y[t - 1] - mu[t - 1]);
  c1 /= n;
  const double mu_bar = mu.mean();
  const double arg = 1.0 + c1 / (mu_bar * mu_bar);
  double phi = arg > 0.0 ? std::log(arg) / tau2 : -kMomentPhiClamp;
  phi = std::clamp(phi, -kMomentPhiClamp, kMomentPhiClamp);

  Params p;
  p.beta = glm.beta;
  if ((series.X.col(0).array() == 1.0).all()) p.beta[0] -= 0.5 * tau2;
  p.phi = phi;
  p.sigma2 = tau2 * (1.0 - phi) * (1.0 + phi);
  return p;
}

int default_hac_lags(int n) {
  if (n < 1) throw std::invalid_argument("default_hac_lags: n must be >= 1");
  return static_cast<int>(std::floor(10.0 * std::log10(static_cast<double>(n)) + 1e-12));
}

Eigen::VectorXd FitResult::estimates() const {
  const auto nb = params_hat.beta.size();
  Eigen::VectorXd v(nb + 3);
  v.head(nb) = params_hat.beta;
  v[nb] = params_hat.sigma2;
  v[nb + 1] = params_hat.phi;
  v[nb + 2] = params_hat.tau2();
  return v;
}

Eigen::MatrixXd sensitivity_H(const PairwiseLikelihood::Scores& scores, int n) {
  const auto dim = scores.pair.cols();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index r = 0; r < scores.pair.rows(); ++r) {
    h.selfadjointView<Eigen::Lower>().rankUpdate(scores.pair.row(r).transpose(),
                                                 scores.weight[r]);
  }
  h = h.selfadjointView<Eigen::Lower>();
  return h / n;
}

Eigen::MatrixXd sensitivity_H(const CountSeries& series, const WorkingParams& theta,
                              const PairWeights& weights, const QuadRule& rule) {
  PairwiseLikelihood pl(series, weights, rule);
  return sensitivity_H(pl.scores(theta), series.size());
}

Eigen::MatrixXd variability_J(const Eigen::MatrixXd& per_time, int n, int r) {
  if (r < 0) throw std::invalid_argument("variability_J: r must be >= 0");
  const auto m = per_time.rows();
  Eigen::MatrixXd j = per_time.transpose() * per_time;
  for (int k = 1; k < r && k < m; ++k) {
    const double bartlett = 1.0 - static_cast<double>(k) / r;
    const Eigen::MatrixXd gamma =
        per_time.topRows(m - k).transpose() * per_time.bottomRows(m - k);
    j += bartlett * (gamma + gamma.transpose());
  }
  return j / n;
}

Eigen::MatrixXd variability_J(const CountSeries& series, const WorkingParams& theta,
                              const PairWeights& weights, const QuadRule& rule,
                              std::optional<int> r) {
  PairwiseLikelihood pl(series, weights, rule);
  const int n = series.size();
  return variability_J(pl.scores(theta).per_time, n, r.value_or(default_hac_lags(n)));
}

namespace {

struct Equilibrated {
  Eigen::VectorXd d;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  double cond;
};

Equilibrated equilibrate(const Eigen::MatrixXd& m) {
  const auto k = m.rows();
  Eigen::VectorXd d(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(m(i, i) > 0.0) || !std::isfinite(m(i, i))) {
      return {d, {}, std::numeric_limits<double>::infinity()};
    }
    d[i] = 1.0 / std::sqrt(m(i, i));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d.asDiagonal() * m * d.asDiagonal());
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  return {d, eig, lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity()};
}

}  // namespace

double equilibrated_condition(const Eigen::MatrixXd& m) { return equilibrate(m).cond; }

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m) {
  const Equilibrated e = equilibrate(m);
  if (!(e.cond < 1e12)) {
    throw SingularMatrixError(
        "sensitivity matrix is singular (equilibrated condition number " +
            std::to_string(e.cond) + ")",
        e.cond);
  }
  const Eigen::MatrixXd inv = e.eig.eigenvectors() *
                              e.eig.eigenvalues().cwiseInverse().asDiagonal() *
                              e.eig.eigenvectors().transpose();
  return e.d.asDiagonal() * inv * e.d.asDiagonal();
}

Eigen::MatrixXd reporting_jacobian(const WorkingParams& w) {
  const auto nb = w.beta.size();
  const Params p = w.to_params();
  const double tau2 = p.tau2();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(nb + 3, nb + 2);
  jac.topLeftCorner(nb, nb).setIdentity();
  jac(nb, nb) = p.sigma2;
  jac(nb + 1, nb + 1) = (1.0 - p.phi) * (1.0 + p.phi);
  jac(nb + 2, nb) = tau2;
  jac(nb + 2, nb + 1) = 2.0 * tau2 * p.phi;
  return jac;
}

namespace {

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& m, const std::vector<int>& cols) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(c) = m.col(cols[c]);
  return out;
}

Eigen::VectorXd report_se(const Eigen::MatrixXd& avar, const WorkingParams& w,
                          const std::vector<int>& free) {
  const Eigen::MatrixXd jac = select_columns(reporting_jacobian(w), free);
  const Eigen::MatrixXd cov = jac * avar * jac.transpose();
  return cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

}  // namespace

Eigen::VectorXd robust_se(const Eigen::MatrixXd& H, const Eigen::MatrixXd& J, int n,
                          const WorkingParams& theta_hat) {
  if (H.rows() != theta_hat.size() || J.rows() != H.rows()) {
    throw std::invalid_argument("robust_se: matrix dimension does not match parameters");
  }
  const Eigen::MatrixXd hinv = spd_inverse(H);
  const Eigen::MatrixXd avar = hinv * J * hinv / n;
  std::vector<int> all(theta_hat.size());
  for (int i = 0; i < theta_hat.size(); ++i) all[i] = i;
  return report_se(avar, theta_hat, all);
}

double clic(double loglik, const Eigen::MatrixXd& H, const Eigen::MatrixXd& J) {
  return -2.0 * loglik + 2.0 * (spd_inverse(H) * J).trace();
}

double clic(const FitResult& fit) {
  if (!fit.converged) throw std::invalid_argument("clic: fit did not converge");
  return clic(fit.loglik, fit.H_hat, fit.J_hat);
}

FitResult fit(const CountSeries& series, const PairWeights& weights,
              const FitOptions& options) {
  const QuadRule& rule = cached_gauss_hermite(options.quad_order);
  const PairwiseLikelihood pl(series, weights, rule);
  const int nb = series.n_coef();
  const int n = series.size();
  const LatentMode mode = options.restriction == Restriction::independence
                              ? LatentMode::none
                              : LatentMode::ar1;

  Params start = options.init ? *options.init : moment_init(series);
  std::vector<int> free;
  for (int i = 0; i < nb; ++i) free.push_back(i);
  switch (options.restriction) {
    case Restriction::none:
      free.push_back(nb);
      free.push_back(nb + 1);
      break;
    case Restriction::phi_zero:
      free.push_back(nb);
      start.phi = 0.0;
      break;
    case Restriction::independence:
      if (!options.init) start.beta = poisson_glm(series.X, series.y).beta;
      start.sigma2 = 1.0;
      start.phi = 0.0;
      break;
  }
  const WorkingParams base = WorkingParams::from_params(start);
  const Eigen::VectorXd base_vec = base.to_vector();

  auto expand = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd full = base_vec;
    for (std::size_t i = 0; i < free.size(); ++i) full[free[i]] = x[i];
    return full;
  };
  const Objective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    const WorkingParams w = WorkingParams::from_vector(expand(x));
    // trial steps past |phi| = 1 or sigma2 in {0, inf} in floating point
    if (!(std::abs(std::tanh(w.z_phi)) < 1.0) || !(std::exp(w.log_sigma2) > 0.0) ||
        !std::isfinite(std::exp(w.log_sigma2))) {
      throw NumericalError("trial point outside the parameter space");
    }
    const auto value = pl.evaluate(w, grad != nullptr, mode);
    if (grad) {
      grad->resize(static_cast<Eigen::Index>(free.size()));
      for (std::size_t i = 0; i < free.size(); ++i) (*grad)[i] = -value.score[free[i]];
    }
    return -value.loglik;
  };

  Eigen::VectorXd x0(static_cast<Eigen::Index>(free.size()));
  for (std::size_t i = 0; i < free.size(); ++i) x0[i] = base_vec[free[i]];
  const BfgsResult opt = minimize_bfgs(objective, x0, options.optimizer);

  FitResult res;
  res.restriction = options.restriction;
  res.free = free;
  res.working_hat = WorkingParams::from_vector(expand(opt.x));
  res.params_hat = res.working_hat.to_params();
  if (options.restriction == Restriction::independence) {
    res.params_hat.sigma2 = 0.0;
    res.params_hat.phi = 0.0;
  }
  res.loglik = -opt.f;
  res.n = n;
  res.iterations = opt.iterations;
  res.evaluations = opt.evaluations;
  res.converged = opt.converged;
  res.message = opt.message;
  res.quad_order = options.quad_order;
  res.weights = weights;
  res.hac_lags = options.hac_lags.value_or(default_hac_lags(n));

  const auto scores = pl.scores(res.working_hat, mode);
  const Eigen::MatrixXd pair_free = select_columns(scores.pair, free);
  const Eigen::MatrixXd time_free = select_columns(scores.per_time, free);
  PairwiseLikelihood::Scores reduced{scores.t, scores.lag, scores.weight, pair_free,
                                     time_free};
  res.H_hat = sensitivity_H(reduced, n);
  res.J_hat = variability_J(time_free, n, res.hac_lags);

  res.h_condition = equilibrated_condition(res.H_hat);
  try {
    const Eigen::MatrixXd hinv = spd_inverse(res.H_hat);
    res.avar_working = hinv * res.J_hat * hinv / n;
    res.trace_penalty = (hinv * res.J_hat).trace();
    res.clic = -2.0 * res.loglik + 2.0 * res.trace_penalty;
    res.se = report_se(res.avar_working, res.working_hat, free);
  } catch (const SingularMatrixError& e) {
    if (!options.allow_singular_H) throw;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    res.singular_H = true;
    res.message += "; " + std::string(e.what());
    res.avar_working = Eigen::MatrixXd::Constant(res.H_hat.rows(), res.H_hat.cols(), nan);
    res.trace_penalty = nan;
    res.clic = nan;
    res.se = Eigen::VectorXd::Constant(nb + 3, nan);
  }

  Eigen::LDLT<Eigen::MatrixXd> jl(res.J_hat);
  if (jl.info() == Eigen::Success && jl.isPositive() &&
      jl.vectorD().minCoeff() > 1e-14 * jl.vectorD().maxCoeff()) {
    res.godambe = res.H_hat * jl.solve(res.H_hat);
  }
  return res;
}

FitResult fit_restricted(const CountSeries& series, const PairWeights& weights,
                         int quad_order, Restriction restriction) {
  FitOptions opt;
  opt.quad_order = quad_order;
  opt.restriction = restriction;
  return fit(series, weights, opt);
}

}  // namespace lacount
