#include "lacount/model.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

#include "lacount/errors.hpp"

namespace lacount {

namespace {

struct KernelOut {
  double logp;
  double d_eta1;
  double d_eta2;
  double d_scale;
  double d_rho;
};

// Log-sum-exp over the transformed Hermite grid. Derivatives are taken with
// respect to the two linear predictors, the grid scale a = sqrt(2 tau2) and
// the lag correlation rho, holding the Hermite nodes fixed.
KernelOut pair_kernel(int y1, int y2, double eta1, double eta2,
                      const BivariateRule& br, const std::vector<double>& nodes,
                      bool with_grad, std::vector<double>& work, int t, int lag) {
  const int n = br.order;
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  work.resize(2 * nn);
  double* term = work.data();
  double* lam2 = work.data() + nn;

  double top = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * n;
    const double uj = br.u[row];
    const double part1 = y1 * uj - std::exp(eta1 + uj);
    for (int k = 0; k < n; ++k) {
      const std::size_t q = row + k;
      const double vq = br.v[q];
      const double l2 = std::exp(eta2 + vq);
      const double tq = br.log_weights[q] + part1 + y2 * vq - l2;
      lam2[q] = l2;
      term[q] = tq;
      if (tq > top) top = tq;
    }
  }
  if (!(top > -std::numeric_limits<double>::infinity()) || std::isnan(top)) {
    throw NumericalError("pair density underflow at t=" + std::to_string(t) +
                             ", lag=" + std::to_string(lag),
                         t, lag);
  }
  double total = 0.0;
  for (std::size_t q = 0; q < nn; ++q) {
    term[q] = std::exp(term[q] - top);
    total += term[q];
  }
  KernelOut out{};
  out.logp = top + std::log(total) + y1 * eta1 + y2 * eta2 -
             std::lgamma(y1 + 1.0) - std::lgamma(y2 + 1.0);
  if (!std::isfinite(out.logp)) {
    throw NumericalError("non-finite pair density at t=" + std::to_string(t) +
                             ", lag=" + std::to_string(lag),
                         t, lag);
  }
  if (!with_grad) return out;

  const double a = br.scale;
  const double rho = br.rho;
  const double c = br.complement;
  const double rho_over_c = rho / c;
  double g1 = 0.0, g2 = 0.0, ga = 0.0, gr = 0.0;
  for (int j = 0; j < n; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * n;
    const double xj = nodes[j];
    const double e1 = y1 - std::exp(eta1 + br.u[row]);
    double mass = 0.0, s2 = 0.0, s2x = 0.0;
    for (int k = 0; k < n; ++k) {
      const std::size_t q = row + k;
      const double pi = term[q];
      const double e2 = y2 - lam2[q];
      mass += pi;
      s2 += pi * e2;
      s2x += pi * e2 * nodes[k];
    }
    g1 += mass * e1;
    g2 += s2;
    ga += mass * e1 * xj + s2 * rho * xj + s2x * c;
    gr += a * (s2 * xj - rho_over_c * s2x);
  }
  const double inv = 1.0 / total;
  out.d_eta1 = g1 * inv;
  out.d_eta2 = g2 * inv;
  out.d_scale = ga * inv;
  out.d_rho = gr * inv;
  return out;
}

double int_pow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

void Params::validate() const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("sigma2 must be finite and > 0");
  }
  if (!(std::abs(phi) < 1.0)) {
    throw std::invalid_argument("phi must satisfy |phi| < 1");
  }
  if (beta.size() == 0 || !beta.allFinite()) {
    throw std::invalid_argument("beta must be non-empty and finite");
  }
}

WorkingParams WorkingParams::from_params(const Params& p) {
  p.validate();
  return {p.beta, std::log(p.sigma2), std::atanh(p.phi)};
}

WorkingParams WorkingParams::from_vector(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() < 3) throw std::invalid_argument("working vector needs >= 3 entries");
  const auto k = v.size() - 2;
  return {v.head(k), v[k], v[k + 1]};
}

Params WorkingParams::to_params() const {
  return {beta, std::exp(log_sigma2), std::tanh(z_phi)};
}

Eigen::VectorXd WorkingParams::to_vector() const {
  Eigen::VectorXd v(beta.size() + 2);
  v.head(beta.size()) = beta;
  v[beta.size()] = log_sigma2;
  v[beta.size() + 1] = z_phi;
  return v;
}

CountSeries CountSeries::intercept_only(std::vector<int> counts) {
  CountSeries s;
  s.X = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(counts.size()), 1);
  s.y = std::move(counts);
  return s;
}

void CountSeries::validate(int window) const {
  const int n = size();
  if (X.rows() != n) {
    throw std::invalid_argument("design matrix has " + std::to_string(X.rows()) +
                                " rows for " + std::to_string(n) + " counts");
  }
  if (!dates.empty() && static_cast<int>(dates.size()) != n) {
    throw std::invalid_argument("date labels do not match series length");
  }
  for (int t = 0; t < n; ++t) {
    if (y[t] < 0) {
      throw std::invalid_argument("negative count at position " + std::to_string(t));
    }
  }
  if (n <= window) {
    throw std::invalid_argument("series length " + std::to_string(n) +
                                " must exceed the pair window " +
                                std::to_string(window));
  }
  if (X.cols() == 0 || !X.allFinite()) {
    throw std::invalid_argument("design matrix must be finite with >= 1 column");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) {
    throw std::invalid_argument("design matrix is rank deficient (rank " +
                                std::to_string(qr.rank()) + " < " +
                                std::to_string(X.cols()) + ")");
  }
}

std::string to_string(WeightScheme s) {
  return s == WeightScheme::rectangular ? "rectangular" : "trapezoidal";
}

WeightScheme parse_weight_scheme(std::string_view text) {
  if (text == "rect" || text == "rectangular") return WeightScheme::rectangular;
  if (text == "trap" || text == "trapezoidal") return WeightScheme::trapezoidal;
  throw std::invalid_argument("unknown weight scheme '" + std::string(text) + "'");
}

PairWeights make_weights(int d, WeightScheme scheme) {
  if (d < 1) throw std::invalid_argument("pair order d must be >= 1");
  PairWeights pw;
  pw.d = d;
  pw.scheme = scheme;
  if (scheme == WeightScheme::rectangular) {
    pw.window = d;
    pw.unnormalized.assign(d, 1.0);
  } else {
    pw.window = 2 * d;
    for (int i = 1; i < 2 * d; ++i) {
      pw.unnormalized.push_back(i < d ? 1.0 : static_cast<double>(2 * d - i) / d);
    }
  }
  double total = 0.0;
  for (double u : pw.unnormalized) total += u;
  pw.w.reserve(pw.unnormalized.size());
  for (double u : pw.unnormalized) pw.w.push_back(u / total);
  return pw;
}

double marginal_mean(const Eigen::Ref<const Eigen::VectorXd>& x, const Params& p) {
  return std::exp(x.dot(p.beta) + 0.5 * p.tau2());
}

double marginal_var(const Eigen::Ref<const Eigen::VectorXd>& x, const Params& p) {
  const double m = marginal_mean(x, p);
  return m + m * m * std::expm1(p.tau2());
}

double autocorrelation(int lag, const Eigen::Ref<const Eigen::VectorXd>& x_t,
                       const Eigen::Ref<const Eigen::VectorXd>& x_lagged,
                       const Params& p) {
  if (lag < 1) throw std::invalid_argument("autocorrelation: lag must be >= 1");
  const double cov = marginal_mean(x_t, p) * marginal_mean(x_lagged, p) *
                     std::expm1(int_pow(p.phi, lag) * p.tau2());
  return cov / std::sqrt(marginal_var(x_t, p) * marginal_var(x_lagged, p));
}

double dispersion_index(const Eigen::Ref<const Eigen::VectorXd>& x, const Params& p) {
  return marginal_mean(x, p) * std::expm1(p.tau2());
}

double poisson_log_pmf(int y, double log_mean) noexcept {
  return y * log_mean - std::exp(log_mean) - std::lgamma(y + 1.0);
}

double pair_log_density(int y1, int y2, const Eigen::Ref<const Eigen::VectorXd>& x1,
                        const Eigen::Ref<const Eigen::VectorXd>& x2, int lag,
                        const Params& p, const QuadRule& rule) {
  if (lag < 1) throw std::invalid_argument("pair_log_density: lag must be >= 1");
  if (y1 < 0 || y2 < 0) throw std::invalid_argument("pair_log_density: negative count");
  p.validate();
  // Identical covariate rows: evaluate in canonical count order so the
  // approximation is exchange-symmetric.
  if (x1 == x2 && y1 > y2) std::swap(y1, y2);
  BivariateRule br;
  br.reset(rule, p.tau2(), int_pow(p.phi, lag));
  std::vector<double> work;
  return pair_kernel(y1, y2, x1.dot(p.beta), x2.dot(p.beta), br, rule.nodes, false,
                     work, -1, lag)
      .logp;
}

PairwiseLikelihood::PairwiseLikelihood(CountSeries series, PairWeights weights,
                                       const QuadRule& rule)
    : series_(std::move(series)), weights_(std::move(weights)), rule_(rule) {
  series_.validate(weights_.window);
  const int n = series_.size();
  const auto cols = series_.X.cols();

  std::map<std::vector<double>, int> rows;
  row_class_.resize(n);
  for (int t = 0; t < n; ++t) {
    std::vector<double> r(cols);
    for (Eigen::Index c = 0; c < cols; ++c) r[c] = series_.X(t, c);
    auto [it, inserted] = rows.emplace(std::move(r), t);
    row_class_[t] = it->second;
  }

  std::map<std::tuple<int, int, int, int, int>, int> index;
  for (int t = weights_.window; t < n; ++t) {
    for (int lag = 1; lag <= weights_.lags(); ++lag) {
      Key k{series_.y[t - lag], series_.y[t], lag, row_class_[t - lag], row_class_[t],
            t, false};
      if (k.row1 == k.row2 && k.y1 > k.y2) {
        std::swap(k.y1, k.y2);
        k.swapped = true;
      }
      auto [it, inserted] = index.emplace(
          std::make_tuple(k.y1, k.y2, k.lag, k.row1, k.row2), static_cast<int>(keys_.size()));
      if (inserted) keys_.push_back(k);
      pairs_.push_back({t, lag, it->second});
    }
  }
}

std::vector<PairwiseLikelihood::KeyEval> PairwiseLikelihood::eval_keys(
    const Params& p, bool with_grad, LatentMode mode) const {
  std::vector<KeyEval> out(keys_.size());
  const Eigen::VectorXd eta = series_.X * p.beta;

  if (mode == LatentMode::none) {
    for (std::size_t q = 0; q < keys_.size(); ++q) {
      const Key& k = keys_[q];
      const double e1 = eta[k.row1], e2 = eta[k.row2];
      out[q] = {poisson_log_pmf(k.y1, e1) + poisson_log_pmf(k.y2, e2),
                k.y1 - std::exp(e1), k.y2 - std::exp(e2), 0.0, 0.0};
      if (!std::isfinite(out[q].logp)) {
        throw NumericalError("non-finite Poisson pair at t=" + std::to_string(k.t), k.t,
                             k.lag);
      }
    }
    return out;
  }

  p.validate();
  const double tau2 = p.tau2();
  std::vector<BivariateRule> grids(weights_.lags());
  for (int lag = 1; lag <= weights_.lags(); ++lag) {
    grids[lag - 1].reset(rule_, tau2, int_pow(p.phi, lag));
  }
  std::vector<double> work;
  for (std::size_t q = 0; q < keys_.size(); ++q) {
    const Key& k = keys_[q];
    const KernelOut r = pair_kernel(k.y1, k.y2, eta[k.row1], eta[k.row2],
                                    grids[k.lag - 1], rule_.nodes, with_grad, work,
                                    k.t, k.lag);
    out[q] = {r.logp, r.d_eta1, r.d_eta2, r.d_scale, r.d_rho};
  }
  return out;
}

Eigen::VectorXd PairwiseLikelihood::chain(const KeyEval& e, const Pair& pr,
                                          const Params& p, LatentMode mode) const {
  const Key& k = keys_[pr.key];
  const int dim = dimension();
  const int nb = series_.n_coef();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
  const double d1 = k.swapped ? e.d_eta2 : e.d_eta1;
  const double d2 = k.swapped ? e.d_eta1 : e.d_eta2;
  g.head(nb) = series_.X.row(pr.t - pr.lag).transpose() * d1 +
               series_.X.row(pr.t).transpose() * d2;
  if (mode == LatentMode::ar1) {
    const double a = std::sqrt(2.0 * p.tau2());
    const double phi = p.phi;
    const double drho_dz =
        pr.lag * int_pow(phi, pr.lag - 1) * (1.0 - phi) * (1.0 + phi);
    g[nb] = e.d_scale * 0.5 * a;
    g[nb + 1] = e.d_scale * a * phi + e.d_rho * drho_dz;
  }
  return g;
}

double PairwiseLikelihood::loglik(const Params& p, LatentMode mode) const {
  const auto evals = eval_keys(p, false, mode);
  double total = 0.0;
  for (const Pair& pr : pairs_) total += weights_.w[pr.lag - 1] * evals[pr.key].logp;
  return total;
}

PairwiseLikelihood::Value PairwiseLikelihood::evaluate(const WorkingParams& w,
                                                       bool with_score,
                                                       LatentMode mode) const {
  const Params p = w.to_params();
  const auto evals = eval_keys(p, with_score, mode);
  Value v;
  for (const Pair& pr : pairs_) v.loglik += weights_.w[pr.lag - 1] * evals[pr.key].logp;
  if (with_score) {
    v.score = Eigen::VectorXd::Zero(dimension());
    for (const Pair& pr : pairs_) {
      v.score += weights_.w[pr.lag - 1] * chain(evals[pr.key], pr, p, mode);
    }
  }
  return v;
}

PairwiseLikelihood::Scores PairwiseLikelihood::scores(const WorkingParams& w,
                                                      LatentMode mode) const {
  const Params p = w.to_params();
  const auto evals = eval_keys(p, true, mode);
  Scores s;
  const int dim = dimension();
  const int np = n_pairs();
  s.pair.resize(np, dim);
  s.per_time = Eigen::MatrixXd::Zero(series_.size() - weights_.window, dim);
  s.t.reserve(np);
  s.lag.reserve(np);
  s.weight.reserve(np);
  for (int r = 0; r < np; ++r) {
    const Pair& pr = pairs_[r];
    const Eigen::VectorXd g = chain(evals[pr.key], pr, p, mode);
    const double wi = weights_.w[pr.lag - 1];
    s.pair.row(r) = g.transpose();
    s.per_time.row(pr.t - weights_.window) += wi * g.transpose();
    s.t.push_back(pr.t);
    s.lag.push_back(pr.lag);
    s.weight.push_back(wi);
  }
  return s;
}

double pairwise_loglik(const CountSeries& series, const Params& p,
                       const PairWeights& weights, const QuadRule& rule) {
  return PairwiseLikelihood(series, weights, rule).loglik(p);
}

Eigen::VectorXd pairwise_score(const CountSeries& series, const WorkingParams& w,
                               const PairWeights& weights, const QuadRule& rule) {
  return PairwiseLikelihood(series, weights, rule).evaluate(w, true).score;
}

Eigen::VectorXd per_t_score(const CountSeries& series, int t, const WorkingParams& w,
                            const PairWeights& weights, const QuadRule& rule) {
  if (t < weights.window || t >= series.size()) {
    throw std::invalid_argument("per_t_score: t=" + std::to_string(t) +
                                " outside [" + std::to_string(weights.window) + ", " +
                                std::to_string(series.size()) + ")");
  }
  PairwiseLikelihood pl(series, weights, rule);
  return pl.scores(w).per_time.row(t - weights.window).transpose();
}

}  // namespace lacount
