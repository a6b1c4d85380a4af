#include "lacount/optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lacount/errors.hpp"

namespace lacount {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Probe {
  double alpha = 0.0;
  double f = kInf;
  double slope = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd g;
  bool ok = false;
};

class LineSearch {
 public:
  LineSearch(const Objective& obj, const BfgsOptions& opt, const Eigen::VectorXd& x0,
             double f0, const Eigen::VectorXd& dir, double slope0, int& evaluations)
      : obj_(obj), opt_(opt), x0_(x0), f0_(f0), dir_(dir), slope0_(slope0),
        evaluations_(evaluations) {}

  // Returns a probe satisfying the strong Wolfe conditions, or the best
  // sufficient-decrease point found; `ok` is false when nothing qualifies.
  Probe run(double alpha) {
    Probe prev;
    prev.alpha = 0.0;
    prev.f = f0_;
    prev.slope = slope0_;
    prev.ok = true;
    for (int i = 0; i < 40; ++i) {
      Probe cur = probe(alpha);
      if (!cur.ok) {
        alpha = prev.alpha + 0.25 * (alpha - prev.alpha);
        if (alpha - prev.alpha < 1e-20) break;
        continue;
      }
      if (cur.f > f0_ + opt_.c1 * alpha * slope0_ || (i > 0 && cur.f >= prev.f)) {
        return zoom(prev, cur);
      }
      if (std::abs(cur.slope) <= -opt_.c2 * slope0_) return cur;
      if (cur.slope >= 0.0) return zoom(cur, prev);
      prev = cur;
      alpha *= 2.0;
    }
    if (prev.alpha > 0.0) return prev;
    return {};
  }

 private:
  Probe probe(double alpha) {
    Probe p;
    p.alpha = alpha;
    p.x = x0_ + alpha * dir_;
    p.g.resize(x0_.size());
    ++evaluations_;
    try {
      p.f = obj_(p.x, &p.g);
    } catch (const NumericalError&) {
      p.f = kInf;
    }
    p.ok = std::isfinite(p.f) && p.g.allFinite();
    if (p.ok) p.slope = p.g.dot(dir_);
    return p;
  }

  Probe zoom(Probe lo, Probe hi) {
    for (int i = 0; i < 40; ++i) {
      const double span = hi.alpha - lo.alpha;
      if (std::abs(span) <= 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
      double alpha = lo.alpha + 0.5 * span;
      if (hi.ok) {
        const double denom = 2.0 * (hi.f - lo.f - lo.slope * span);
        if (denom > 0.0) {
          const double trial = lo.alpha - lo.slope * span * span / denom;
          const double a = std::min(lo.alpha, hi.alpha);
          const double b = std::max(lo.alpha, hi.alpha);
          const double margin = 0.1 * (b - a);
          if (trial > a + margin && trial < b - margin) alpha = trial;
        }
      }
      Probe cur = probe(alpha);
      if (!cur.ok || cur.f > f0_ + opt_.c1 * alpha * slope0_ || cur.f >= lo.f) {
        hi = cur;
        hi.alpha = alpha;
      } else {
        if (std::abs(cur.slope) <= -opt_.c2 * slope0_) return cur;
        if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = cur;
      }
    }
    if (lo.alpha > 0.0) return lo;
    return {};
  }

  const Objective& obj_;
  const BfgsOptions& opt_;
  const Eigen::VectorXd& x0_;
  double f0_;
  const Eigen::VectorXd& dir_;
  double slope0_;
  int& evaluations_;
};

}  // namespace

BfgsResult minimize_bfgs(const Objective& objective, Eigen::VectorXd x0,
                         const BfgsOptions& options) {
  const auto n = x0.size();
  BfgsResult res;
  res.x = std::move(x0);
  res.grad.resize(n);
  res.f = objective(res.x, &res.grad);
  res.evaluations = 1;
  if (!std::isfinite(res.f) || !res.grad.allFinite()) {
    throw std::invalid_argument("minimize_bfgs: objective is not finite at the start");
  }

  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  bool fresh = true;

  for (res.iterations = 0; res.iterations < options.max_iter;) {
    const double gnorm = res.grad.lpNorm<Eigen::Infinity>();
    if (gnorm <= options.grad_tol) {
      res.converged = true;
      res.message = "gradient tolerance reached";
      return res;
    }
    Eigen::VectorXd dir = -hinv * res.grad;
    double slope = dir.dot(res.grad);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      fresh = true;
      dir = -res.grad;
      slope = dir.dot(res.grad);
    }
    const double dnorm = dir.lpNorm<Eigen::Infinity>();
    if (dnorm > options.max_step) {
      dir *= options.max_step / dnorm;
      slope = dir.dot(res.grad);
    }

    LineSearch ls(objective, options, res.x, res.f, dir, slope, res.evaluations);
    Probe step = ls.run(1.0);
    if (!step.ok) {
      if (!fresh) {
        hinv.setIdentity();
        fresh = true;
        continue;
      }
      res.converged = gnorm <= options.loose_grad_tol;
      res.message = "line search failed to improve";
      return res;
    }
    ++res.iterations;

    const Eigen::VectorXd s = step.x - res.x;
    const Eigen::VectorXd yv = step.g - res.grad;
    const double f_old = res.f;
    res.x = step.x;
    res.f = step.f;
    res.grad = step.g;

    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      if (fresh) {
        hinv *= sy / yv.squaredNorm();
        fresh = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = hinv * yv;
      const double yhy = yv.dot(hy);
      hinv += ((sy + yhy) * rho * rho) * (s * s.transpose()) -
              rho * (hy * s.transpose() + s * hy.transpose());
    }

    const bool small_change =
        std::abs(f_old - res.f) <= options.rel_tol * (std::abs(res.f) + options.rel_tol);
    const double g_now = res.grad.lpNorm<Eigen::Infinity>();
    if (small_change && g_now <= options.loose_grad_tol) {
      res.converged = true;
      res.message = "relative and gradient tolerances reached";
      return res;
    }
  }
  res.converged = false;
  res.message = "iteration limit reached";
  return res;
}

}  // namespace lacount
