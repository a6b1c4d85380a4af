#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lacount/scenarios.hpp"
#include "lacount/simulate.hpp"

using namespace lacount;

namespace {

SimConfig config(const Params& p, int n, std::uint64_t seed) {
  SimConfig cfg;
  cfg.params = p;
  cfg.X = Eigen::MatrixXd::Ones(n, 1);
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("replicates are reproducible and distinct") {
  const SimConfig cfg = config(scenario(2).params(), 200, 99);
  const CountSeries a = simulate_series(cfg, 3);
  const CountSeries b = simulate_series(cfg, 3);
  CHECK(a.y == b.y);
  CHECK(simulate_series(cfg, 4).y != a.y);
  SimConfig other = cfg;
  other.seed = 100;
  CHECK(simulate_series(other, 3).y != a.y);
  SimConfig many = cfg;
  many.n_rep = 5;
  const auto reps = simulate_replicates(many);
  REQUIRE(reps.size() == 5);
  CHECK(reps[3].y == a.y);
}

TEST_CASE("latent path is a stationary AR(1)") {
  const Params p = scenario(5).params();
  auto rng = make_stream(5, 0);
  const int n = 400000;
  const auto u = simulate_latent(p, n, rng);
  double m = 0.0, v = 0.0, c = 0.0;
  for (double x : u) m += x;
  m /= n;
  for (int t = 0; t < n; ++t) {
    v += (u[t] - m) * (u[t] - m);
    if (t) c += (u[t] - m) * (u[t - 1] - m);
  }
  CHECK(std::abs(m) < 0.02);
  CHECK(v / n == doctest::Approx(p.tau2()).epsilon(0.03));
  CHECK(c / v == doctest::Approx(p.phi).epsilon(0.03));
}

TEST_CASE("count moments match the model") {
  for (int id : {4, 8}) {
    const Params p = scenario(id).params();
    const CountSeries s = simulate_series(config(p, 300000, 12), 0);
    double m = 0.0, v = 0.0;
    for (int y : s.y) m += y;
    m /= s.size();
    for (int y : s.y) v += (y - m) * (y - m);
    v /= s.size() - 1;
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
    CHECK(m == doctest::Approx(marginal_mean(x, p)).epsilon(0.02));
    CHECK(v == doctest::Approx(marginal_var(x, p)).epsilon(0.05));
    CHECK((v - m) / m == doctest::Approx(scenario(id).D).epsilon(0.15));
  }
}

TEST_CASE("sigma2 = 0 gives Poisson counts") {
  Params p;
  p.beta = Eigen::VectorXd::Constant(1, std::log(4.0));
  p.sigma2 = 0.0;
  p.phi = 0.0;
  const CountSeries s = simulate_series(config(p, 200000, 1), 0);
  double m = 0.0, v = 0.0;
  for (int y : s.y) m += y;
  m /= s.size();
  for (int y : s.y) v += (y - m) * (y - m);
  v /= s.size() - 1;
  CHECK(m == doctest::Approx(4.0).epsilon(0.01));
  CHECK(v == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("nearest-rank quantile") {
  std::vector<int> v{7, 3, 9, 1, 5, 2, 10, 4, 8, 6};
  CHECK(nearest_rank_quantile(v, 0.95) == 10);
  CHECK(nearest_rank_quantile(v, 0.9) == 9);
  CHECK(nearest_rank_quantile(v, 0.5) == 5);
  CHECK(nearest_rank_quantile(v, 0.01) == 1);
  CHECK(nearest_rank_quantile(v, 1.0) == 10);
  std::vector<int> one{42};
  CHECK(nearest_rank_quantile(one, 0.95) == 42);
  std::vector<int> empty;
  CHECK_THROWS_AS(nearest_rank_quantile(empty, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(nearest_rank_quantile(v, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(nearest_rank_quantile(v, 1.5), std::invalid_argument);
}

TEST_CASE("prediction bands") {
  const Params p = scenario(5).params();
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(12, 1);
  SUBCASE("a single draw degenerates to one path") {
    const PredictionBand b = predict(p, x, 1, 3);
    for (int t = 0; t < 12; ++t) CHECK(b.point[t] == static_cast<double>(b.upper[t]));
  }
  SUBCASE("same seed, same band") {
    const PredictionBand a = predict(p, x, 500, 8);
    const PredictionBand b = predict(p, x, 500, 8);
    CHECK(a.point == b.point);
    CHECK(a.upper == b.upper);
  }
  SUBCASE("Poisson limit matches the exact quantile") {
    Params q;
    q.beta = Eigen::VectorXd::Constant(1, std::log(6.0));
    q.sigma2 = 0.0;
    q.phi = 0.0;
    const PredictionBand b = predict(q, x, 40000, 2);
    // smallest k with P(Y <= k) >= 0.95 for Y ~ Poisson(6)
    double cdf = 0.0, pk = std::exp(-6.0);
    int k = 0;
    for (;; ++k) {
      cdf += pk;
      if (cdf >= 0.95) break;
      pk *= 6.0 / (k + 1);
    }
    for (int t = 0; t < 12; ++t) {
      CHECK(b.upper[t] == k);
      CHECK(b.point[t] == doctest::Approx(6.0).epsilon(0.03));
    }
  }
  CHECK_THROWS_AS(predict(p, x, 0, 1), std::invalid_argument);
}

TEST_CASE("scenario table") {
  const auto& table = scenario_table();
  REQUIRE(table.size() == 9);
  const Scenario& s3 = scenario(3);
  CHECK(s3.beta == -0.6130);
  CHECK(s3.phi == 0.9);
  CHECK(s3.sigma == 0.6221);
  CHECK(s3.tau2 == 2.0369);
  for (const auto& s : table) {
    const Params p = s.params();
    // the listed tau2 is sigma^2 / (1 - phi^2) to table rounding
    CHECK(p.tau2() == doctest::Approx(s.tau2).epsilon(2e-3));
    // and D = E(y)(exp(tau2) - 1), with E(y) = exp(beta + tau2 / 2)
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
    CHECK(dispersion_index(x, p) == doctest::Approx(s.D).epsilon(0.01));
  }
  CHECK_THROWS_AS(scenario(0), std::invalid_argument);
  CHECK_THROWS_AS(scenario(10), std::invalid_argument);
}
