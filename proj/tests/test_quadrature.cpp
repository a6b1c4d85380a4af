#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lacount/quadrature.hpp"

using namespace lacount;

namespace {

// int x^k exp(-x^2) dx over the real line.
double hermite_moment(int k) {
  return k % 2 ? 0.0 : std::tgamma((k + 1) / 2.0);
}

// Physicists' Hermite polynomial by the three-term recurrence.
double hermite_h(int n, double x) {
  double h0 = 1.0, h1 = 2.0 * x;
  if (n == 0) return h0;
  for (int k = 1; k < n; ++k) {
    const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

}  // namespace

TEST_CASE("order 5 rule matches closed-form roots and weights") {
  const double s = std::sqrt(10.0);
  const double expected[5] = {-std::sqrt((5 + s) / 2), -std::sqrt((5 - s) / 2), 0.0,
                              std::sqrt((5 - s) / 2), std::sqrt((5 + s) / 2)};
  const QuadRule r = gauss_hermite(5);
  REQUIRE(r.nodes.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(r.nodes[i] == doctest::Approx(expected[i]).epsilon(1e-14));
    const double h4 = hermite_h(4, expected[i]);
    const double w = 16.0 * 120.0 * std::sqrt(std::numbers::pi) / (25.0 * h4 * h4);
    CHECK(r.weights[i] == doctest::Approx(w).epsilon(1e-13));
  }
}

TEST_CASE("polynomial exactness up to degree 2n-1") {
  for (int n = 1; n <= 40; ++n) {
    const QuadRule r = gauss_hermite(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double sum = 0.0, scale = 0.0;
      for (int i = 0; i < n; ++i) {
        const double term = r.weights[i] * std::pow(r.nodes[i], k);
        sum += term;
        scale += std::abs(term);
      }
      CHECK(std::abs(sum - hermite_moment(k)) <= 1e-11 * std::max(scale, 1.0));
    }
  }
}

TEST_CASE("nodes are sorted, symmetric, weights positive and sum to sqrt(pi)") {
  for (int n : {1, 2, 7, 20, 40, 100}) {
    const QuadRule r = gauss_hermite(n);
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(r.weights[i] > 0.0);
      CHECK(r.nodes[i] == -r.nodes[n - 1 - i]);
      CHECK(r.weights[i] == r.weights[n - 1 - i]);
      if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
      wsum += r.weights[i];
    }
    CHECK(wsum == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
  }
}

TEST_CASE("invalid orders are rejected") {
  CHECK_THROWS_AS(gauss_hermite(0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_hermite(101), std::invalid_argument);
  CHECK_THROWS_AS(cached_gauss_hermite(-3), std::invalid_argument);
}

TEST_CASE("cache returns the same rule") {
  const QuadRule& a = cached_gauss_hermite(12);
  const QuadRule& b = cached_gauss_hermite(12);
  CHECK(&a == &b);
  CHECK(a.nodes == gauss_hermite(12).nodes);
}

TEST_CASE("expect_normal reproduces normal moments and the lognormal mean") {
  const QuadRule r = gauss_hermite(30);
  CHECK(r.expect_normal([](double x) { return x * x; }, 2.5) == doctest::Approx(2.5));
  CHECK(r.expect_normal([](double x) { return x * x * x * x; }, 0.7) ==
        doctest::Approx(3 * 0.49));
  CHECK(r.expect_normal([](double x) { return std::exp(x); }, 0.8) ==
        doctest::Approx(std::exp(0.4)).epsilon(1e-12));
}

TEST_CASE("bivariate rule has the target covariance") {
  const QuadRule r = gauss_hermite(10);
  for (double rho : {-0.9, -0.3, 0.0, 0.5, 0.95}) {
    const BivariateRule b = bivariate_normal_rule(r, 1.7, rho);
    CHECK(b.size() == 100);
    CHECK(b.expect([](double, double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.expect([](double u, double) { return u * u; }) == doctest::Approx(1.7));
    CHECK(b.expect([](double, double v) { return v * v; }) == doctest::Approx(1.7));
    CHECK(b.expect([](double u, double v) { return u * v; }) ==
          doctest::Approx(rho * 1.7).epsilon(1e-12));
    // Joint mgf E exp(u + v) = exp(tau2 (1 + rho)); needs more nodes.
    const BivariateRule fine = bivariate_normal_rule(gauss_hermite(30), 1.7, rho);
    CHECK(fine.expect([](double u, double v) { return std::exp(u + v); }) ==
          doctest::Approx(std::exp(1.7 * (1 + rho))).epsilon(1e-6));
  }
  CHECK_THROWS_AS(bivariate_normal_rule(r, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bivariate_normal_rule(r, 0.0, 0.2), std::invalid_argument);
}
