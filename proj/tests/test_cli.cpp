#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lacount/commands.hpp"
#include "lacount/simulate.hpp"

using namespace lacount;

namespace {

DataFile simulated_file(int n, std::uint64_t seed, bool with_covariate = false) {
  SimConfig cfg;
  cfg.params = scenario(5).params();
  cfg.X = Eigen::MatrixXd::Ones(n, 1);
  cfg.seed = seed;
  const CountSeries s = simulate_series(cfg, 0);
  DataFile df;
  for (int t = 0; t < n; ++t) df.dates.push_back(YearMonth{2001, 1}.plus(t));
  df.counts = s.y;
  if (with_covariate) {
    auto& c = df.covariates["z"];
    for (int t = 0; t < n; ++t) c.push_back(std::cos(0.3 * t));
  }
  return df;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("weights table") {
  const std::string rect = cli::cmd_weights(10, WeightScheme::rectangular);
  CHECK(rect.find("  10       1.000000       0.100000") != std::string::npos);
  const std::string trap = cli::cmd_weights(10, WeightScheme::trapezoidal);
  CHECK(trap.find("  19       0.100000") != std::string::npos);
  CHECK(trap.find("  20 ") == std::string::npos);
  CHECK(cli::cmd_weights(1, WeightScheme::trapezoidal).find("   1       1.000000       1.000000") !=
        std::string::npos);
}

TEST_CASE("intercept-only fit passes straight through to the estimator") {
  const DataFile df = simulated_file(300, 5);
  ModelSpec spec;
  spec.d = 2;
  const auto out = cli::fit_data(df, spec);
  const CountSeries s = CountSeries::intercept_only(df.counts);
  const FitResult f = fit(s, make_weights(2, WeightScheme::trapezoidal));
  CHECK(out.exit_code == cli::kExitOk);
  CHECK(out.report.params.beta[0] == f.params_hat.beta[0]);
  CHECK(out.report.params.phi == f.params_hat.phi);
  CHECK(out.report.clic == f.clic);
  CHECK(out.report.dispersion_min <= out.report.dispersion_median);
  CHECK(out.table.find("intercept") != std::string::npos);
}

TEST_CASE("fit validates the specification against the data") {
  const DataFile df = simulated_file(120, 6);
  ModelSpec spec;
  spec.level_shift = YearMonth{1990, 1};
  CHECK_THROWS_AS(cli::fit_data(df, spec), std::invalid_argument);
  spec.level_shift.reset();
  spec.covariates = {"missing"};
  CHECK_THROWS_AS(cli::fit_data(df, spec), std::invalid_argument);
  spec.covariates.clear();
  spec.holdout_months = 120;
  CHECK_THROWS_AS(cli::fit_data(df, spec), std::invalid_argument);
}

TEST_CASE("prediction from a report") {
  const DataFile df = simulated_file(150, 7, true);
  ModelSpec spec;
  spec.trend = true;
  spec.harmonic_period = 12;
  spec.holdout_months = 6;
  const auto fitted = cli::fit_data(df, spec);
  REQUIRE(fitted.exit_code == cli::kExitOk);
  CHECK(fitted.report.training.size() == 144);
  CHECK(fitted.report.holdout.size() == 6);

  cli::PredictCommand cmd;
  cmd.horizon = 9;
  cmd.n_sim = 2000;
  const auto rows = cli::predict_report(fitted.report, cmd);
  REQUIRE(rows.size() == 153);
  CHECK(rows[143].in_sample);
  CHECK_FALSE(rows[144].in_sample);
  CHECK(rows[144].date.str() == df.dates[144].str());
  // holdout months carry observations, later months do not
  CHECK(rows[149].observed.value() == df.counts[149]);
  CHECK_FALSE(rows[150].observed.has_value());
  for (const auto& r : rows) {
    if (r.observed) CHECK(r.exceeds == (*r.observed > r.upper95));
  }
  // same seed reproduces the band
  const auto again = cli::predict_report(fitted.report, cmd);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(again[i].upper95 == rows[i].upper95);

  const std::string path = "lacount_band_test.csv";
  cli::write_band_csv(path, rows);
  const std::string text = slurp(path);
  std::remove(path.c_str());
  CHECK(text.rfind("date,point,upper95,observed,exceeds\n", 0) == 0);
  CHECK(text.find(rows.back().date.str() + ",") != std::string::npos);
  CHECK(text.find(",,\n") != std::string::npos);

  FitReport stale = fitted.report;
  stale.converged = false;
  CHECK_THROWS_AS(cli::predict_report(stale, cmd), std::invalid_argument);
}

TEST_CASE("user covariates need future values") {
  const DataFile df = simulated_file(100, 8, true);
  ModelSpec spec;
  spec.covariates = {"z"};
  const auto fitted = cli::fit_data(df, spec);
  cli::PredictCommand cmd;
  cmd.horizon = 3;
  cmd.n_sim = 200;
  try {
    cli::predict_report(fitted.report, cmd);
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("future-covariate file") != std::string::npos);
  }
  const std::string path = "lacount_future_test.csv";
  {
    std::ofstream out(path);
    out << "date,z\n2009-05,0.1\n2009-06,0.2\n2009-07,0.3\n";
  }
  cmd.future_covariates_path = path;
  const auto rows = cli::predict_report(fitted.report, cmd);
  std::remove(path.c_str());
  CHECK(rows.size() == 103);
  cmd.future_covariates_path.reset();
  cmd.horizon = 0;
  CHECK(cli::predict_report(fitted.report, cmd).size() == 100);
}

TEST_CASE("simulate and scenarios commands are reproducible") {
  cli::SimulateCommand sim;
  sim.params = scenario(8).params();
  sim.n = 60;
  sim.seed = 4;
  const CountSeries a = cli::cmd_simulate(sim);
  CHECK(a.dates.front().str() == "2000-01");
  CHECK(a.y == cli::cmd_simulate(sim).y);

  cli::ScenariosCommand sc;
  sc.ids = {8};
  sc.n_series = 3;
  sc.n_len = 200;
  sc.d_values = {1, 2};
  const auto rows = cli::cmd_scenarios(sc);
  CHECK(rows.size() == 2 * 4);
  CHECK(cli::format_scenario_csv(rows) == cli::format_scenario_csv(cli::cmd_scenarios(sc)));
  CHECK(rows[0].summary.n_ok == 3);
}
