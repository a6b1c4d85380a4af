#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "lacount/data.hpp"
#include "lacount/report.hpp"
#include "lacount/scenarios.hpp"
#include "lacount/simulate.hpp"

using namespace lacount;

namespace {

DataFile parse(const std::string& text) {
  std::istringstream in(text);
  return parse_count_csv(in, "mem.csv");
}

std::string error_of(const std::string& text, int* line = nullptr) {
  try {
    parse(text);
  } catch (const DataError& e) {
    if (line) *line = e.line();
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("calendar months") {
  const YearMonth a = YearMonth::parse("2015-11");
  CHECK(a.str() == "2015-11");
  CHECK(a.plus(3).str() == "2016-02");
  CHECK(a.plus(-11).str() == "2014-12");
  CHECK(YearMonth::from_serial(a.serial()) == a);
  CHECK(a < YearMonth::parse("2016-01"));
  CHECK_THROWS_AS(YearMonth::parse("2015-13"), std::invalid_argument);
  CHECK_THROWS_AS(YearMonth::parse("2015/01"), std::invalid_argument);
}

TEST_CASE("count CSV parsing") {
  const DataFile df = parse("date,count,temp\n2001-01,4,1.5\n2001-02,0,-2\n2001-03,7,0.25\n");
  REQUIRE(df.size() == 3);
  CHECK(df.counts == std::vector<int>{4, 0, 7});
  CHECK(df.dates[2].str() == "2001-03");
  CHECK(df.covariates.at("temp")[1] == -2.0);
  const DataFile s = df.slice(1, 3);
  CHECK(s.size() == 2);
  CHECK(s.covariates.at("temp")[0] == -2.0);
  // column order and CRLF are tolerated
  const DataFile swapped = parse("count,date\r\n3,1999-12\r\n5,2000-01\r\n");
  CHECK(swapped.counts == std::vector<int>{3, 5});
}

TEST_CASE("ingestion errors are distinct and carry line numbers") {
  int line = 0;
  const std::string dup = error_of("date,count\n2001-01,1\n2001-01,2\n", &line);
  CHECK(dup.find("duplicate month") != std::string::npos);
  CHECK(line == 3);
  const std::string gap = error_of("date,count\n2001-01,1\n2001-02,1\n2001-05,2\n", &line);
  CHECK(gap.find("gap of 2") != std::string::npos);
  CHECK(line == 4);
  const std::string order = error_of("date,count\n2001-03,1\n2001-02,2\n");
  CHECK(order.find("out of order") != std::string::npos);
  const std::string neg = error_of("date,count\n2001-01,-4\n", &line);
  CHECK(neg.find("negative count") != std::string::npos);
  CHECK(line == 2);
  const std::string frac = error_of("date,count\n2001-01,2.5\n");
  CHECK(frac.find("not an integer") != std::string::npos);
  const std::string fields = error_of("date,count\n2001-01,2,9\n");
  CHECK(fields.find("expected 2") != std::string::npos);
  CHECK(error_of("when,count\n2001-01,2\n").find("missing 'date'") != std::string::npos);
  CHECK(error_of("date,n\n2001-01,2\n").find("missing 'count'") != std::string::npos);
  CHECK(error_of("date,count,x\n2001-01,2,abc\n").find("'x'") != std::string::npos);
  CHECK(error_of("date,count\n").find("no data rows") != std::string::npos);
  CHECK(error_of("date,count\n2001-1x,2\n").find("mem.csv:2") != std::string::npos);
  CHECK(dup != gap);
  CHECK(gap != neg);
  CHECK_THROWS_AS(read_count_csv("/nonexistent/file.csv"), DataError);
}

TEST_CASE("design matrix terms") {
  ModelSpec spec;
  spec.trend = true;
  spec.harmonic_period = 12;
  spec.level_shift = YearMonth::parse("2005-03");
  spec.covariates = {"temp"};
  CHECK(spec.term_names() ==
        std::vector<std::string>{"intercept", "trend", "level_shift", "temp", "sin", "cos"});
  const DesignContext ctx{YearMonth::parse("2005-01"), 24};
  std::vector<YearMonth> dates;
  for (int k = 0; k < 4; ++k) dates.push_back(ctx.origin.plus(k));
  const Eigen::MatrixXd x =
      design_matrix(spec, ctx, dates, {{"temp", {0.1, 0.2, 0.3, 0.4}}});
  REQUIRE(x.rows() == 4);
  REQUIRE(x.cols() == 6);
  for (int r = 0; r < 4; ++r) {
    const double t = r + 1.0;
    CHECK(x(r, 0) == 1.0);
    CHECK(x(r, 1) == doctest::Approx(t / 24.0));
    CHECK(x(r, 2) == (r < 2 ? 1.0 : 0.0));
    CHECK(x(r, 3) == doctest::Approx(0.1 * t));
    CHECK(x(r, 4) == doctest::Approx(std::sin(2 * std::numbers::pi * t / 12)));
    CHECK(x(r, 5) == doctest::Approx(std::cos(2 * std::numbers::pi * t / 12)));
  }
  CHECK_THROWS_AS(design_matrix(spec, ctx, dates, {}), std::invalid_argument);
}

TEST_CASE("fit report round trip is bit exact") {
  SimConfig cfg;
  cfg.params = scenario(5).params();
  cfg.X = Eigen::MatrixXd::Ones(300, 1);
  cfg.seed = 3;
  const CountSeries s = simulate_series(cfg, 0);
  const FitResult f = fit(s, make_weights(2, WeightScheme::trapezoidal));
  DataFile training;
  for (int t = 0; t < s.size(); ++t) training.dates.push_back(YearMonth{2000, 1}.plus(t));
  training.counts = s.y;
  ModelSpec spec;
  spec.d = 2;
  const FitReport r = make_fit_report(spec, {training.dates.front(), s.size()}, training,
                                      DataFile{}, f, Eigen::VectorXd::Constant(3, 0.5));
  const auto j = to_json(r);
  CHECK(j.at("schema_version").get<int>() == kReportSchemaVersion);
  const std::string path = "lacount_roundtrip_test.json";
  write_fit_report(path, r);
  const FitReport back = read_fit_report(path);
  std::remove(path.c_str());
  CHECK(back.params.beta[0] == r.params.beta[0]);
  CHECK(back.params.sigma2 == r.params.sigma2);
  CHECK(back.params.phi == r.params.phi);
  CHECK(back.working.z_phi == r.working.z_phi);
  CHECK((back.H - r.H).norm() == 0.0);
  CHECK((back.J - r.J).norm() == 0.0);
  CHECK((back.se - r.se).norm() == 0.0);
  CHECK(back.clic == r.clic);
  CHECK(back.training.counts == training.counts);
  CHECK(back.weights.w == r.weights.w);
  CHECK(back.dispersion_median == 0.5);
  auto bad = j;
  bad["schema_version"] = 99;
  CHECK_THROWS_AS(fit_report_from_json(bad), std::invalid_argument);
  CHECK(format_fit_table(r).find("CLIC") != std::string::npos);
}
