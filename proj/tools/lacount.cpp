// lacount: fit, predict and simulate latent AR(1) Poisson count series.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lacount/commands.hpp"
#include "lacount/errors.hpp"

using namespace lacount;

namespace {

const std::map<std::string, WeightScheme> kSchemes{
    {"rect", WeightScheme::rectangular}, {"trap", WeightScheme::trapezoidal}};
const std::map<std::string, Restriction> kRestrictions{{"none", Restriction::none},
                                                       {"phi0", Restriction::phi_zero},
                                                       {"indep", Restriction::independence}};

void print_series(const CountSeries& s) {
  std::cout << "date,count\n";
  for (int t = 0; t < s.size(); ++t) std::cout << s.dates[t].str() << ',' << s.y[t] << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent AR(1) Poisson count series: pairwise likelihood fitting and prediction"};
  app.require_subcommand(1);

  // fit
  cli::FitCommand fit_cmd;
  std::optional<int> harmonic;
  std::string level_shift;
  auto* fit = app.add_subcommand("fit", "fit a model to a monthly count CSV");
  fit->add_option("data", fit_cmd.data_path, "CSV with date,count[,covariates]")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("-o,--output", fit_cmd.output_path, "JSON report path");
  fit->add_flag("--trend", fit_cmd.spec.trend, "linear trend scaled by the series length");
  fit->add_option("--harmonic", harmonic, "harmonic pair with this period (months)")
      ->check(CLI::PositiveNumber);
  fit->add_option("--level-shift", level_shift, "indicator equal to 1 before YYYY-MM");
  fit->add_option("--covariate", fit_cmd.spec.covariates, "covariate column (repeatable)");
  fit->add_option("-d,--order", fit_cmd.spec.d, "pairwise order d")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit->add_option("--weights", fit_cmd.spec.scheme, "lag weights")
      ->transform(CLI::CheckedTransformer(kSchemes).description(""))
      ->type_name("rect|trap")
      ->default_str("trap");
  fit->add_option("--nodes", fit_cmd.spec.quad_order, "Gauss-Hermite nodes per dimension")
      ->check(CLI::Range(1, 100))
      ->capture_default_str();
  fit->add_option("--hac-lags", fit_cmd.spec.hac_lags, "Bartlett truncation (default 10 log10 n)")
      ->check(CLI::NonNegativeNumber);
  fit->add_option("--restriction", fit_cmd.spec.restriction, "none, phi0 or indep")
      ->transform(CLI::CheckedTransformer(kRestrictions).description(""))
      ->type_name("none|phi0|indep")
      ->default_str("none");
  fit->add_option("--holdout-months", fit_cmd.spec.holdout_months,
                  "trailing months kept out of the fit")
      ->check(CLI::NonNegativeNumber);

  // predict
  cli::PredictCommand pred_cmd;
  auto* predict = app.add_subcommand("predict", "simulation bands from a fit report");
  predict->add_option("report", pred_cmd.report_path, "JSON report from `fit`")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--horizon", pred_cmd.horizon, "months past the fitting window")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  predict->add_option("--nsim", pred_cmd.n_sim, "simulated paths")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  predict->add_option("--seed", pred_cmd.seed)->capture_default_str();
  predict->add_option("-o,--output", pred_cmd.output_path, "band CSV path (default stdout)");
  predict->add_option("--observed", pred_cmd.observed_path, "CSV of observed counts")
      ->check(CLI::ExistingFile);
  predict->add_option("--future-covariates", pred_cmd.future_covariates_path,
                      "CSV of covariate values for the horizon")
      ->check(CLI::ExistingFile);

  // simulate
  cli::SimulateCommand sim_cmd;
  std::optional<int> sim_scenario;
  std::vector<double> sim_beta;
  double sim_sigma2 = 0.0;
  double sim_phi = 0.0;
  std::string sim_start = "2000-01";
  auto* simulate = app.add_subcommand("simulate", "simulate an intercept-only series");
  simulate->add_option("--scenario", sim_scenario, "reference design 1..9")
      ->check(CLI::Range(1, 9));
  auto* beta_opt = simulate->add_option("--beta", sim_beta, "log-mean intercept");
  simulate->add_option("--sigma2", sim_sigma2, "innovation variance")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--phi", sim_phi, "latent autocorrelation")->check(CLI::Range(-0.999, 0.999));
  simulate->add_option("-n,--length", sim_cmd.n)->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--seed", sim_cmd.seed)->capture_default_str();
  simulate->add_option("--replicate", sim_cmd.replicate)
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  simulate->add_option("--start", sim_start, "first month")->capture_default_str();
  simulate->add_option("-o,--output", sim_cmd.output_path, "CSV path (default stdout)");
  simulate->callback([&] {
    if (!sim_scenario && beta_opt->count() == 0) {
      throw CLI::ValidationError("simulate", "give --scenario or --beta");
    }
  });

  // scenarios
  cli::ScenariosCommand sc_cmd;
  std::vector<std::string> sc_schemes{"trap"};
  sc_cmd.ids = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  auto* scen = app.add_subcommand("scenarios", "replicate fits on the reference designs");
  scen->add_option("--ids", sc_cmd.ids, "scenario ids")->check(CLI::Range(1, 9));
  scen->add_option("--n-series", sc_cmd.n_series)->check(CLI::PositiveNumber)->capture_default_str();
  scen->add_option("--n-len", sc_cmd.n_len)->check(CLI::PositiveNumber)->capture_default_str();
  scen->add_option("-d,--order", sc_cmd.d_values, "one or more orders")->check(CLI::PositiveNumber);
  scen->add_option("--weights", sc_schemes, "rect and/or trap")
      ->check(CLI::IsMember({"rect", "trap"}));
  scen->add_option("--nodes", sc_cmd.quad_orders)->check(CLI::Range(1, 100));
  scen->add_option("--seed", sc_cmd.seed)->capture_default_str();
  scen->add_option("-o,--output", sc_cmd.output_path, "CSV path (default stdout)");

  // weights
  int w_d = 1;
  WeightScheme w_scheme = WeightScheme::trapezoidal;
  auto* weights = app.add_subcommand("weights", "print the lag weights");
  weights->add_option("-d,--order", w_d)->check(CLI::PositiveNumber)->capture_default_str();
  weights->add_option("--weights", w_scheme)
      ->transform(CLI::CheckedTransformer(kSchemes).description(""))
      ->type_name("rect|trap")
      ->default_str("trap");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit) {
      if (harmonic) fit_cmd.spec.harmonic_period = *harmonic;
      if (!level_shift.empty()) fit_cmd.spec.level_shift = YearMonth::parse(level_shift);
      const auto out = cli::cmd_fit(fit_cmd);
      std::cout << out.table;
      if (out.exit_code == cli::kExitNotConverged) {
        std::cerr << "lacount: fit did not converge: " << out.report.message << '\n';
      }
      return out.exit_code;
    }
    if (*predict) {
      const bool to_stdout = pred_cmd.output_path.empty();
      const auto rows = cli::cmd_predict(pred_cmd);
      if (to_stdout) cli::write_band_csv("/dev/stdout", rows);
      return cli::kExitOk;
    }
    if (*simulate) {
      if (sim_scenario) {
        sim_cmd.params = scenario(*sim_scenario).params();
      } else {
        sim_cmd.params.beta = Eigen::Map<const Eigen::VectorXd>(sim_beta.data(), 1);
        sim_cmd.params.sigma2 = sim_sigma2;
        sim_cmd.params.phi = sim_phi;
      }
      sim_cmd.start = YearMonth::parse(sim_start);
      const auto s = cli::cmd_simulate(sim_cmd);
      if (sim_cmd.output_path.empty()) print_series(s);
      return cli::kExitOk;
    }
    if (*scen) {
      sc_cmd.schemes.clear();
      for (const auto& s : sc_schemes) sc_cmd.schemes.push_back(kSchemes.at(s));
      const auto rows = cli::cmd_scenarios(sc_cmd);
      if (sc_cmd.output_path.empty()) std::cout << cli::format_scenario_csv(rows);
      return cli::kExitOk;
    }
    if (*weights) {
      std::cout << cli::cmd_weights(w_d, w_scheme);
      return cli::kExitOk;
    }
  } catch (const DataError& e) {
    std::cerr << "lacount: " << e.what() << '\n';
    return cli::kExitError;
  } catch (const SingularMatrixError& e) {
    std::cerr << "lacount: " << e.what() << '\n';
    return cli::kExitError;
  } catch (const std::exception& e) {
    std::cerr << "lacount: " << e.what() << '\n';
    return cli::kExitError;
  }
  return cli::kExitOk;
}
