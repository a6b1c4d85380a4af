#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "lacount/commands.hpp"
#include "lacount/errors.hpp"
#include "lacount/estimation.hpp"
#include "lacount/scenarios.hpp"
#include "lacount/simulate.hpp"

namespace py = pybind11;
using namespace lacount;

namespace {

Params make_params(const Eigen::VectorXd& beta, double sigma2, double phi) {
  Params p;
  p.beta = beta;
  p.sigma2 = sigma2;
  p.phi = phi;
  return p;
}

Eigen::MatrixXd design_or_ones(const std::optional<Eigen::MatrixXd>& X, int n) {
  return X ? *X : Eigen::MatrixXd::Ones(n, 1);
}

py::dict fit_to_dict(const FitResult& f) {
  py::dict d;
  d["beta"] = f.params_hat.beta;
  d["sigma2"] = f.params_hat.sigma2;
  d["phi"] = f.params_hat.phi;
  d["tau2"] = f.params_hat.tau2();
  d["se"] = f.se;
  d["loglik"] = f.loglik;
  d["clic"] = f.clic;
  d["trace_penalty"] = f.trace_penalty;
  d["H"] = f.H_hat;
  d["J"] = f.J_hat;
  d["avar"] = f.avar_working;
  d["hac_lags"] = f.hac_lags;
  d["converged"] = f.converged;
  d["iterations"] = f.iterations;
  d["message"] = f.message;
  d["restriction"] = to_string(f.restriction);
  d["n"] = f.n;
  return d;
}

py::dict summary_to_dict(const ParamSummary& s) {
  py::dict d;
  d["parameter"] = s.name;
  d["truth"] = s.truth;
  d["mean"] = s.mean;
  d["median"] = s.median;
  d["median_bias"] = s.median_bias;
  d["rmse"] = s.rmse;
  d["sd"] = s.sd;
  d["mean_se"] = s.mean_se;
  d["n_ok"] = s.n_ok;
  return d;
}

}  // namespace

PYBIND11_MODULE(lacount, m) {
  m.doc() = "Pairwise likelihood for latent AR(1) Poisson count series";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<SingularMatrixError>(m, "SingularMatrixError", PyExc_ArithmeticError);

  m.def(
      "gauss_hermite",
      [](int order) {
        const QuadRule r = gauss_hermite(order);
        return py::make_tuple(Eigen::Map<const Eigen::VectorXd>(r.nodes.data(), r.order).eval(),
                              Eigen::Map<const Eigen::VectorXd>(r.weights.data(), r.order).eval());
      },
      py::arg("order"), "Nodes and weights of the Hermite rule for exp(-x^2).");

  m.def(
      "pair_weights",
      [](int d, const std::string& scheme) {
        const PairWeights pw = make_weights(d, parse_weight_scheme(scheme));
        py::dict out;
        out["window"] = pw.window;
        out["weights"] = pw.w;
        out["unnormalized"] = pw.unnormalized;
        return out;
      },
      py::arg("d"), py::arg("scheme") = "trapezoidal");

  m.def(
      "simulate",
      [](const Eigen::VectorXd& beta, double sigma2, double phi, int n, std::uint64_t seed,
         int replicate, std::optional<Eigen::MatrixXd> X) {
        SimConfig cfg;
        cfg.params = make_params(beta, sigma2, phi);
        cfg.X = X ? *X : Eigen::MatrixXd::Ones(n, beta.size());
        cfg.seed = seed;
        return simulate_series(cfg, replicate).y;
      },
      py::arg("beta"), py::arg("sigma2"), py::arg("phi"), py::arg("n") = 500,
      py::arg("seed") = 1, py::arg("replicate") = 0, py::arg("X") = py::none(),
      "Counts of one replicate. X defaults to an intercept column of length n.");

  m.def(
      "fit",
      [](const std::vector<int>& y, std::optional<Eigen::MatrixXd> X, int d,
         const std::string& weights, int nodes, const std::string& restriction,
         std::optional<int> hac_lags, bool allow_singular) {
        CountSeries s;
        s.y = y;
        s.X = design_or_ones(X, static_cast<int>(y.size()));
        FitOptions opt;
        opt.quad_order = nodes;
        opt.restriction = parse_restriction(restriction);
        opt.hac_lags = hac_lags;
        opt.allow_singular_H = allow_singular;
        FitResult f;
        {
          py::gil_scoped_release release;
          f = fit(s, make_weights(d, parse_weight_scheme(weights)), opt);
        }
        return fit_to_dict(f);
      },
      py::arg("y"), py::arg("X") = py::none(), py::arg("d") = 1,
      py::arg("weights") = "trapezoidal", py::arg("nodes") = 20,
      py::arg("restriction") = "none", py::arg("hac_lags") = py::none(),
      py::arg("allow_singular") = false);

  m.def(
      "predict",
      [](const Eigen::VectorXd& beta, double sigma2, double phi, const Eigen::MatrixXd& X,
         int n_sim, std::uint64_t seed, double level) {
        const PredictionBand b = predict(make_params(beta, sigma2, phi), X, n_sim, seed, level);
        return py::make_tuple(b.point, b.upper);
      },
      py::arg("beta"), py::arg("sigma2"), py::arg("phi"), py::arg("X"),
      py::arg("n_sim") = 10000, py::arg("seed") = 1, py::arg("level") = 0.95,
      "Mean and upper quantile of simulated counts per row of X.");

  m.def(
      "scenario",
      [](int id) {
        const Scenario& s = scenario(id);
        py::dict d;
        d["id"] = s.id;
        d["D"] = s.D;
        d["beta"] = s.beta;
        d["phi"] = s.phi;
        d["sigma2"] = s.sigma * s.sigma;
        d["tau2"] = s.tau2;
        return d;
      },
      py::arg("id"));

  m.def(
      "scenarios",
      [](const std::vector<int>& ids, int n_series, int n_len, int d, const std::string& weights,
         int nodes, std::uint64_t seed) {
        cli::ScenariosCommand cmd;
        cmd.ids = ids;
        cmd.n_series = n_series;
        cmd.n_len = n_len;
        cmd.d_values = {d};
        cmd.schemes = {parse_weight_scheme(weights)};
        cmd.quad_orders = {nodes};
        cmd.seed = seed;
        std::vector<cli::ScenarioRow> rows;
        {
          py::gil_scoped_release release;
          rows = cli::cmd_scenarios(cmd);
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict row = summary_to_dict(r.summary);
          row["scenario"] = r.scenario;
          row["n_failed"] = r.n_failed;
          row["n_not_converged"] = r.n_not_converged;
          row["n_singular"] = r.n_singular;
          out.append(row);
        }
        return out;
      },
      py::arg("ids"), py::arg("n_series") = 100, py::arg("n_len") = 500, py::arg("d") = 1,
      py::arg("weights") = "trapezoidal", py::arg("nodes") = 20, py::arg("seed") = 1);

  m.def(
      "fit_file",
      [](const std::string& path, int d, const std::string& weights, int nodes,
         const std::string& restriction, std::optional<int> hac_lags, int holdout_months,
         bool trend, std::optional<int> harmonic, std::optional<std::string> level_shift,
         const std::vector<std::string>& covariates, const std::string& output) {
        cli::FitCommand cmd;
        cmd.data_path = path;
        cmd.output_path = output;
        ModelSpec& s = cmd.spec;
        s.d = d;
        s.scheme = parse_weight_scheme(weights);
        s.quad_order = nodes;
        s.restriction = parse_restriction(restriction);
        s.hac_lags = hac_lags;
        s.holdout_months = holdout_months;
        s.trend = trend;
        s.harmonic_period = harmonic;
        if (level_shift) s.level_shift = YearMonth::parse(*level_shift);
        s.covariates = covariates;
        const cli::FitOutcome out = cli::cmd_fit(cmd);
        return py::make_tuple(to_json(out.report).dump(), out.table);
      },
      py::arg("path"), py::arg("d") = 1, py::arg("weights") = "trapezoidal",
      py::arg("nodes") = 20, py::arg("restriction") = "none", py::arg("hac_lags") = py::none(),
      py::arg("holdout_months") = 0, py::arg("trend") = false, py::arg("harmonic") = py::none(),
      py::arg("level_shift") = py::none(), py::arg("covariates") = std::vector<std::string>{},
      py::arg("output") = "",
      "Same as `lacount fit`. Returns the JSON report text and the summary table.");

  m.def(
      "predict_file",
      [](const std::string& report, int horizon, int n_sim, std::uint64_t seed,
         const std::string& output) {
        cli::PredictCommand cmd;
        cmd.report_path = report;
        cmd.horizon = horizon;
        cmd.n_sim = n_sim;
        cmd.seed = seed;
        cmd.output_path = output;
        py::list out;
        for (const auto& r : cli::cmd_predict(cmd)) {
          py::dict row;
          row["date"] = r.date.str();
          row["point"] = r.point;
          row["upper95"] = r.upper95;
          row["observed"] = r.observed ? py::cast(*r.observed) : py::none();
          row["exceeds"] = r.exceeds;
          out.append(row);
        }
        return out;
      },
      py::arg("report"), py::arg("horizon") = 12, py::arg("n_sim") = 10000,
      py::arg("seed") = 1, py::arg("output") = "");

  m.def(
      "weights_table",
      [](int d, const std::string& scheme) { return cli::cmd_weights(d, parse_weight_scheme(scheme)); },
      py::arg("d"), py::arg("scheme") = "trapezoidal");
}
