#include "lacount/commands.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "lacount/simulate.hpp"

namespace lacount::cli {

FitOutcome fit_data(const DataFile& data, const ModelSpec& spec) {
  const int n = data.size();
  const int h = spec.holdout_months;
  if (h < 0 || h >= n) {
    throw std::invalid_argument("holdout of " + std::to_string(h) +
                                " months leaves no data to fit");
  }
  const DataFile training = data.slice(0, n - h);
  const DataFile holdout = data.slice(n - h, n);
  const DesignContext ctx{training.dates.front(), training.size()};
  if (spec.level_shift) {
    if (!(*spec.level_shift > training.dates.front() &&
          *spec.level_shift <= training.dates.back())) {
      throw std::invalid_argument("level shift " + spec.level_shift->str() +
                                  " is not inside the fitting window " +
                                  training.dates.front().str() + " .. " +
                                  training.dates.back().str());
    }
  }
  for (const auto& name : spec.covariates) {
    if (!data.covariates.contains(name)) {
      throw std::invalid_argument("data has no column '" + name + "'");
    }
  }

  CountSeries series;
  series.y = training.counts;
  series.dates = training.dates;
  series.X = design_matrix(spec, ctx, training.dates, training.covariates);

  FitOptions opt;
  opt.quad_order = spec.quad_order;
  opt.restriction = spec.restriction;
  opt.hac_lags = spec.hac_lags;
  const FitResult fr = fit(series, make_weights(spec.d, spec.scheme), opt);

  Eigen::VectorXd dispersion;
  try {
    const Params init = moment_init(series);
    dispersion.resize(series.size());
    for (int t = 0; t < series.size(); ++t) {
      dispersion[t] = dispersion_index(series.X.row(t).transpose(), init);
    }
  } catch (const std::invalid_argument&) {
    dispersion.resize(0);
  }

  FitOutcome out;
  out.report = make_fit_report(spec, ctx, training, holdout, fr, dispersion);
  out.table = format_fit_table(out.report);
  out.exit_code = fr.converged ? kExitOk : kExitNotConverged;
  return out;
}

FitOutcome cmd_fit(const FitCommand& cmd) {
  FitOutcome out = fit_data(read_count_csv(cmd.data_path), cmd.spec);
  if (!cmd.output_path.empty()) write_fit_report(cmd.output_path, out.report);
  return out;
}

std::vector<BandRow> predict_report(const FitReport& report, const PredictCommand& cmd) {
  if (!report.converged) {
    throw std::invalid_argument("fit report did not converge (" + report.message +
                                "); refusing to predict");
  }
  if (cmd.horizon < 0) throw std::invalid_argument("horizon must be >= 0");

  std::vector<YearMonth> dates = report.training.dates;
  const int n_in = static_cast<int>(dates.size());
  for (int k = 1; k <= cmd.horizon; ++k) dates.push_back(report.training.dates.back().plus(k));

  DataFile future_file;
  if (cmd.future_covariates_path) future_file = read_covariate_csv(*cmd.future_covariates_path);
  std::map<std::string, std::vector<double>> covariates;
  for (const auto& name : report.spec.covariates) {
    std::map<YearMonth, double> known;
    auto absorb = [&](const DataFile& df) {
      auto it = df.covariates.find(name);
      if (it == df.covariates.end()) return;
      for (int i = 0; i < df.size(); ++i) known[df.dates[i]] = it->second[i];
    };
    absorb(report.training);
    absorb(report.holdout);
    absorb(future_file);
    auto& col = covariates[name];
    for (const auto& d : dates) {
      auto it = known.find(d);
      if (it == known.end()) {
        throw std::invalid_argument("future value of covariate '" + name + "' for " +
                                    d.str() +
                                    " is unknown; supply a future-covariate file");
      }
      col.push_back(it->second);
    }
  }
  const Eigen::MatrixXd X = design_matrix(report.spec, report.context, dates, covariates);
  const PredictionBand band = predict(report.params, X, cmd.n_sim, cmd.seed);

  std::map<YearMonth, int> observed;
  for (int i = 0; i < report.training.size(); ++i) {
    observed[report.training.dates[i]] = report.training.counts[i];
  }
  for (int i = 0; i < report.holdout.size(); ++i) {
    observed[report.holdout.dates[i]] = report.holdout.counts[i];
  }
  if (cmd.observed_path) {
    const DataFile obs = read_count_csv(*cmd.observed_path);
    for (int i = 0; i < obs.size(); ++i) observed[obs.dates[i]] = obs.counts[i];
  }

  std::vector<BandRow> rows;
  rows.reserve(dates.size());
  for (std::size_t t = 0; t < dates.size(); ++t) {
    BandRow r;
    r.date = dates[t];
    r.in_sample = static_cast<int>(t) < n_in;
    r.point = band.point[t];
    r.upper95 = band.upper[t];
    if (auto it = observed.find(dates[t]); it != observed.end()) {
      r.observed = it->second;
      r.exceeds = it->second > r.upper95;
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<BandRow> cmd_predict(const PredictCommand& cmd) {
  auto rows = predict_report(read_fit_report(cmd.report_path), cmd);
  if (!cmd.output_path.empty()) write_band_csv(cmd.output_path, rows);
  return rows;
}

void write_band_csv(const std::string& path, const std::vector<BandRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "date,point,upper95,observed,exceeds\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.4f", r.point);
    out << r.date.str() << ',' << buf << ',' << r.upper95 << ',';
    if (r.observed) {
      out << *r.observed << ',' << (r.exceeds ? "true" : "false");
    } else {
      out << ',';
    }
    out << '\n';
  }
}

CountSeries cmd_simulate(const SimulateCommand& cmd) {
  SimConfig cfg;
  cfg.params = cmd.params;
  cfg.X = Eigen::MatrixXd::Ones(cmd.n, cmd.params.beta.size());
  cfg.seed = cmd.seed;
  CountSeries s = simulate_series(cfg, cmd.replicate);
  for (int t = 0; t < cmd.n; ++t) s.dates.push_back(cmd.start.plus(t));
  if (!cmd.output_path.empty()) write_count_csv(cmd.output_path, s.dates, s.y);
  return s;
}

std::vector<ScenarioRow> cmd_scenarios(const ScenariosCommand& cmd) {
  std::vector<ScenarioRow> rows;
  for (int id : cmd.ids) {
    const Scenario& sc = scenario(id);
    for (WeightScheme scheme : cmd.schemes) {
      for (int d : cmd.d_values) {
        for (int nodes : cmd.quad_orders) {
          ReplicateSpec rs;
          rs.truth = sc.params();
          rs.n_series = cmd.n_series;
          rs.n_len = cmd.n_len;
          rs.seed = cmd.seed + 1000003ULL * static_cast<std::uint64_t>(id);
          rs.d = d;
          rs.scheme = scheme;
          rs.quad_order = nodes;
          const auto fits = run_replicates(rs);
          int failed = 0, not_conv = 0, singular = 0;
          for (const auto& f : fits) {
            failed += !f.ok;
            not_conv += f.ok && !f.converged;
            singular += f.ok && f.singular;
          }
          for (const auto& s : summarize_replicates(rs.truth, fits)) {
            rows.push_back({id, d, scheme, nodes, failed, not_conv, singular, s});
          }
        }
      }
    }
  }
  if (!cmd.output_path.empty()) {
    std::ofstream out(cmd.output_path);
    if (!out) throw std::runtime_error("cannot write " + cmd.output_path);
    out << format_scenario_csv(rows);
  }
  return rows;
}

std::string format_scenario_csv(const std::vector<ScenarioRow>& rows) {
  std::ostringstream os;
  os << "scenario,d,scheme,nodes,parameter,truth,mean,median,median_bias,rmse,sd,mean_se,"
        "n_ok,n_failed,n_not_converged,n_singular\n";
  char buf[512];
  for (const auto& r : rows) {
    const auto& s = r.summary;
    std::snprintf(buf, sizeof buf,
                  "%d,%d,%s,%d,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d,%d,%d,%d\n", r.scenario,
                  r.d, to_string(r.scheme).c_str(), r.quad_order, s.name.c_str(), s.truth,
                  s.mean, s.median, s.median_bias, s.rmse, s.sd, s.mean_se, s.n_ok,
                  r.n_failed, r.n_not_converged, r.n_singular);
    os << buf;
  }
  return os.str();
}

std::string cmd_weights(int d, WeightScheme scheme) {
  const PairWeights pw = make_weights(d, scheme);
  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof buf, "# d=%d %s, window m_d=%d\n%4s %14s %14s\n", d,
                to_string(scheme).c_str(), pw.window, "lag", "unnormalized", "normalized");
  os << buf;
  for (int i = 0; i < pw.lags(); ++i) {
    std::snprintf(buf, sizeof buf, "%4d %14.6f %14.6f\n", i + 1, pw.unnormalized[i], pw.w[i]);
    os << buf;
  }
  return os.str();
}

}  // namespace lacount::cli
