#include "lacount/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lacount {

using nlohmann::json;

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  }
  return m;
}

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

json data_json(const DataFile& df) {
  std::vector<std::string> dates;
  for (const auto& d : df.dates) dates.push_back(d.str());
  return {{"dates", dates}, {"counts", df.counts}, {"covariates", df.covariates}};
}

DataFile data_from(const json& j) {
  DataFile df;
  for (const auto& d : j.at("dates")) df.dates.push_back(YearMonth::parse(d.get<std::string>()));
  df.counts = j.at("counts").get<std::vector<int>>();
  df.covariates = j.at("covariates").get<std::map<std::string, std::vector<double>>>();
  return df;
}

json spec_json(const ModelSpec& s) {
  json j;
  j["trend"] = s.trend;
  j["harmonic_period"] = s.harmonic_period ? json(*s.harmonic_period) : json(nullptr);
  j["level_shift"] = s.level_shift ? json(s.level_shift->str()) : json(nullptr);
  j["covariates"] = s.covariates;
  j["d"] = s.d;
  j["scheme"] = to_string(s.scheme);
  j["quad_order"] = s.quad_order;
  j["restriction"] = to_string(s.restriction);
  j["hac_lags"] = s.hac_lags ? json(*s.hac_lags) : json(nullptr);
  j["holdout_months"] = s.holdout_months;
  return j;
}

ModelSpec spec_from(const json& j) {
  ModelSpec s;
  s.trend = j.at("trend").get<bool>();
  if (!j.at("harmonic_period").is_null()) s.harmonic_period = j["harmonic_period"].get<int>();
  if (!j.at("level_shift").is_null()) {
    s.level_shift = YearMonth::parse(j["level_shift"].get<std::string>());
  }
  s.covariates = j.at("covariates").get<std::vector<std::string>>();
  s.d = j.at("d").get<int>();
  s.scheme = parse_weight_scheme(j.at("scheme").get<std::string>());
  s.quad_order = j.at("quad_order").get<int>();
  s.restriction = parse_restriction(j.at("restriction").get<std::string>());
  if (!j.at("hac_lags").is_null()) s.hac_lags = j["hac_lags"].get<int>();
  s.holdout_months = j.at("holdout_months").get<int>();
  return s;
}

}  // namespace

FitReport make_fit_report(const ModelSpec& spec, const DesignContext& ctx,
                          const DataFile& training, const DataFile& holdout,
                          const FitResult& fit, const Eigen::VectorXd& dispersion) {
  FitReport r;
  r.spec = spec;
  r.context = ctx;
  r.training = training;
  r.holdout = holdout;
  r.terms = spec.term_names();
  r.params = fit.params_hat;
  r.working = fit.working_hat;
  r.se = fit.se;
  r.loglik = fit.loglik;
  r.clic = fit.clic;
  r.trace_penalty = fit.trace_penalty;
  r.hac_lags = fit.hac_lags;
  r.quad_order = fit.quad_order;
  r.weights = fit.weights;
  r.H = fit.H_hat;
  r.J = fit.J_hat;
  r.godambe = fit.godambe;
  r.converged = fit.converged;
  r.iterations = fit.iterations;
  r.message = fit.message;
  if (dispersion.size() > 0) {
    std::vector<double> d(dispersion.data(), dispersion.data() + dispersion.size());
    std::sort(d.begin(), d.end());
    r.dispersion_min = d.front();
    r.dispersion_max = d.back();
    const auto mid = d.size() / 2;
    r.dispersion_median = d.size() % 2 ? d[mid] : 0.5 * (d[mid - 1] + d[mid]);
  }
  return r;
}

json to_json(const FitReport& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["model"] = spec_json(r.spec);
  j["context"] = {{"origin", r.context.origin.str()}, {"trend_scale", r.context.trend_scale}};
  j["terms"] = r.terms;
  j["params"] = {{"beta", vector_json(r.params.beta)},
                 {"sigma2", r.params.sigma2},
                 {"phi", r.params.phi},
                 {"tau2", r.params.tau2()}};
  j["working"] = {{"beta", vector_json(r.working.beta)},
                  {"log_sigma2", r.working.log_sigma2},
                  {"z_phi", r.working.z_phi}};

  json est = json::array();
  std::vector<std::string> names = r.terms;
  names.insert(names.end(), {"sigma2", "phi", "tau2"});
  const Eigen::Index nb = r.params.beta.size();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    double value = k < nb ? r.params.beta[k]
                   : k == nb     ? r.params.sigma2
                   : k == nb + 1 ? r.params.phi
                                 : r.params.tau2();
    est.push_back({{"name", names[i]}, {"estimate", value}, {"se", r.se[k]}});
  }
  j["estimates"] = est;
  j["se"] = vector_json(r.se);
  j["loglik"] = r.loglik;
  j["clic"] = r.clic;
  j["trace_penalty"] = r.trace_penalty;
  j["hac_lags"] = r.hac_lags;
  j["quad_order"] = r.quad_order;
  j["weights"] = {{"d", r.weights.d},
                  {"scheme", to_string(r.weights.scheme)},
                  {"window", r.weights.window},
                  {"normalized", r.weights.w},
                  {"unnormalized", r.weights.unnormalized}};
  j["H"] = matrix_json(r.H);
  j["J"] = matrix_json(r.J);
  j["godambe"] = matrix_json(r.godambe);
  j["convergence"] = {
      {"converged", r.converged}, {"iterations", r.iterations}, {"message", r.message}};
  j["dispersion_index"] = {
      {"min", r.dispersion_min}, {"median", r.dispersion_median}, {"max", r.dispersion_max}};
  j["training"] = data_json(r.training);
  j["holdout"] = data_json(r.holdout);
  return j;
}

FitReport fit_report_from_json(const json& j) {
  FitReport r;
  r.schema_version = j.at("schema_version").get<int>();
  if (r.schema_version != kReportSchemaVersion) {
    throw std::invalid_argument("unsupported fit report schema_version " +
                                std::to_string(r.schema_version));
  }
  r.spec = spec_from(j.at("model"));
  r.context.origin = YearMonth::parse(j.at("context").at("origin").get<std::string>());
  r.context.trend_scale = j["context"].at("trend_scale").get<int>();
  r.terms = j.at("terms").get<std::vector<std::string>>();
  r.params.beta = vector_from(j.at("params").at("beta"));
  r.params.sigma2 = j["params"].at("sigma2").get<double>();
  r.params.phi = j["params"].at("phi").get<double>();
  r.working.beta = vector_from(j.at("working").at("beta"));
  r.working.log_sigma2 = j["working"].at("log_sigma2").get<double>();
  r.working.z_phi = j["working"].at("z_phi").get<double>();
  r.se = vector_from(j.at("se"));
  r.loglik = j.at("loglik").get<double>();
  r.clic = j.at("clic").get<double>();
  r.trace_penalty = j.at("trace_penalty").get<double>();
  r.hac_lags = j.at("hac_lags").get<int>();
  r.quad_order = j.at("quad_order").get<int>();
  r.weights = make_weights(j.at("weights").at("d").get<int>(),
                           parse_weight_scheme(j["weights"].at("scheme").get<std::string>()));
  r.H = matrix_from(j.at("H"));
  r.J = matrix_from(j.at("J"));
  r.godambe = matrix_from(j.at("godambe"));
  r.converged = j.at("convergence").at("converged").get<bool>();
  r.iterations = j["convergence"].at("iterations").get<int>();
  r.message = j["convergence"].at("message").get<std::string>();
  r.dispersion_min = j.at("dispersion_index").at("min").get<double>();
  r.dispersion_median = j["dispersion_index"].at("median").get<double>();
  r.dispersion_max = j["dispersion_index"].at("max").get<double>();
  r.training = data_from(j.at("training"));
  r.holdout = data_from(j.at("holdout"));
  return r;
}

void write_fit_report(const std::string& path, const FitReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json(report).dump(2) << '\n';
}

FitReport read_fit_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return fit_report_from_json(json::parse(in));
}

std::string format_fit_table(const FitReport& r) {
  std::ostringstream os;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-14s %12s %12s\n", "parameter", "estimate", "robust se");
  os << buf;
  const Eigen::Index nb = r.params.beta.size();
  auto line = [&](const std::string& name, double value, double se) {
    std::snprintf(buf, sizeof buf, "%-14s %12.4f %12.4f\n", name.c_str(), value, se);
    os << buf;
  };
  for (Eigen::Index k = 0; k < nb; ++k) line(r.terms[k], r.params.beta[k], r.se[k]);
  line("sigma2", r.params.sigma2, r.se[nb]);
  line("phi", r.params.phi, r.se[nb + 1]);
  line("tau2", r.params.tau2(), r.se[nb + 2]);
  std::snprintf(buf, sizeof buf,
                "\npairwise loglik %.4f   CLIC %.2f   trace(H^-1 J) %.3f\n"
                "d=%d %s, %d nodes, HAC lags %d, %s after %d iterations\n"
                "preliminary dispersion index: min %.2f, median %.2f, max %.2f\n",
                r.loglik, r.clic, r.trace_penalty, r.weights.d,
                to_string(r.weights.scheme).c_str(), r.quad_order, r.hac_lags,
                r.converged ? "converged" : "NOT converged", r.iterations,
                r.dispersion_min, r.dispersion_median, r.dispersion_max);
  os << buf;
  return os.str();
}

}  // namespace lacount
