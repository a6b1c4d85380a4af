#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <string>
#include <vector>

#include "lacount/data.hpp"
#include "lacount/estimation.hpp"

namespace lacount {

inline constexpr int kReportSchemaVersion = 1;

/// Everything needed to describe a fit and to rebuild its design for
/// prediction. Serialized as versioned JSON.
struct FitReport {
  int schema_version = kReportSchemaVersion;
  ModelSpec spec;
  DesignContext context;
  DataFile training;
  DataFile holdout;
  std::vector<std::string> terms;

  Params params;
  WorkingParams working;
  Eigen::VectorXd se;
  double loglik = 0.0;
  double clic = 0.0;
  double trace_penalty = 0.0;
  int hac_lags = 0;
  int quad_order = 0;
  PairWeights weights;
  Eigen::MatrixXd H;
  Eigen::MatrixXd J;
  Eigen::MatrixXd godambe;
  bool converged = false;
  int iterations = 0;
  std::string message;

  // Preliminary dispersion indices from the moment estimates.
  double dispersion_min = 0.0;
  double dispersion_median = 0.0;
  double dispersion_max = 0.0;
};

FitReport make_fit_report(const ModelSpec& spec, const DesignContext& ctx,
                          const DataFile& training, const DataFile& holdout,
                          const FitResult& fit, const Eigen::VectorXd& dispersion);

nlohmann::json to_json(const FitReport& report);
FitReport fit_report_from_json(const nlohmann::json& j);

void write_fit_report(const std::string& path, const FitReport& report);
FitReport read_fit_report(const std::string& path);

/// Plain-text estimates table.
std::string format_fit_table(const FitReport& report);

}  // namespace lacount
