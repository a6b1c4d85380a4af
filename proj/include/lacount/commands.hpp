#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lacount/calendar.hpp"
#include "lacount/data.hpp"
#include "lacount/report.hpp"
#include "lacount/scenarios.hpp"

namespace lacount::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

struct FitCommand {
  std::string data_path;
  ModelSpec spec;
  std::string output_path;  // JSON report; empty to skip writing
};

struct FitOutcome {
  FitReport report;
  std::string table;
  int exit_code = kExitOk;
};

/// Reads the CSV, splits off the holdout, builds the design and fits.
FitOutcome cmd_fit(const FitCommand& cmd);
/// Same, from an in-memory table.
FitOutcome fit_data(const DataFile& data, const ModelSpec& spec);

struct PredictCommand {
  std::string report_path;
  int horizon = 12;
  int n_sim = 10000;
  std::uint64_t seed = 1;
  std::string output_path;  // CSV; empty to skip writing
  std::optional<std::string> observed_path;
  std::optional<std::string> future_covariates_path;
};

struct BandRow {
  YearMonth date;
  bool in_sample = true;
  double point = 0.0;
  int upper95 = 0;
  std::optional<int> observed;
  bool exceeds = false;
};

std::vector<BandRow> cmd_predict(const PredictCommand& cmd);
std::vector<BandRow> predict_report(const FitReport& report, const PredictCommand& cmd);
void write_band_csv(const std::string& path, const std::vector<BandRow>& rows);

struct SimulateCommand {
  Params params;
  int n = 500;
  std::uint64_t seed = 1;
  int replicate = 0;
  YearMonth start{2000, 1};
  std::string output_path;
};

CountSeries cmd_simulate(const SimulateCommand& cmd);

struct ScenariosCommand {
  std::vector<int> ids;
  int n_series = 100;
  int n_len = 500;
  std::vector<int> d_values{1};
  std::vector<WeightScheme> schemes{WeightScheme::trapezoidal};
  std::vector<int> quad_orders{20};
  std::uint64_t seed = 1;
  std::string output_path;
};

struct ScenarioRow {
  int scenario = 0;
  int d = 0;
  WeightScheme scheme = WeightScheme::trapezoidal;
  int quad_order = 0;
  int n_failed = 0;
  int n_not_converged = 0;
  int n_singular = 0;
  ParamSummary summary;
};

std::vector<ScenarioRow> cmd_scenarios(const ScenariosCommand& cmd);
std::string format_scenario_csv(const std::vector<ScenarioRow>& rows);

/// Weight table: lag, unnormalized, normalized.
std::string cmd_weights(int d, WeightScheme scheme);

}  // namespace lacount::cli
