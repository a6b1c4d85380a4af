#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lacount/calendar.hpp"
#include "lacount/estimation.hpp"
#include "lacount/model.hpp"

namespace lacount {

/// Parse/validation failure in an input file; `line` is 1-based (0 if none).
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, int line)
      : std::runtime_error(what), line_(line) {}
  [[nodiscard]] int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Monthly count table: `date` (YYYY-MM), `count`, optional numeric columns.
struct DataFile {
  std::vector<YearMonth> dates;
  std::vector<int> counts;
  std::map<std::string, std::vector<double>> covariates;

  [[nodiscard]] int size() const noexcept { return static_cast<int>(dates.size()); }
  /// Rows [begin, end).
  [[nodiscard]] DataFile slice(int begin, int end) const;
};

DataFile parse_count_csv(std::istream& in, const std::string& source);
DataFile read_count_csv(const std::string& path);

/// Future covariate table: `date` plus numeric columns, no count column.
DataFile read_covariate_csv(const std::string& path);

/// Linear predictor terms and fitting settings for a monthly series.
struct ModelSpec {
  bool trend = false;                   // t / trend_scale
  std::optional<int> harmonic_period;   // sin(2 pi t / P), cos(2 pi t / P)
  std::optional<YearMonth> level_shift; // 1 before this month, 0 from it on
  std::vector<std::string> covariates;  // user columns

  int d = 1;
  WeightScheme scheme = WeightScheme::trapezoidal;
  int quad_order = 20;
  Restriction restriction = Restriction::none;
  std::optional<int> hac_lags;
  int holdout_months = 0;

  [[nodiscard]] std::vector<std::string> term_names() const;
};

/// Time origin for the trend and harmonic terms. t = 1 at `origin`; the
/// trend divisor is frozen at the fitting-window length.
struct DesignContext {
  YearMonth origin;
  int trend_scale = 1;
};

/// Design rows for `dates`; user covariates are looked up in `covariates`
/// and must cover every requested date.
Eigen::MatrixXd design_matrix(const ModelSpec& spec, const DesignContext& ctx,
                              const std::vector<YearMonth>& dates,
                              const std::map<std::string, std::vector<double>>& covariates);

/// Writes a `date,count` CSV.
void write_count_csv(const std::string& path, const std::vector<YearMonth>& dates,
                     const std::vector<int>& counts);

}  // namespace lacount
