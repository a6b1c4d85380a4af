#include "lacount/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace lacount {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string where(const std::string& source, int line) {
  return source + ":" + std::to_string(line) + ": ";
}

DataFile parse_table(std::istream& in, const std::string& source, bool with_counts) {
  std::string line;
  int lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) {
      header = split(line);
      break;
    }
  }
  if (header.empty()) throw DataError(source + ": empty file", 0);

  int date_col = -1, count_col = -1;
  std::vector<std::pair<int, std::string>> extra;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    if (header[c] == "date") {
      date_col = c;
    } else if (header[c] == "count") {
      count_col = c;
    } else if (!header[c].empty()) {
      extra.emplace_back(c, header[c]);
    }
  }
  if (date_col < 0) throw DataError(where(source, lineno) + "missing 'date' column", lineno);
  if (with_counts && count_col < 0) {
    throw DataError(where(source, lineno) + "missing 'count' column", lineno);
  }

  DataFile df;
  for (const auto& [c, name] : extra) df.covariates[name];
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw DataError(where(source, lineno) + "expected " + std::to_string(header.size()) +
                          " fields, found " + std::to_string(fields.size()),
                      lineno);
    }
    YearMonth date;
    try {
      date = YearMonth::parse(fields[date_col]);
    } catch (const std::invalid_argument& e) {
      throw DataError(where(source, lineno) + e.what(), lineno);
    }
    if (!df.dates.empty()) {
      const int step = date.serial() - df.dates.back().serial();
      if (step == 0) {
        throw DataError(where(source, lineno) + "duplicate month " + date.str(), lineno);
      }
      if (step < 0) {
        throw DataError(where(source, lineno) + "month " + date.str() +
                            " is out of order after " + df.dates.back().str(),
                        lineno);
      }
      if (step > 1) {
        throw DataError(where(source, lineno) + "gap of " + std::to_string(step - 1) +
                            " missing month(s) between " + df.dates.back().str() +
                            " and " + date.str(),
                        lineno);
      }
    }
    df.dates.push_back(date);

    if (with_counts) {
      const std::string& text = fields[count_col];
      long long value = 0;
      const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
      if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw DataError(where(source, lineno) + "count '" + text + "' is not an integer",
                        lineno);
      }
      if (value < 0) {
        throw DataError(where(source, lineno) + "negative count " + text, lineno);
      }
      if (value > 1'000'000'000) {
        throw DataError(where(source, lineno) + "count " + text + " is too large", lineno);
      }
      df.counts.push_back(static_cast<int>(value));
    }
    for (const auto& [c, name] : extra) {
      const std::string& text = fields[c];
      double value = 0.0;
      const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
      if (res.ec != std::errc{} || res.ptr != text.data() + text.size() ||
          !std::isfinite(value)) {
        throw DataError(where(source, lineno) + "column '" + name + "' value '" + text +
                            "' is not a finite number",
                        lineno);
      }
      df.covariates[name].push_back(value);
    }
  }
  if (df.dates.empty()) throw DataError(source + ": no data rows", lineno);
  return df;
}

}  // namespace

DataFile DataFile::slice(int begin, int end) const {
  DataFile out;
  out.dates.assign(dates.begin() + begin, dates.begin() + end);
  if (!counts.empty()) out.counts.assign(counts.begin() + begin, counts.begin() + end);
  for (const auto& [name, col] : covariates) {
    out.covariates[name].assign(col.begin() + begin, col.begin() + end);
  }
  return out;
}

DataFile parse_count_csv(std::istream& in, const std::string& source) {
  return parse_table(in, source, true);
}

DataFile read_count_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path, 0);
  return parse_table(in, path, true);
}

DataFile read_covariate_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path, 0);
  return parse_table(in, path, false);
}

std::vector<std::string> ModelSpec::term_names() const {
  std::vector<std::string> names{"intercept"};
  if (trend) names.emplace_back("trend");
  if (level_shift) names.emplace_back("level_shift");
  for (const auto& c : covariates) names.push_back(c);
  if (harmonic_period) {
    names.emplace_back("sin");
    names.emplace_back("cos");
  }
  return names;
}

Eigen::MatrixXd design_matrix(const ModelSpec& spec, const DesignContext& ctx,
                              const std::vector<YearMonth>& dates,
                              const std::map<std::string, std::vector<double>>& covariates) {
  const auto n = static_cast<Eigen::Index>(dates.size());
  const auto cols = static_cast<Eigen::Index>(spec.term_names().size());
  Eigen::MatrixXd X(n, cols);
  for (const auto& name : spec.covariates) {
    auto it = covariates.find(name);
    if (it == covariates.end()) {
      throw std::invalid_argument("no values for covariate '" + name + "'");
    }
    if (static_cast<Eigen::Index>(it->second.size()) < n) {
      throw std::invalid_argument("covariate '" + name + "' has " +
                                  std::to_string(it->second.size()) + " values for " +
                                  std::to_string(n) + " months");
    }
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    const double t = dates[r].serial() - ctx.origin.serial() + 1;
    Eigen::Index c = 0;
    X(r, c++) = 1.0;
    if (spec.trend) X(r, c++) = t / ctx.trend_scale;
    if (spec.level_shift) X(r, c++) = dates[r] < *spec.level_shift ? 1.0 : 0.0;
    for (const auto& name : spec.covariates) X(r, c++) = covariates.at(name)[r];
    if (spec.harmonic_period) {
      const double angle = 2.0 * std::numbers::pi * t / *spec.harmonic_period;
      X(r, c++) = std::sin(angle);
      X(r, c++) = std::cos(angle);
    }
  }
  return X;
}

void write_count_csv(const std::string& path, const std::vector<YearMonth>& dates,
                     const std::vector<int>& counts) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "date,count\n";
  for (std::size_t i = 0; i < dates.size(); ++i) out << dates[i].str() << ',' << counts[i] << '\n';
}

}  // namespace lacount
