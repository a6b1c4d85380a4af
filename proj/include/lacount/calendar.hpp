#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace lacount {

/// Calendar month, the time unit of every series handled here.
struct YearMonth {
  int year = 1970;
  int month = 1;  // 1..12

  /// Parses "YYYY-MM"; throws std::invalid_argument on malformed input.
  static YearMonth parse(std::string_view text);

  [[nodiscard]] std::string str() const;

  /// Months since year 0, used for gap arithmetic.
  [[nodiscard]] int serial() const noexcept { return year * 12 + (month - 1); }
  static YearMonth from_serial(int serial) noexcept;

  [[nodiscard]] YearMonth plus(int months) const noexcept {
    return from_serial(serial() + months);
  }

  friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

}  // namespace lacount
