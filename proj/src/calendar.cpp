#include "lacount/calendar.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace lacount {

YearMonth YearMonth::parse(std::string_view text) {
  auto fail = [&] {
    throw std::invalid_argument("invalid month '" + std::string(text) +
                                "', expected YYYY-MM");
  };
  if (text.size() != 7 || text[4] != '-') fail();
  int year = 0;
  int month = 0;
  auto r1 = std::from_chars(text.data(), text.data() + 4, year);
  auto r2 = std::from_chars(text.data() + 5, text.data() + 7, month);
  if (r1.ec != std::errc{} || r1.ptr != text.data() + 4) fail();
  if (r2.ec != std::errc{} || r2.ptr != text.data() + 7) fail();
  if (month < 1 || month > 12) fail();
  return {year, month};
}

std::string YearMonth::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

YearMonth YearMonth::from_serial(int serial) noexcept {
  return {serial / 12, serial % 12 + 1};
}

}  // namespace lacount
