#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace twofreq {

enum class DateFormat { iso, dmy };

/// Calendar date (proleptic Gregorian).
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;

  /// Days since 1970-01-01.
  long days_since_epoch() const;
  static Date from_days(long days);

  /// 0 = Sunday ... 6 = Saturday.
  int weekday() const;

  std::string to_string() const;  // YYYY-MM-DD
};

class DateParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses YYYY-MM-DD (an optional trailing time part such as " 00:00:00" is
/// ignored) or DD/MM/YYYY depending on `format`.
Date parse_date(std::string_view text, DateFormat format = DateFormat::iso);

bool is_valid_date(int year, int month, int day);

}  // namespace twofreq
