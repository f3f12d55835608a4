#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace colourrisk {

/// Calendar date stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;

  static constexpr Date from_days(std::int32_t days) {
    Date d;
    d.days_ = days;
    return d;
  }
  static Date from_ymd(int year, unsigned month, unsigned day);

  /// Accepts "YYYY-MM-DD", optionally followed by a time part ('T' or ' ').
  static std::optional<Date> parse(std::string_view text);

  std::string iso() const;
  constexpr std::int32_t days_since_epoch() const { return days_; }
  /// 0 = Monday .. 6 = Sunday.
  int weekday() const;

  constexpr Date operator+(int n) const { return from_days(days_ + n); }
  constexpr Date operator-(int n) const { return from_days(days_ - n); }
  constexpr int operator-(Date other) const { return days_ - other.days_; }
  constexpr auto operator<=>(const Date&) const = default;

 private:
  std::int32_t days_ = 0;
};

}  // namespace colourrisk
