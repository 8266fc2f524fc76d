#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace tdtf {

/// Calendar day (UTC), stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

  static Date from_ymd(int year, unsigned month, unsigned day);

  /// Parses "YYYY-MM-DD". A trailing time component ("T..." ) is ignored.
  static Date parse(std::string_view iso);

  std::string to_iso() const;
  constexpr std::int32_t days() const noexcept { return days_; }

  friend constexpr auto operator<=>(Date, Date) = default;
  friend constexpr std::int32_t operator-(Date a, Date b) noexcept { return a.days_ - b.days_; }
  friend constexpr Date operator+(Date a, std::int32_t n) noexcept { return Date(a.days_ + n); }

 private:
  std::int32_t days_ = 0;
};

}  // namespace tdtf
