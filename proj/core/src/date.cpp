#include "tdtf/date.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "tdtf/error.hpp"

namespace tdtf {

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                        std::chrono::day{day}};
  if (!ymd.ok()) {
    throw Error(ErrorKind::ParseError, "invalid calendar date " + std::to_string(year) + "-" +
                                           std::to_string(month) + "-" + std::to_string(day));
  }
  const auto sys = std::chrono::sys_days{ymd};
  return Date(static_cast<std::int32_t>(sys.time_since_epoch().count()));
}

namespace {

bool parse_field(std::string_view text, int& out) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

Date Date::parse(std::string_view iso) {
  std::string_view day_part = iso;
  if (auto t = iso.find('T'); t != std::string_view::npos) day_part = iso.substr(0, t);
  int y = 0, m = 0, d = 0;
  if (day_part.size() != 10 || day_part[4] != '-' || day_part[7] != '-' ||
      !parse_field(day_part.substr(0, 4), y) || !parse_field(day_part.substr(5, 2), m) ||
      !parse_field(day_part.substr(8, 2), d)) {
    throw Error(ErrorKind::ParseError, "invalid ISO date '" + std::string(iso) + "'");
  }
  return from_ymd(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

std::string Date::to_iso() const {
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days_}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace tdtf
