#include "tdtf/version.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "tdtf/error.hpp"

namespace tdtf {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Version::Version(std::string_view raw) : raw_(raw) {
  std::size_t pos = 0;
  const std::size_t n = raw.size();
  while (pos < n && is_digit(raw[pos])) {
    std::size_t end = pos;
    while (end < n && is_digit(raw[end])) ++end;
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(raw.data() + pos, raw.data() + end, value);
    if (ec != std::errc{}) break;  // overflow: leave the rest to the qualifier
    numeric_.push_back(value);
    pos = end;
    // Continue only on ".<digit>"; anything else starts the qualifier.
    if (pos + 1 < n && raw[pos] == '.' && is_digit(raw[pos + 1])) {
      ++pos;
      continue;
    }
    break;
  }
  if (pos < n) {
    std::string_view rest = raw.substr(pos);
    if (!numeric_.empty() && (rest.front() == '-' || rest.front() == '.' || rest.front() == '_')) {
      rest.remove_prefix(1);
    }
    qualifier_ = std::string(rest);
  }
}

std::strong_ordering compare_versions(const Version& a, const Version& b, QualifierOrder order) {
  const auto& na = a.numeric_parts();
  const auto& nb = b.numeric_parts();
  const std::size_t len = std::max(na.size(), nb.size());
  for (std::size_t i = 0; i < len; ++i) {
    const std::int64_t x = i < na.size() ? na[i] : 0;
    const std::int64_t y = i < nb.size() ? nb[i] : 0;
    if (x != y) return x <=> y;
  }
  const auto& qa = a.qualifier();
  const auto& qb = b.qualifier();
  if (qa.has_value() != qb.has_value()) {
    const bool a_first = order == QualifierOrder::PreRelease ? qa.has_value() : qb.has_value();
    return a_first ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (!qa) return std::strong_ordering::equal;
  const int c = qa->compare(*qb);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

bool version_in_range(const Version& v, const VersionRange& r, QualifierOrder order) {
  if (r.lo) {
    const auto c = compare_versions(v, *r.lo, order);
    if (c < 0 || (c == 0 && !r.lo_inclusive)) return false;
  }
  if (r.hi) {
    const auto c = compare_versions(v, *r.hi, order);
    if (c > 0 || (c == 0 && !r.hi_inclusive)) return false;
  }
  return true;
}

VersionRange VersionRange::parse(std::string_view text) {
  const std::string_view t = trim(text);
  auto fail = [&] {
    return Error(ErrorKind::ParseError, "invalid version range '" + std::string(text) + "'");
  };
  if (t.size() < 3) throw fail();
  const char open = t.front();
  const char close = t.back();
  if ((open != '[' && open != '(') || (close != ']' && close != ')')) throw fail();
  const std::string_view body = t.substr(1, t.size() - 2);
  VersionRange r;
  const auto comma = body.find(',');
  if (comma == std::string_view::npos) {
    // "[1.2]" pins exactly one version.
    if (open != '[' || close != ']' || trim(body).empty()) throw fail();
    r.lo = Version(trim(body));
    r.hi = r.lo;
    r.lo_inclusive = r.hi_inclusive = true;
    return r;
  }
  const std::string_view lo = trim(body.substr(0, comma));
  const std::string_view hi = trim(body.substr(comma + 1));
  if (!lo.empty()) r.lo = Version(lo);
  if (!hi.empty()) r.hi = Version(hi);
  r.lo_inclusive = open == '[';
  r.hi_inclusive = close == ']';
  if (r.lo && r.hi && compare_versions(*r.lo, *r.hi) > 0) throw fail();
  return r;
}

std::string VersionRange::to_string() const {
  std::string s;
  s += lo_inclusive ? '[' : '(';
  if (lo) s += lo->raw();
  s += ',';
  if (hi) s += hi->raw();
  s += hi_inclusive ? ']' : ')';
  return s;
}

}  // namespace tdtf
