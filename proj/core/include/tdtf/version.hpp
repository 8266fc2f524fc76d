#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tdtf {

/// How a qualified version ("1.0-rc1", "8.18.0m1") orders against the same
/// numeric version without a qualifier.
enum class QualifierOrder {
  PreRelease,   ///< "1.0-rc1" < "1.0" (Maven / semver convention)
  PostRelease,  ///< "1.0-sp1" > "1.0"
};

/// A parsed "MAJOR.Minor.patch[-qualifier]" string. Parsing never fails:
/// whatever does not fit the dotted-numeric prefix becomes the qualifier.
class Version {
 public:
  Version() = default;
  explicit Version(std::string_view raw);

  const std::string& raw() const noexcept { return raw_; }
  const std::vector<std::int64_t>& numeric_parts() const noexcept { return numeric_; }
  const std::optional<std::string>& qualifier() const noexcept { return qualifier_; }

  /// Exact textual identity; use compare_versions() for ordering.
  friend bool operator==(const Version& a, const Version& b) { return a.raw_ == b.raw_; }

 private:
  std::string raw_;
  std::vector<std::int64_t> numeric_;
  std::optional<std::string> qualifier_;
};

/// Total order: numeric parts left to right (missing parts are 0), then the
/// qualifier rule, then qualifiers lexicographically.
std::strong_ordering compare_versions(const Version& a, const Version& b,
                                      QualifierOrder order = QualifierOrder::PreRelease);

/// Interval of versions; an absent endpoint is unbounded.
struct VersionRange {
  std::optional<Version> lo;
  bool lo_inclusive = true;
  std::optional<Version> hi;
  bool hi_inclusive = false;

  /// Parses Maven interval notation: "[1.0,2.0)", "[,1.4.18)", "(1.0,]", "[1.2]".
  static VersionRange parse(std::string_view text);
  std::string to_string() const;
};

bool version_in_range(const Version& v, const VersionRange& r,
                      QualifierOrder order = QualifierOrder::PreRelease);

}  // namespace tdtf
