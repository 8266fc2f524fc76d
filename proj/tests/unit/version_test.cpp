#include <gtest/gtest.h>

#include "support.hpp"
#include "tdtf/error.hpp"
#include "tdtf/version.hpp"

using namespace tdtf;
using tdtf::test::Gen;

namespace {

int cmp(const char* a, const char* b, QualifierOrder o = QualifierOrder::PreRelease) {
  const auto c = compare_versions(Version(a), Version(b), o);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

}  // namespace

TEST(Version, ParsesNumericPrefixAndQualifier) {
  const Version v("1.4.17");
  EXPECT_EQ(v.numeric_parts(), (std::vector<std::int64_t>{1, 4, 17}));
  EXPECT_FALSE(v.qualifier());

  const Version m("8.18.0m1");
  EXPECT_EQ(m.numeric_parts(), (std::vector<std::int64_t>{8, 18, 0}));
  EXPECT_EQ(m.qualifier(), "m1");

  const Version j("31.1-jre");
  EXPECT_EQ(j.numeric_parts(), (std::vector<std::int64_t>{31, 1}));
  EXPECT_EQ(j.qualifier(), "jre");

  const Version w("latest");
  EXPECT_TRUE(w.numeric_parts().empty());
  EXPECT_EQ(w.qualifier(), "latest");
}

TEST(Version, CompareExamples) {
  EXPECT_EQ(cmp("1.4.17", "1.4.18"), -1);
  EXPECT_EQ(cmp("1.10", "1.9"), 1);
  EXPECT_EQ(cmp("1.4", "1.4.0"), 0);
  EXPECT_EQ(cmp("8.18.0m1", "8.18.0"), -1);
  EXPECT_EQ(cmp("8.18.0m1", "8.17.9"), 1);
  EXPECT_EQ(cmp("1.0-alpha", "1.0-beta"), -1);
  EXPECT_EQ(cmp("1.0-rc1", "1.0"), -1);
}

TEST(Version, PostReleaseQualifierOrder) {
  EXPECT_EQ(cmp("1.0-sp1", "1.0", QualifierOrder::PostRelease), 1);
  EXPECT_EQ(cmp("1.0-sp1", "1.0", QualifierOrder::PreRelease), -1);
  EXPECT_EQ(cmp("1.0-sp1", "1.1", QualifierOrder::PostRelease), -1);
}

TEST(Version, HandSortedListAgreesPairwise) {
  // Ordered by Maven's rules for the versions present in the bundled fixture.
  const std::vector<const char*> sorted = {
      "1.1",     "1.1.3.1", "1.1.4c",   "1.2",      "1.2.0",    "1.2.1",   "1.4.15",
      "1.4.17",  "1.4.18",  "2.2",      "2.3.1",    "2.7.0",    "2.8.0",   "8.5.64",
      "8.5.65",  "8.17.0",  "8.18.0m1", "8.18.1",   "9.0.44",   "30.0-jre", "31.1-jre"};
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = 0; j < sorted.size(); ++j) {
      const int got = cmp(sorted[i], sorted[j]);
      int want = i < j ? -1 : (i > j ? 1 : 0);
      // "1.2" and "1.2.0" are the same version.
      const bool same = (std::string(sorted[i]) == "1.2" && std::string(sorted[j]) == "1.2.0") ||
                        (std::string(sorted[i]) == "1.2.0" && std::string(sorted[j]) == "1.2");
      if (same) want = 0;
      EXPECT_EQ(got, want) << sorted[i] << " vs " << sorted[j];
    }
  }
}

TEST(Version, TotalOrderOnRandomVersions) {
  Gen g(11);
  std::vector<Version> vs;
  for (int i = 0; i < 120; ++i) vs.emplace_back(g.version());
  for (auto order : {QualifierOrder::PreRelease, QualifierOrder::PostRelease}) {
    for (const auto& a : vs) {
      EXPECT_EQ(compare_versions(a, a, order), std::strong_ordering::equal) << a.raw();
      for (const auto& b : vs) {
        const auto ab = compare_versions(a, b, order);
        const auto ba = compare_versions(b, a, order);
        EXPECT_EQ(ab < 0, ba > 0) << a.raw() << " " << b.raw();
        EXPECT_EQ(ab == 0, ba == 0) << a.raw() << " " << b.raw();
      }
    }
    // Transitivity on a sample of triples.
    for (int k = 0; k < 20000; ++k) {
      const auto& a = vs[static_cast<std::size_t>(g.integer(0, 119))];
      const auto& b = vs[static_cast<std::size_t>(g.integer(0, 119))];
      const auto& c = vs[static_cast<std::size_t>(g.integer(0, 119))];
      if (compare_versions(a, b, order) <= 0 && compare_versions(b, c, order) <= 0) {
        EXPECT_TRUE(compare_versions(a, c, order) <= 0) << a.raw() << " " << b.raw() << " " << c.raw();
      }
    }
  }
}

TEST(Version, SortIsStableUnderShuffles) {
  Gen g(5);
  std::vector<Version> vs;
  for (int i = 0; i < 200; ++i) vs.emplace_back(g.version());
  auto less = [](const Version& a, const Version& b) {
    const auto c = compare_versions(a, b);
    return c != 0 ? c < 0 : a.raw() < b.raw();
  };
  auto first = vs;
  std::sort(first.begin(), first.end(), less);
  for (int round = 0; round < 5; ++round) {
    std::shuffle(vs.begin(), vs.end(), g.engine());
    auto again = vs;
    std::sort(again.begin(), again.end(), less);
    EXPECT_EQ(again, first);
  }
}

TEST(VersionRange, ParseForms) {
  const auto r = VersionRange::parse("[,1.4.18)");
  EXPECT_FALSE(r.lo);
  ASSERT_TRUE(r.hi);
  EXPECT_EQ(r.hi->raw(), "1.4.18");
  EXPECT_FALSE(r.hi_inclusive);
  EXPECT_EQ(r.to_string(), "[,1.4.18)");

  const auto open = VersionRange::parse("(1.0,]");
  EXPECT_FALSE(open.lo_inclusive);
  EXPECT_FALSE(open.hi);

  const auto pin = VersionRange::parse(" [1.2] ");
  EXPECT_TRUE(pin.lo_inclusive);
  EXPECT_TRUE(pin.hi_inclusive);
  EXPECT_EQ(pin.lo->raw(), "1.2");
  EXPECT_EQ(pin.hi->raw(), "1.2");
}

TEST(VersionRange, ParseRejectsMalformed) {
  for (const char* bad : {"", "1.0", "[1.0", "1.0]", "(1.2)", "[2.0,1.0)", "[]"}) {
    try {
      VersionRange::parse(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ParseError) << bad;
    }
  }
}

TEST(VersionRange, MembershipExamples) {
  const auto xstream = VersionRange::parse("[,1.4.18)");
  EXPECT_TRUE(version_in_range(Version("1.4.17"), xstream));
  EXPECT_TRUE(version_in_range(Version("1.4.15"), xstream));
  EXPECT_FALSE(version_in_range(Version("1.4.18"), xstream));
  EXPECT_FALSE(version_in_range(Version("1.4.19"), xstream));

  const auto closed = VersionRange::parse("[8.5.0,8.5.65]");
  EXPECT_TRUE(version_in_range(Version("8.5.0"), closed));
  EXPECT_TRUE(version_in_range(Version("8.5.65"), closed));
  EXPECT_FALSE(version_in_range(Version("9.0.1"), closed));

  const auto left_open = VersionRange::parse("(1.0,2.0)");
  EXPECT_FALSE(version_in_range(Version("1.0"), left_open));
  EXPECT_TRUE(version_in_range(Version("1.0.1"), left_open));
  // A release candidate sits before the release it precedes.
  EXPECT_TRUE(version_in_range(Version("2.0-rc1"), left_open));
  EXPECT_FALSE(version_in_range(Version("2.0-rc1"), left_open, QualifierOrder::PostRelease));
}

TEST(VersionRange, DefaultIsHalfOpen) {
  VersionRange r;
  r.lo = Version("1.0");
  r.hi = Version("2.0");
  EXPECT_TRUE(version_in_range(Version("1.0"), r));
  EXPECT_FALSE(version_in_range(Version("2.0"), r));
}
