#include <gtest/gtest.h>

#include <functional>

#include "support.hpp"
#include "tdtf/error.hpp"
#include "tdtf/ingest.hpp"

using namespace tdtf;
using namespace tdtf::test;

namespace {

Error error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error thrown";
  return Error(ErrorKind::InternalInconsistency, "");
}

MavenTreeOptions no_tests() {
  MavenTreeOptions o;
  o.omit_scopes = {"test"};
  return o;
}

}  // namespace

TEST(MavenTree, TwoLineDump) {
  const auto s = parse_maven_tree(
      "com.example:app:jar:1.0\n"
      "\\- com.thoughtworks.xstream:xstream:jar:1.4.17:compile\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.root().key(), "com.example:app:1.0");
  EXPECT_EQ(s.nodes()[1].key(), "com.thoughtworks.xstream:xstream:1.4.17");
  EXPECT_EQ(s.dependencies(0), (std::vector<std::size_t>{1}));
  EXPECT_FALSE(s.root().release_date);
}

TEST(MavenTree, ClassifierCoordinatesAndInfoPrefix) {
  const auto s = parse_maven_tree(
      "[INFO] g:root:jar:2.0\n"
      "[INFO] +- g:a:jar:tests:1.1:compile\n"
      "[INFO] \\- g:b:jar:3.0:runtime (version managed from 2.9)\n");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.nodes()[1].key(), "g:a:1.1");
  EXPECT_EQ(s.nodes()[2].key(), "g:b:3.0");
}

TEST(MavenTree, FixtureDumpWithTestScopeOmitted) {
  const auto text = read_file(fixture("jira/trees/jira-core-8.18.1.txt"));
  const auto s = parse_maven_tree(text, no_tests());
  EXPECT_EQ(s.size(), 11u);
  EXPECT_EQ(s.root().key(), "com.atlassian.jira:jira-core:8.18.1");
  EXPECT_FALSE(s.find("junit:junit:4.13.2"));
  EXPECT_FALSE(s.find("org.hamcrest:hamcrest-core:1.3"));
  const auto mx = s.find("io.github.x-stream:mxparser:1.2.1");
  ASSERT_TRUE(mx);
  ASSERT_EQ(s.dependencies(*mx).size(), 1u);
  EXPECT_EQ(s.nodes()[s.dependencies(*mx)[0]].key(), "xmlpull:xmlpull:1.1.3.1");

  const auto all = parse_maven_tree(text);
  EXPECT_EQ(all.size(), 13u);
}

TEST(MavenTree, MatchesGoldenJsonByteForByte) {
  const auto s = parse_maven_tree(read_file(fixture("jira/trees/jira-core-8.18.1.txt")), no_tests());
  EXPECT_EQ(serialize_snapshot_json(s), read_file(fixture("jira/golden/jira-core-8.18.1.json")));
}

TEST(MavenTree, RepeatedInstanceBecomesSharedNode) {
  const auto s = parse_maven_tree(
      "g:root:jar:1\n"
      "+- g:a:jar:1:compile\n"
      "|  \\- g:c:jar:1:compile\n"
      "\\- g:b:jar:1:compile\n"
      "   \\- g:c:jar:1:compile\n");
  EXPECT_EQ(s.size(), 4u);
  EXPECT_EQ(s.edge_count(), 4u);
}

TEST(MavenTree, MalformedLineReportsLineNumber) {
  const auto e = error_of([] {
    parse_maven_tree(
        "g:root:jar:1\n"
        "+- g:a:jar:1:compile\n"
        "+- not-a-coordinate\n");
  });
  EXPECT_EQ(e.kind(), ErrorKind::ParseError);
  EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
}

TEST(MavenTree, BadIndentation) {
  const auto e = error_of([] {
    parse_maven_tree(
        "g:root:jar:1\n"
        "|  |  +- g:a:jar:1:compile\n");
  });
  EXPECT_EQ(e.kind(), ErrorKind::ParseError);
  EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
}

TEST(MavenTree, EmptyInput) {
  EXPECT_EQ(error_of([] { parse_maven_tree(""); }).kind(), ErrorKind::ParseError);
}

TEST(SnapshotJson, RoundTripOnRandomSnapshots) {
  Gen g(3);
  for (int i = 0; i < 100; ++i) {
    const auto s = g.snapshot(static_cast<std::size_t>(g.integer(1, 10)), 0.15, g.chance(0.5));
    const auto text = serialize_snapshot_json(s);
    const auto back = parse_snapshot_json(text);
    EXPECT_EQ(back, s);
    EXPECT_EQ(serialize_snapshot_json(back), text);
  }
}

TEST(SnapshotJson, ObservedAtAndChainTagSurvive) {
  const LibraryInstance root{LibraryId("g", "r"), Version("1"), day(10)};
  const LibraryInstance tagged{LibraryId("g", "t", "9.0"), Version("9.0.1"), std::nullopt};
  const auto s = DependencySnapshot::create({root, tagged}, {{1}, {}}, day(20));
  const auto back = parse_snapshot_json(serialize_snapshot_json(s));
  EXPECT_EQ(back, s);
  EXPECT_EQ(back.observed_at(), day(20));
  EXPECT_EQ(back.nodes()[1].id.chain_tag, "9.0");
}

TEST(SnapshotJson, SchemaErrorsCarryPath) {
  const auto e = error_of([] {
    parse_snapshot_json(R"({"root":{"group":"g","artifact":"a","version":"1",
      "dependencies":[{"group":"g","version":"2"}]}})");
  });
  EXPECT_EQ(e.kind(), ErrorKind::ParseError);
  EXPECT_NE(std::string(e.what()).find("$.root.dependencies[0].artifact"), std::string::npos)
      << e.what();
  EXPECT_EQ(error_of([] { parse_snapshot_json("{"); }).kind(), ErrorKind::ParseError);
}

TEST(Vulnerabilities, ParsesRecords) {
  const auto vs = parse_vulnerabilities(R"([
    {"id":"CVE-2021-39139","published":"2021-08-23","severity":8.8,
     "affected":[{"group":"com.thoughtworks.xstream","artifact":"xstream",
                  "ranges":[{"hi":"1.4.18"}]}]},
    {"id":"X-2","published":"2020-01-01","severity":9.8,
     "affected":[{"group":"org.springframework","artifact":"spring-webmvc","ranges":[{"lo":"5.0","hi":"5.3.18"}]},
                 {"group":"org.springframework","artifact":"spring-core","chain_tag":"5",
                  "ranges":[{"lo":"5.0","hi":"5.3.18","hi_inclusive":true}]}]},
    {"id":"X-3","published":"2020-01-01","severity":7.0,"affected":[]}
  ])");
  ASSERT_EQ(vs.size(), 3u);
  EXPECT_EQ(vs[0].published, iso("2021-08-23"));
  EXPECT_DOUBLE_EQ(vs[0].severity, 8.8);
  EXPECT_TRUE(vs[0].affected[0].affects(Version("1.4.17")));
  EXPECT_FALSE(vs[0].affected[0].affects(Version("1.4.18")));
  ASSERT_EQ(vs[1].affected.size(), 2u);
  EXPECT_EQ(vs[1].affected[1].chain_tag, "5");
  EXPECT_TRUE(vs[1].affected[1].ranges[0].hi_inclusive);
  EXPECT_TRUE(vs[2].affected.empty());

  EXPECT_TRUE(vs[0].affected[0].applies_to(LibraryId("com.thoughtworks.xstream", "xstream")));
  EXPECT_TRUE(vs[0].affected[0].applies_to(LibraryId("com.thoughtworks.xstream", "xstream", "1.4")));
  EXPECT_FALSE(vs[1].affected[1].applies_to(LibraryId("org.springframework", "spring-core", "6")));
  EXPECT_FALSE(vs[1].affected[1].applies_to(LibraryId("org.springframework", "spring-core")));
}

TEST(Vulnerabilities, Errors) {
  const auto dup = error_of([] {
    parse_vulnerabilities(R"([{"id":"A","published":"2020-01-01","severity":1,"affected":[]},
                              {"id":"A","published":"2020-01-02","severity":2,"affected":[]}])");
  });
  EXPECT_EQ(dup.kind(), ErrorKind::DuplicateRecord);

  const auto missing = error_of([] {
    parse_vulnerabilities(R"([{"id":"A","published":"2020-01-01","severity":1,
      "affected":[{"group":"g","artifact":"a","ranges":[{"lo":"2.0","hi":"1.0"}]}]}])");
  });
  EXPECT_EQ(missing.kind(), ErrorKind::ParseError);
  EXPECT_NE(std::string(missing.what()).find("$[0].affected[0].ranges[0]"), std::string::npos)
      << missing.what();

  const auto severity = error_of([] {
    parse_vulnerabilities(R"([{"id":"A","published":"2020-01-01","severity":11,"affected":[]}])");
  });
  EXPECT_NE(std::string(severity.what()).find("$[0].severity"), std::string::npos);

  const auto date = error_of([] {
    parse_vulnerabilities(R"([{"id":"A","published":"2020-13-01","severity":1,"affected":[]}])");
  });
  EXPECT_NE(std::string(date.what()).find("$[0].published"), std::string::npos);
}

TEST(Vulnerabilities, FixtureLoads) {
  const auto vs = parse_vulnerabilities(read_file(fixture("jira/vulns.json")));
  EXPECT_EQ(vs.size(), 23u);
  const auto it = std::find_if(vs.begin(), vs.end(),
                               [](const VulnerabilityRecord& v) { return v.id == "CVE-2021-39139"; });
  ASSERT_NE(it, vs.end());
  EXPECT_EQ(it->published, iso("2021-08-23"));
}

TEST(Metadata, ParsesFixture) {
  const auto rows = parse_metadata(read_file(fixture("jira/metadata.csv")));
  EXPECT_EQ(rows.size(), 38u);
  const MetadataIndex index(rows);
  const auto* xs = index.find(
      LibraryInstance{LibraryId("com.thoughtworks.xstream", "xstream"), Version("1.4.17"), {}});
  ASSERT_NE(xs, nullptr);
  EXPECT_EQ(xs->own_loc, 151629);
  EXPECT_EQ(xs->orientation, Orientation::RemoteNetwork);
}

TEST(Metadata, RowErrors) {
  const std::string header = "group,artifact,version,release_date,own_loc,dep_loc,orientation\n";
  const auto bad_orientation = error_of([&] { parse_metadata(header + "g,a,1,2020-01-01,10,,sideways\n"); });
  EXPECT_EQ(bad_orientation.kind(), ErrorKind::ParseError);
  EXPECT_NE(std::string(bad_orientation.what()).find("line 2"), std::string::npos);

  EXPECT_EQ(error_of([&] { parse_metadata(header + "g,a,1,2020-01-01,-5,,local\n"); }).kind(),
            ErrorKind::ParseError);
  EXPECT_EQ(error_of([&] { parse_metadata("group,artifact\n"); }).kind(), ErrorKind::ParseError);
  EXPECT_EQ(error_of([&] { parse_metadata(""); }).kind(), ErrorKind::ParseError);

  const auto rows = parse_metadata(header + "g,a,1,2020-01-01,10,,local\n");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].dep_loc);
}

TEST(Metadata, TaggedLookupFallsBackToUntaggedKey) {
  const auto rows = parse_metadata(
      "group,artifact,version,release_date,own_loc,dep_loc,orientation,chain_tag\n"
      "g,t,9.0.1,2021-01-01,10,5,remote_network,9.0\n"
      "g,u,1.0,2021-01-02,10,5,local,\n");
  const MetadataIndex index(rows);
  EXPECT_NE(index.find(LibraryInstance{LibraryId("g", "t", "9.0"), Version("9.0.1"), {}}), nullptr);
  EXPECT_NE(index.find(LibraryInstance{LibraryId("g", "t"), Version("9.0.1"), {}}), nullptr);
  EXPECT_NE(index.find(LibraryInstance{LibraryId("g", "u", "x"), Version("1.0"), {}}), nullptr);
  EXPECT_EQ(index.find(LibraryInstance{LibraryId("g", "u"), Version("2.0"), {}}), nullptr);
  const auto dates = index.release_dates();
  EXPECT_EQ(dates.at("g:t@9.0:9.0.1"), iso("2021-01-01"));
}

TEST(Files, ReadMissingFileNamesPath) {
  const auto e = error_of([] { read_file("/nonexistent/dir/file.json"); });
  EXPECT_EQ(e.kind(), ErrorKind::IoError);
  EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/file.json"), std::string::npos);
}
