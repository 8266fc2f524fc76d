#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tdtf/date.hpp"
#include "tdtf/model.hpp"
#include "tdtf/version.hpp"

namespace tdtf {

enum class Orientation { Local, RemoteNetwork };

std::string_view to_string(Orientation o) noexcept;

/// Versions of one library affected by a vulnerability. Without a chain tag
/// the entry applies to every c-chain of the library.
struct AffectedLibrary {
  std::string group;
  std::string artifact;
  std::optional<std::string> chain_tag;
  std::vector<VersionRange> ranges;

  bool applies_to(const LibraryId& lib) const;
  bool affects(const Version& v, QualifierOrder order = QualifierOrder::PreRelease) const;
};

struct VulnerabilityRecord {
  std::string id;
  Date published;
  double severity = 0.0;  ///< CVSS base score, [0, 10]
  std::vector<AffectedLibrary> affected;
};

struct InstanceMetadata {
  LibraryId id;
  Version version;
  Date release_date;
  std::int64_t own_loc = 0;
  std::optional<std::int64_t> dep_loc;
  Orientation orientation = Orientation::Local;

  LibraryInstance instance() const { return LibraryInstance{id, version, release_date}; }
};

/// Lookup of metadata by instance. Tagged instances fall back to the
/// untagged "group:artifact:version" entry and vice versa when unambiguous.
class MetadataIndex {
 public:
  MetadataIndex() = default;
  explicit MetadataIndex(std::vector<InstanceMetadata> rows);

  const InstanceMetadata* find(const LibraryInstance& inst) const;
  const std::vector<InstanceMetadata>& rows() const noexcept { return rows_; }
  std::vector<LibraryInstance> instances() const;
  /// Release dates keyed by LibraryInstance::key(), for DependencySnapshot::with_release_dates.
  std::map<std::string, Date> release_dates() const;

 private:
  std::vector<InstanceMetadata> rows_;
  std::map<std::string, std::size_t> by_key_;
  std::map<std::string, std::vector<std::size_t>> by_ga_version_;
};

struct MavenTreeOptions {
  std::set<std::string> omit_scopes;  ///< e.g. {"test"}; the subtree is dropped too
};

/// Parses `mvn dependency:tree` text output. "[INFO] " prefixes are accepted.
DependencySnapshot parse_maven_tree(std::string_view text, const MavenTreeOptions& options = {});

DependencySnapshot parse_snapshot_json(std::string_view bytes);
/// Canonical, deterministic JSON (2-space indent, trailing newline).
std::string serialize_snapshot_json(const DependencySnapshot& snapshot);

/// Throws DuplicateRecord for repeated ids, ParseError (with JSON path) otherwise.
std::vector<VulnerabilityRecord> parse_vulnerabilities(std::string_view bytes);

/// CSV with header "group,artifact,version,release_date,own_loc,dep_loc,orientation";
/// an extra "chain_tag" column is honoured when present.
std::vector<InstanceMetadata> parse_metadata(std::string_view csv);

/// Throws IoError naming the path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace tdtf
