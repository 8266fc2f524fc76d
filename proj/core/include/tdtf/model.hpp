#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tdtf/date.hpp"
#include "tdtf/version.hpp"

namespace tdtf {

/// A library ("group:artifact"), optionally split into parallel lines of
/// development by a chain tag (e.g. tomcat "8.5" vs "9.0").
struct LibraryId {
  std::string group;
  std::string artifact;
  std::optional<std::string> chain_tag;

  LibraryId() = default;
  LibraryId(std::string group, std::string artifact,
            std::optional<std::string> chain_tag = std::nullopt);

  std::string ga() const { return group + ":" + artifact; }
  /// "group:artifact" or "group:artifact@tag".
  std::string display() const;

  friend auto operator<=>(const LibraryId&, const LibraryId&) = default;
  friend bool operator==(const LibraryId&, const LibraryId&) = default;
};

/// One released version of a library. Snapshots parsed from build-tool
/// dumps carry no release date until joined with metadata.
struct LibraryInstance {
  LibraryId id;
  Version version;
  std::optional<Date> release_date;

  /// Throws MissingReleaseDate when unset.
  Date release() const;
  /// Identity key "group:artifact[@tag]:version"; unique within a dataset.
  std::string key() const { return id.display() + ":" + version.raw(); }

  friend bool operator==(const LibraryInstance& a, const LibraryInstance& b) {
    return a.id == b.id && a.version == b.version && a.release_date == b.release_date;
  }
};

/// Chain order: release date, then version.
bool chain_less(const LibraryInstance& a, const LibraryInstance& b);

/// Release-ordered line of development of one library.
class CChain {
 public:
  CChain() = default;
  /// Validates ordering; throws InvalidChain.
  CChain(LibraryId id, std::vector<LibraryInstance> instances);

  const LibraryId& id() const noexcept { return id_; }
  const std::vector<LibraryInstance>& instances() const noexcept { return instances_; }
  std::size_t size() const noexcept { return instances_.size(); }
  bool empty() const noexcept { return instances_.empty(); }

  friend bool operator==(const CChain&, const CChain&) = default;

 private:
  LibraryId id_;
  std::vector<LibraryInstance> instances_;
};

/// Absent marker is std::nullopt.
using DMatrixCell = std::optional<LibraryInstance>;
using DMatrixRow = std::vector<DMatrixCell>;

/// Rows are parallel occurrences of one library, columns are root versions.
struct DMatrix {
  LibraryId id;
  std::vector<Date> columns;
  std::vector<DMatrixRow> rows;
};

/// Drops absent markers and stuttering; downgrades are normalised to the
/// distinct instances in chain order.
CChain contract_row(const LibraryId& id, const DMatrixRow& row);

/// A single-rooted, connected DAG of library instances. nodes()[0] is the root.
class DependencySnapshot {
 public:
  /// Validates the structure; throws CycleDetected or InvalidSnapshot.
  static DependencySnapshot create(std::vector<LibraryInstance> nodes,
                                   std::vector<std::vector<std::size_t>> dependencies,
                                   std::optional<Date> observed_at = std::nullopt);

  const LibraryInstance& root() const { return nodes_.front(); }
  const std::vector<LibraryInstance>& nodes() const noexcept { return nodes_; }
  const std::vector<std::size_t>& dependencies(std::size_t node) const { return deps_.at(node); }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept;
  bool is_leaf(std::size_t node) const { return deps_.at(node).empty(); }
  std::optional<std::size_t> find(const std::string& key) const;
  const std::optional<Date>& observed_at() const noexcept { return observed_at_; }

  /// Fills missing release dates from `dates` (keyed by LibraryInstance::key()).
  /// Dates already present are kept.
  DependencySnapshot with_release_dates(const std::map<std::string, Date>& dates) const;
  DependencySnapshot with_observed_at(Date t) const;

  /// Structural equality: same instances (with dates) and the same dependency
  /// sets per instance. Node order, edge order and observed_at are ignored.
  friend bool operator==(const DependencySnapshot& a, const DependencySnapshot& b);

 private:
  DependencySnapshot() = default;

  std::vector<LibraryInstance> nodes_;
  std::vector<std::vector<std::size_t>> deps_;
  std::optional<Date> observed_at_;
};

struct DepEdge {
  std::size_t from;
  std::size_t to;
  std::vector<std::size_t> columns;  ///< root-version columns where the edge holds, ascending
};

struct ChainEdge {
  std::size_t from;
  std::size_t to;
  friend auto operator<=>(const ChainEdge&, const ChainEdge&) = default;
};

/// Minimal DAG uniting the dependency trees of consecutive root versions:
/// one node per instance, column-tagged dependency edges, and c-chain
/// successor edges.
class TimeDependencyTree {
 public:
  Date span_start() const { return root_chain_.instances().front().release(); }
  Date span_end() const { return root_chain_.instances().back().release(); }

  const std::vector<LibraryInstance>& nodes() const noexcept { return nodes_; }
  const std::vector<DepEdge>& dep_edges() const noexcept { return dep_edges_; }
  const std::vector<ChainEdge>& chain_edges() const noexcept { return chain_edges_; }
  const CChain& root_chain() const noexcept { return root_chain_; }

  std::size_t column_count() const noexcept { return root_nodes_.size(); }
  /// Node index of the root version that defines column `column`.
  std::size_t root_node(std::size_t column) const { return root_nodes_.at(column); }
  /// Dependency edges leaving `node`, as indices into dep_edges().
  const std::vector<std::size_t>& out_edges(std::size_t node) const { return out_edges_.at(node); }
  std::optional<std::size_t> find(const std::string& key) const;
  /// Distinct libraries present, sorted.
  std::vector<LibraryId> libraries() const;

  /// Snapshot of column `column` (used by time_index).
  DependencySnapshot column_snapshot(std::size_t column) const;

 private:
  friend TimeDependencyTree build_tdt(std::span<const DependencySnapshot> snapshots);
  void derive_chain_edges();

  std::vector<LibraryInstance> nodes_;
  std::map<std::string, std::size_t> index_;
  std::vector<DepEdge> dep_edges_;
  std::vector<std::vector<std::size_t>> out_edges_;
  std::vector<ChainEdge> chain_edges_;
  std::vector<std::size_t> root_nodes_;
  CChain root_chain_;
};

/// One chain per distinct LibraryId, sorted by id; throws ConflictingMetadata
/// for duplicate instances with different release dates.
std::vector<CChain> build_cchains(std::span<const LibraryInstance> instances);

/// Snapshots must share one root library and have strictly increasing root
/// release dates. Every instance needs a release date.
TimeDependencyTree build_tdt(std::span<const DependencySnapshot> snapshots);

/// Dependency tree in force at `t`: the latest root version released at or
/// before `t`; the span end maps to the last snapshot. Throws OutOfSpan.
DependencySnapshot time_index(const TimeDependencyTree& tdt, Date t);

/// d-matrix of `lib` across the TDT columns. Rows are matched across columns
/// by dependency path (sequence of libraries from the root), then by version
/// proximity. Throws NotADependency.
DMatrix library_slice(const TimeDependencyTree& tdt, const LibraryId& lib);

}  // namespace tdtf
