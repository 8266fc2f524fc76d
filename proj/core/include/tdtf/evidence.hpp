#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdtf/ingest.hpp"
#include "tdtf/model.hpp"

namespace tdtf {

struct ClusterId {
  std::string label;  ///< axis labels joined by "×", e.g. "RemoteNetwork×Large"

  friend auto operator<=>(const ClusterId&, const ClusterId&) = default;
  friend bool operator==(const ClusterId&, const ClusterId&) = default;
};

enum class AxisProperty { OwnLoc, TotalLoc, Orientation };

/// One partition of the metadata space. Numeric axes bin by ascending
/// thresholds (value <= thresholds[i] lands in bin i, larger values in the
/// last bin); the orientation axis has labels {local, remote network}.
struct ClusterAxis {
  std::string name;
  AxisProperty property = AxisProperty::OwnLoc;
  std::vector<std::int64_t> thresholds;
  std::vector<std::string> labels;
};

class ClusterScheme {
 public:
  /// Orientation (Local / RemoteNetwork) × own size (SmallMedium <= threshold / Large).
  static ClusterScheme default_scheme(std::int64_t size_threshold = 100000);
  /// Validating constructor; throws InvalidScheme.
  explicit ClusterScheme(std::vector<ClusterAxis> axes);

  static ClusterScheme from_json(std::string_view bytes);
  std::string to_json() const;

  const std::vector<ClusterAxis>& axes() const noexcept { return axes_; }
  /// Every cluster of the scheme, in axis-major order.
  std::vector<ClusterId> clusters() const;
  ClusterId assign(const InstanceMetadata& meta) const;
  /// Axis labels of a cluster joined by `sep` ("Local∩SmallMedium").
  std::string display(const ClusterId& id, std::string_view sep) const;

 private:
  std::vector<ClusterAxis> axes_;
};

ClusterId assign_cluster(const InstanceMetadata& meta, const ClusterScheme& scheme);

/// Latest instance of `chain` inside an affected range of `vuln` for chain.id().
std::optional<LibraryInstance> find_evidence(const VulnerabilityRecord& vuln, const CChain& chain,
                                             QualifierOrder order = QualifierOrder::PreRelease);

/// Days from the evidence release to disclosure; throws NegativeGrace.
std::int32_t grace_period(const LibraryInstance& evidence, const VulnerabilityRecord& vuln);

struct GraceSample {
  std::int32_t days = 0;
  std::string vuln_id;
  LibraryInstance evidence;
};

struct GracePool {
  ClusterId cluster;
  std::vector<GraceSample> samples;
};

struct PoolOptions {
  std::optional<double> min_severity = 7.0;  ///< nullopt disables the filter
  QualifierOrder order = QualifierOrder::PreRelease;
};

struct PoolCollection {
  std::map<ClusterId, GracePool> pools;  ///< one entry per scheme cluster, possibly empty
  std::vector<GraceSample> rejected;     ///< negative grace periods, days < 0
  std::size_t filtered_by_severity = 0;
};

/// One sample per (vulnerability, chain) with evidence. Throws MissingMetadata
/// naming every evidence instance without a metadata row.
PoolCollection collect_grace_pools(std::span<const VulnerabilityRecord> vulns,
                                   std::span<const CChain> chains, const MetadataIndex& metadata,
                                   const ClusterScheme& scheme, const PoolOptions& options = {});

/// CSV "cluster,vuln_id,group,artifact,version,grace_days".
std::string pools_to_csv(const PoolCollection& pools);

}  // namespace tdtf
