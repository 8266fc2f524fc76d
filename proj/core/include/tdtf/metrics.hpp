#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tdtf/ingest.hpp"
#include "tdtf/model.hpp"

namespace tdtf {

struct DependentCount {
  std::size_t node;          ///< TDT node index
  std::size_t dependents;    ///< distinct instances depending on it directly
  double weighted = 0.0;     ///< sum of 1 / shortest distance over all transitive dependents
};

struct PervasiveOptions {
  std::size_t min_dependents = 1;
  bool weighted = false;  ///< rank by the distance-weighted transitive score
};

/// Instances ranked by how many distinct instances use them; zero counts are omitted.
std::vector<DependentCount> pervasive_dependencies(const TimeDependencyTree& tdt,
                                                   const PervasiveOptions& options = {});

struct SpofReport {
  std::size_t node;
  std::vector<std::size_t> columns;  ///< root versions that reach the node, ascending
  double coverage = 0.0;             ///< columns.size() / column_count()
};

/// Non-root instances whose compromise reaches at least `min_coverage` of the
/// root versions through dependency edges in force for that version. Ranked by
/// coverage, then instance key. Throws InvalidArgument unless 0 < min_coverage <= 1.
std::vector<SpofReport> spof(const TimeDependencyTree& tdt, double min_coverage);

struct ChainHealth {
  LibraryId id;
  std::size_t instances = 0;
  std::size_t affected = 0;
  double fraction = 0.0;
};

struct HealthReport {
  std::vector<ChainHealth> chains;
  std::size_t total_instances = 0;
  std::size_t total_affected = 0;
  double fraction = 0.0;  ///< aggregated by instance count
};

struct HealthOptions {
  /// When set, every instance up to a vulnerability's evidence instance counts
  /// as affected, not just those inside the published ranges.
  bool all_prior_versions = false;
  QualifierOrder order = QualifierOrder::PreRelease;
};

HealthReport chain_health(std::span<const CChain> chains, std::span<const VulnerabilityRecord> vulns,
                          const HealthOptions& options = {});

std::string pervasive_to_json(const TimeDependencyTree& tdt, std::span<const DependentCount> counts);
std::string spof_to_json(const TimeDependencyTree& tdt, std::span<const SpofReport> reports);
std::string health_to_json(const HealthReport& report);
std::string health_table(const HealthReport& report);

}  // namespace tdtf
