#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tdtf/attack_tree.hpp"
#include "tdtf/evidence.hpp"
#include "tdtf/ingest.hpp"
#include "tdtf/kde.hpp"
#include "tdtf/model.hpp"

namespace tdtf {

/// Fitted models keyed by cluster.
class ModelSet {
 public:
  void add(KdeModel model);
  const KdeModel* find(const ClusterId& id) const;
  const std::map<ClusterId, KdeModel>& models() const noexcept { return models_; }
  bool empty() const noexcept { return models_.empty(); }

  /// Loads every *.json file in `dir`; throws IoError, DuplicateRecord or the
  /// model parser's errors.
  static ModelSet load_dir(const std::filesystem::path& dir);

 private:
  std::map<ClusterId, KdeModel> models_;
};

/// File name for a cluster's model, e.g. "RemoteNetwork-Large.json".
std::string model_filename(const ClusterId& id);

struct LeafEstimate {
  LibraryInstance instance;
  ClusterId cluster;
  std::int32_t delta_days = 0;
  std::int32_t window_days = 0;
  double probability = 0.0;
  double marginal_drop = 0.0;  ///< root estimate minus root estimate with this leaf at 0
};

struct ForecastReport {
  Date time_point;
  std::int32_t horizon_days = 0;
  double root_probability = 0.0;
  std::vector<LeafEstimate> leaves;  ///< by marginal drop, then p_hat, descending
  std::vector<std::string> models;   ///< cluster labels consulted, sorted
};

struct ForecastContext {
  const MetadataIndex& metadata;
  const ModelSet& models;
  const ClusterScheme& scheme;
  bool allow_extrapolation = false;
};

/// F(delta + n) - F(delta) with delta = t - rel(instance). Throws
/// MissingMetadata, NotYetReleased or MissingModel.
LeafEstimate leaf_probability(const LibraryInstance& instance, const ForecastContext& ctx, Date t,
                              std::int32_t horizon_days);

/// Attack-tree forecast for one snapshot in force at `t`. Per-leaf failures are
/// collected and rethrown together, naming every offending instance.
ForecastReport forecast_snapshot(const DependencySnapshot& snapshot, const ForecastContext& ctx,
                                 Date t, std::int32_t horizon_days);

/// One report per time point, in the given order. Throws OutOfSpan for points
/// outside the TDT span and InvalidArgument for a negative horizon.
std::vector<ForecastReport> forecast(const TimeDependencyTree& tdt, std::span<const Date> time_points,
                                     std::int32_t horizon_days, const ForecastContext& ctx);

std::string reports_to_json(std::span<const ForecastReport> reports);
/// Human-readable summary listing the `top` largest contributors per report.
std::string reports_table(std::span<const ForecastReport> reports, std::size_t top = 5);

}  // namespace tdtf
