#include "tdtf/evidence.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tdtf/error.hpp"

namespace tdtf {

namespace {

constexpr std::string_view kSep = "×";

std::string_view property_name(AxisProperty p) {
  switch (p) {
    case AxisProperty::OwnLoc: return "own_loc";
    case AxisProperty::TotalLoc: return "total_loc";
    case AxisProperty::Orientation: return "orientation";
  }
  return "own_loc";
}

AxisProperty parse_property(const std::string& s) {
  if (s == "own_loc") return AxisProperty::OwnLoc;
  if (s == "total_loc") return AxisProperty::TotalLoc;
  if (s == "orientation") return AxisProperty::Orientation;
  throw Error(ErrorKind::InvalidScheme, "unknown axis property '" + s + "'");
}

std::size_t bin_of(const ClusterAxis& axis, const InstanceMetadata& meta) {
  if (axis.property == AxisProperty::Orientation) {
    return meta.orientation == Orientation::Local ? 0 : 1;
  }
  std::int64_t value = meta.own_loc;
  if (axis.property == AxisProperty::TotalLoc) value += meta.dep_loc.value_or(0);
  const auto it = std::lower_bound(axis.thresholds.begin(), axis.thresholds.end(), value);
  return static_cast<std::size_t>(it - axis.thresholds.begin());
}

}  // namespace

ClusterScheme ClusterScheme::default_scheme(std::int64_t size_threshold) {
  return ClusterScheme({
      ClusterAxis{"orientation", AxisProperty::Orientation, {}, {"Local", "RemoteNetwork"}},
      ClusterAxis{"size", AxisProperty::OwnLoc, {size_threshold}, {"SmallMedium", "Large"}},
  });
}

ClusterScheme::ClusterScheme(std::vector<ClusterAxis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw Error(ErrorKind::InvalidScheme, "scheme has no axes");
  std::set<std::string> names;
  for (const auto& a : axes_) {
    if (a.name.empty() || !names.insert(a.name).second) {
      throw Error(ErrorKind::InvalidScheme, "axis names must be non-empty and unique");
    }
    if (a.property == AxisProperty::Orientation) {
      if (!a.thresholds.empty() || a.labels.size() != 2) {
        throw Error(ErrorKind::InvalidScheme,
                    "orientation axis '" + a.name + "' needs exactly two labels and no thresholds");
      }
    } else {
      if (a.thresholds.empty()) {
        throw Error(ErrorKind::InvalidScheme, "axis '" + a.name + "' has no thresholds");
      }
      if (!std::is_sorted(a.thresholds.begin(), a.thresholds.end(), std::less_equal<>()) ||
          std::adjacent_find(a.thresholds.begin(), a.thresholds.end()) != a.thresholds.end()) {
        throw Error(ErrorKind::InvalidScheme,
                    "thresholds of axis '" + a.name + "' must strictly increase");
      }
      if (a.labels.size() != a.thresholds.size() + 1) {
        throw Error(ErrorKind::InvalidScheme,
                    "axis '" + a.name + "' needs one label more than thresholds");
      }
    }
    std::set<std::string> labels;
    for (const auto& l : a.labels) {
      if (l.empty() || l.find(kSep) != std::string::npos || !labels.insert(l).second) {
        throw Error(ErrorKind::InvalidScheme, "labels of axis '" + a.name +
                                                  "' must be non-empty, unique and free of '×'");
      }
    }
  }
}

ClusterScheme ClusterScheme::from_json(std::string_view bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidScheme, std::string("invalid scheme JSON: ") + e.what());
  }
  try {
    std::vector<ClusterAxis> axes;
    for (const auto& a : doc.at("axes")) {
      ClusterAxis axis;
      axis.name = a.at("name").get<std::string>();
      axis.property = parse_property(a.at("property").get<std::string>());
      if (a.contains("thresholds")) axis.thresholds = a["thresholds"].get<std::vector<std::int64_t>>();
      axis.labels = a.at("labels").get<std::vector<std::string>>();
      axes.push_back(std::move(axis));
    }
    return ClusterScheme(std::move(axes));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidScheme, std::string("malformed scheme: ") + e.what());
  }
}

std::string ClusterScheme::to_json() const {
  nlohmann::ordered_json axes = nlohmann::ordered_json::array();
  for (const auto& a : axes_) {
    nlohmann::ordered_json j;
    j["name"] = a.name;
    j["property"] = property_name(a.property);
    if (a.property != AxisProperty::Orientation) j["thresholds"] = a.thresholds;
    j["labels"] = a.labels;
    axes.push_back(std::move(j));
  }
  nlohmann::ordered_json doc;
  doc["axes"] = std::move(axes);
  return doc.dump(2) + "\n";
}

std::vector<ClusterId> ClusterScheme::clusters() const {
  std::vector<std::string> labels{""};
  for (const auto& a : axes_) {
    std::vector<std::string> next;
    for (const auto& prefix : labels) {
      for (const auto& l : a.labels) {
        next.push_back(prefix.empty() ? l : prefix + std::string(kSep) + l);
      }
    }
    labels = std::move(next);
  }
  std::vector<ClusterId> out;
  for (auto& l : labels) out.push_back(ClusterId{std::move(l)});
  return out;
}

ClusterId ClusterScheme::assign(const InstanceMetadata& meta) const {
  std::string label;
  for (const auto& a : axes_) {
    if (!label.empty()) label += kSep;
    label += a.labels[bin_of(a, meta)];
  }
  return ClusterId{std::move(label)};
}

std::string ClusterScheme::display(const ClusterId& id, std::string_view sep) const {
  std::string out;
  std::size_t start = 0;
  while (true) {
    const auto pos = id.label.find(kSep, start);
    out += id.label.substr(start, pos == std::string::npos ? pos : pos - start);
    if (pos == std::string::npos) break;
    out += sep;
    start = pos + kSep.size();
  }
  return out;
}

ClusterId assign_cluster(const InstanceMetadata& meta, const ClusterScheme& scheme) {
  return scheme.assign(meta);
}

std::optional<LibraryInstance> find_evidence(const VulnerabilityRecord& vuln, const CChain& chain,
                                             QualifierOrder order) {
  const auto& inst = chain.instances();
  for (auto it = inst.rbegin(); it != inst.rend(); ++it) {
    for (const auto& a : vuln.affected) {
      if (a.applies_to(chain.id()) && a.affects(it->version, order)) return *it;
    }
  }
  return std::nullopt;
}

std::int32_t grace_period(const LibraryInstance& evidence, const VulnerabilityRecord& vuln) {
  const std::int32_t days = vuln.published - evidence.release();
  if (days < 0) {
    throw Error(ErrorKind::NegativeGrace, vuln.id + " was published " + std::to_string(-days) +
                                              " days before " + evidence.key() + " was released");
  }
  return days;
}

PoolCollection collect_grace_pools(std::span<const VulnerabilityRecord> vulns,
                                   std::span<const CChain> chains, const MetadataIndex& metadata,
                                   const ClusterScheme& scheme, const PoolOptions& options) {
  PoolCollection out;
  for (const auto& c : scheme.clusters()) out.pools.emplace(c, GracePool{c, {}});

  std::set<std::string> missing;
  for (const auto& vuln : vulns) {
    if (options.min_severity && vuln.severity < *options.min_severity) {
      ++out.filtered_by_severity;
      continue;
    }
    for (const auto& chain : chains) {
      const auto evidence = find_evidence(vuln, chain, options.order);
      if (!evidence) continue;
      const std::int32_t days = vuln.published - evidence->release();
      if (days < 0) {
        out.rejected.push_back(GraceSample{days, vuln.id, *evidence});
        continue;
      }
      const InstanceMetadata* meta = metadata.find(*evidence);
      if (!meta) {
        missing.insert(evidence->key());
        continue;
      }
      const ClusterId cluster = scheme.assign(*meta);
      out.pools[cluster].samples.push_back(GraceSample{days, vuln.id, *evidence});
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& k : missing) list += (list.empty() ? "" : ", ") + k;
    throw Error(ErrorKind::MissingMetadata, "no metadata for evidence instances: " + list);
  }
  return out;
}

std::string pools_to_csv(const PoolCollection& pools) {
  std::ostringstream out;
  out << "cluster,vuln_id,group,artifact,version,grace_days\n";
  for (const auto& [id, pool] : pools.pools) {
    for (const auto& s : pool.samples) {
      out << id.label << ',' << s.vuln_id << ',' << s.evidence.id.group << ','
          << s.evidence.id.artifact << ',' << s.evidence.version.raw() << ',' << s.days << '\n';
    }
  }
  return out.str();
}

}  // namespace tdtf
