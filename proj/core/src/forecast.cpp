#include "tdtf/forecast.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tdtf/error.hpp"

namespace tdtf {

void ModelSet::add(KdeModel model) {
  const ClusterId id = model.cluster();
  if (!models_.emplace(id, std::move(model)).second) {
    throw Error(ErrorKind::DuplicateRecord, "two models for cluster " + id.label);
  }
}

const KdeModel* ModelSet::find(const ClusterId& id) const {
  auto it = models_.find(id);
  return it == models_.end() ? nullptr : &it->second;
}

ModelSet ModelSet::load_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorKind::IoError, "models directory " + dir.string() + " does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  ModelSet set;
  for (const auto& f : files) {
    try {
      set.add(KdeModel::from_json(read_file(f)));
    } catch (const Error& e) {
      throw Error(e.kind(), f.string() + ": " + e.what());
    }
  }
  return set;
}

std::string model_filename(const ClusterId& id) {
  std::string out;
  const std::string_view sep = "×";
  for (std::size_t i = 0; i < id.label.size();) {
    if (id.label.compare(i, sep.size(), sep) == 0) {
      out.push_back('-');
      i += sep.size();
      continue;
    }
    const char c = id.label[i++];
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '_' || c == '.';
    out.push_back(safe ? c : '_');
  }
  return out + ".json";
}

LeafEstimate leaf_probability(const LibraryInstance& instance, const ForecastContext& ctx, Date t,
                              std::int32_t horizon_days) {
  if (horizon_days < 0) throw Error(ErrorKind::InvalidArgument, "horizon must be >= 0");
  const InstanceMetadata* meta = ctx.metadata.find(instance);
  if (!meta) throw Error(ErrorKind::MissingMetadata, "no metadata for " + instance.key());
  const Date rel = instance.release_date.value_or(meta->release_date);
  if (rel > t) {
    throw Error(ErrorKind::NotYetReleased,
                instance.key() + " is released on " + rel.to_iso() + ", after " + t.to_iso());
  }
  LeafEstimate est;
  est.instance = instance;
  est.instance.release_date = rel;
  est.cluster = ctx.scheme.assign(*meta);
  est.delta_days = t - rel;
  est.window_days = horizon_days;
  const KdeModel* model = ctx.models.find(est.cluster);
  if (!model) {
    throw Error(ErrorKind::MissingModel,
                "no model for cluster " + est.cluster.label + " needed by " + instance.key());
  }
  est.probability = model->window_probability(est.delta_days, horizon_days, ctx.allow_extrapolation);
  return est;
}

ForecastReport forecast_snapshot(const DependencySnapshot& snapshot, const ForecastContext& ctx,
                                 Date t, std::int32_t horizon_days) {
  const AttackTree tree = to_attack_tree(snapshot);
  std::vector<LeafEstimate> leaves;
  std::vector<std::string> failures;
  std::optional<ErrorKind> first_kind;
  for (const auto& inst : snapshot.nodes()) {
    try {
      leaves.push_back(leaf_probability(inst, ctx, t, horizon_days));
    } catch (const Error& e) {
      if (!first_kind) first_kind = e.kind();
      failures.push_back(std::string(to_string(e.kind())) + ": " + e.what());
    }
  }
  if (!failures.empty()) {
    std::string msg;
    for (const auto& f : failures) msg += (msg.empty() ? "" : "; ") + f;
    throw Error(*first_kind, msg);
  }

  std::vector<std::optional<double>> probs(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) probs[i] = leaves[i].probability;

  ForecastReport report;
  report.time_point = t;
  report.horizon_days = horizon_days;
  report.root_probability = propagate(tree, probs);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const auto saved = probs[i];
    probs[i] = 0.0;
    leaves[i].marginal_drop = std::max(0.0, report.root_probability - propagate(tree, probs));
    probs[i] = saved;
  }
  std::set<std::string> models;
  for (const auto& l : leaves) models.insert(l.cluster.label);
  report.models.assign(models.begin(), models.end());

  std::stable_sort(leaves.begin(), leaves.end(), [](const LeafEstimate& a, const LeafEstimate& b) {
    if (a.marginal_drop != b.marginal_drop) return a.marginal_drop > b.marginal_drop;
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.instance.key() < b.instance.key();
  });
  report.leaves = std::move(leaves);
  return report;
}

std::vector<ForecastReport> forecast(const TimeDependencyTree& tdt, std::span<const Date> time_points,
                                     std::int32_t horizon_days, const ForecastContext& ctx) {
  if (horizon_days < 0) throw Error(ErrorKind::InvalidArgument, "horizon must be >= 0");
  std::vector<ForecastReport> reports;
  reports.reserve(time_points.size());
  for (Date t : time_points) {
    reports.push_back(forecast_snapshot(time_index(tdt, t), ctx, t, horizon_days));
  }
  return reports;
}

std::string reports_to_json(std::span<const ForecastReport> reports) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["time_point"] = r.time_point.to_iso();
    j["horizon_days"] = r.horizon_days;
    j["root_probability"] = r.root_probability;
    auto leaves = nlohmann::ordered_json::array();
    for (const auto& l : r.leaves) {
      nlohmann::ordered_json lj;
      lj["ga"] = l.instance.id.display();
      lj["version"] = l.instance.version.raw();
      lj["cluster"] = l.cluster.label;
      lj["delta_days"] = l.delta_days;
      lj["p_hat"] = l.probability;
      lj["marginal_drop_if_zeroed"] = l.marginal_drop;
      leaves.push_back(std::move(lj));
    }
    j["leaves"] = std::move(leaves);
    j["models"] = r.models;
    doc.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

namespace {

std::string fmt_prob(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", p);
  return buf;
}

}  // namespace

std::string reports_table(std::span<const ForecastReport> reports, std::size_t top) {
  std::ostringstream out;
  for (const auto& r : reports) {
    out << r.time_point.to_iso() << "  n=" << r.horizon_days << "  p_hat=" << fmt_prob(r.root_probability)
        << "  (" << r.leaves.size() << " instances)\n";
    for (std::size_t i = 0; i < std::min(top, r.leaves.size()); ++i) {
      const auto& l = r.leaves[i];
      out << "    " << l.instance.key() << "  [" << l.cluster.label << "]  delta=" << l.delta_days
          << "  p=" << fmt_prob(l.probability) << "  drop=" << fmt_prob(l.marginal_drop) << '\n';
    }
  }
  return out.str();
}

}  // namespace tdtf
