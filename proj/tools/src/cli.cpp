#include "tdtf_cli/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tdtf/error.hpp"
#include "tdtf/evidence.hpp"
#include "tdtf/forecast.hpp"
#include "tdtf/graph_export.hpp"
#include "tdtf/ingest.hpp"
#include "tdtf/joint.hpp"
#include "tdtf/kde.hpp"
#include "tdtf/metrics.hpp"
#include "tdtf/model.hpp"

namespace tdtf::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string metadata;
  std::string vulns;
  std::vector<std::string> snapshots;
  std::string models_dir;
  std::string out;
  std::optional<std::int32_t> horizon;
  std::string at;
  std::string scheme;
  std::optional<double> min_cvss;
  bool no_severity_filter = false;
  bool post_release_qualifiers = false;
  std::vector<std::string> omit_scopes;

  // fit
  std::size_t min_samples = 5;
  std::optional<double> bandwidth;
  bool allow_sparse = false;

  // forecast / joint
  bool allow_extrapolation = false;
  std::string cluster_a;
  std::string cluster_b;
  std::vector<std::string> offsets;
  double u_max = 365.0;
  double x_max = 365.0;
  double y_max = 365.0;
  std::size_t resolution = 64;

  // health
  double min_coverage = 0.5;
  std::size_t min_dependents = 2;
  bool weighted = false;
  bool all_prior_versions = false;

  // tdt-export
  bool write_snapshots = false;
};

Error usage(const std::string& what) { return Error(ErrorKind::InvalidArgument, what); }

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

QualifierOrder qualifier_order(const Options& o) {
  return o.post_release_qualifiers ? QualifierOrder::PostRelease : QualifierOrder::PreRelease;
}

MetadataIndex load_metadata(const Options& o) {
  if (o.metadata.empty()) throw usage("--metadata is required");
  return MetadataIndex(parse_metadata(read_file(o.metadata)));
}

std::vector<VulnerabilityRecord> load_vulns(const Options& o) {
  if (o.vulns.empty()) throw usage("--vulns is required");
  return parse_vulnerabilities(read_file(o.vulns));
}

ClusterScheme load_scheme(const Options& o) {
  if (o.scheme.empty()) return ClusterScheme::default_scheme();
  return ClusterScheme::from_json(read_file(o.scheme));
}

std::vector<fs::path> snapshot_files(const Options& o) {
  if (o.snapshots.empty()) throw usage("--snapshots is required");
  std::vector<fs::path> files;
  for (const auto& entry : o.snapshots) {
    const fs::path p(entry);
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> found;
      for (const auto& f : fs::directory_iterator(p)) {
        const auto ext = f.path().extension();
        if (f.is_regular_file() && (ext == ".json" || ext == ".txt")) found.push_back(f.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(p, ec)) {
      files.push_back(p);
    } else {
      throw Error(ErrorKind::IoError, "snapshot path " + entry + " does not exist");
    }
  }
  if (files.empty()) throw usage("no snapshot files found");
  return files;
}

/// Parsed snapshots with release dates joined from metadata, ordered by root release.
std::vector<DependencySnapshot> load_snapshots(const Options& o, const MetadataIndex& meta) {
  MavenTreeOptions tree_opts;
  tree_opts.omit_scopes.insert(o.omit_scopes.begin(), o.omit_scopes.end());
  const auto dates = meta.release_dates();
  std::vector<DependencySnapshot> snaps;
  for (const auto& f : snapshot_files(o)) {
    try {
      const std::string text = read_file(f);
      DependencySnapshot s = f.extension() == ".txt" ? parse_maven_tree(text, tree_opts)
                                                      : parse_snapshot_json(text);
      s = s.with_release_dates(dates);
      s.root().release();
      snaps.push_back(std::move(s));
    } catch (const Error& e) {
      throw Error(e.kind(), f.string() + ": " + e.what());
    }
  }
  std::stable_sort(snaps.begin(), snaps.end(), [](const auto& a, const auto& b) {
    return a.root().release() < b.root().release();
  });
  return snaps;
}

TimeDependencyTree load_tdt(const Options& o, const MetadataIndex& meta) {
  const auto snaps = load_snapshots(o, meta);
  return build_tdt(snaps);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_days(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !(v >= 0.0)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw usage(flag + " expects nonnegative day counts, got '" + s + "'");
  }
}

fs::path require_out_dir(const Options& o) {
  if (o.out.empty()) throw usage("--out is required");
  fs::create_directories(o.out);
  return fs::path(o.out);
}

// ---------------------------------------------------------------------------

int cmd_fit(const Options& o, std::ostream& out, std::ostream& err) {
  const MetadataIndex meta = load_metadata(o);
  const auto vulns = load_vulns(o);
  const ClusterScheme scheme = load_scheme(o);
  if (o.models_dir.empty()) throw usage("--models-dir is required");

  const auto chains = build_cchains(meta.instances());
  PoolOptions popts;
  popts.order = qualifier_order(o);
  popts.min_severity = o.no_severity_filter ? std::nullopt : std::optional<double>(o.min_cvss.value_or(7.0));
  const PoolCollection pools = collect_grace_pools(vulns, chains, meta, scheme, popts);
  for (const auto& r : pools.rejected) {
    err << "warning: NegativeGrace: " << r.vuln_id << " precedes the release of " << r.evidence.key()
        << " by " << -r.days << " days; sample rejected\n";
  }

  const fs::path models_dir(o.models_dir);
  fs::create_directories(models_dir);
  std::optional<fs::path> audit_dir;
  if (!o.out.empty()) audit_dir = require_out_dir(o);

  std::vector<std::string> sparse;
  out << "cluster sizes (" << vulns.size() << " records, " << pools.filtered_by_severity
      << " below severity threshold, " << pools.rejected.size() << " rejected):\n";
  for (const auto& cluster : scheme.clusters()) {
    const GracePool& pool = pools.pools.at(cluster);
    const std::size_t m = pool.samples.size();
    const fs::path model_path = models_dir / model_filename(cluster);
    out << "  " << scheme.display(cluster, "∩") << "=" << m;
    const bool enough = m >= o.min_samples;
    if (!enough) sparse.push_back(cluster.label + " (" + std::to_string(m) + ")");
    if (m == 0 || (!enough && !o.allow_sparse)) {
      fs::remove(model_path);
      out << "  no model\n";
      continue;
    }
    KdeOptions kopts;
    kopts.min_samples = 1;
    kopts.bandwidth_override = o.bandwidth;
    const KdeModel model = fit_kde(pool, kopts);
    write_file(model_path, model.to_json());
    if (audit_dir) {
      write_file(*audit_dir / (model_path.stem().string() + ".grid.csv"), model.grid_csv());
    }
    out << "  h=" << fmt_g(model.bandwidth()) << "  -> " << model_path.filename().string() << '\n';
  }
  if (audit_dir) write_file(*audit_dir / "pools.csv", pools_to_csv(pools));

  if (!sparse.empty()) {
    std::string list;
    for (const auto& s : sparse) list += (list.empty() ? "" : ", ") + s;
    if (!o.allow_sparse) {
      err << "error: clusters below " << o.min_samples << " samples: " << list
          << " (use --allow-sparse to fit them anyway)\n";
      return kExitSparse;
    }
    err << "warning: sparse clusters: " << list << '\n';
  }
  return kExitOk;
}

int cmd_forecast(const Options& o, std::ostream& out, std::ostream&) {
  const MetadataIndex meta = load_metadata(o);
  const ClusterScheme scheme = load_scheme(o);
  if (o.models_dir.empty()) throw usage("--models-dir is required");
  if (!o.horizon) throw usage("--horizon is required");
  if (*o.horizon < 0) throw usage("--horizon must be >= 0");
  const ModelSet models = ModelSet::load_dir(o.models_dir);
  const TimeDependencyTree tdt = load_tdt(o, meta);

  std::set<Date> points;
  if (o.at.empty()) {
    for (const auto& r : tdt.root_chain().instances()) points.insert(r.release());
  } else {
    for (const auto& s : split_list(o.at)) {
      try {
        points.insert(Date::parse(s));
      } catch (const Error&) {
        throw usage("--at expects ISO dates, got '" + s + "'");
      }
    }
  }
  const std::vector<Date> ordered(points.begin(), points.end());
  const ForecastContext ctx{meta, models, scheme, o.allow_extrapolation};
  const auto reports = forecast(tdt, ordered, *o.horizon, ctx);

  if (o.out.empty()) {
    out << reports_to_json(reports);
  } else {
    write_file(o.out, reports_to_json(reports));
    out << reports_table(reports);
  }
  return kExitOk;
}

const KdeModel& resolve_model(const ModelSet& models, const std::string& name, const char* flag) {
  if (name.empty()) throw usage(std::string(flag) + " is required");
  for (const auto& [id, model] : models.models()) {
    if (id.label == name || fs::path(model_filename(id)).stem().string() == name) return model;
  }
  throw Error(ErrorKind::MissingModel, "no model for cluster '" + name + "'");
}

int cmd_joint(const Options& o, std::ostream& out, std::ostream&) {
  if (o.models_dir.empty()) throw usage("--models-dir is required");
  const ModelSet models = ModelSet::load_dir(o.models_dir);
  const CdfHandle a = CdfHandle::of(resolve_model(models, o.cluster_a, "--cluster-a"), o.allow_extrapolation);
  const CdfHandle b = CdfHandle::of(resolve_model(models, o.cluster_b, "--cluster-b"), o.allow_extrapolation);
  const fs::path dir = require_out_dir(o);

  const ProbabilityPlane plane = probability_plane(a, b, o.x_max, o.y_max, o.resolution);
  write_file(dir / "plane.csv", plane.to_csv());
  out << "plane " << o.resolution << "x" << o.resolution << " -> " << (dir / "plane.csv").string() << '\n';

  for (const auto& spec : o.offsets) {
    const auto parts = split_list(spec);
    if (parts.size() != 2) throw usage("--offsets expects X,Y, got '" + spec + "'");
    const double ox = parse_days(parts[0], "--offsets");
    const double oy = parse_days(parts[1], "--offsets");
    const DiagonalCut cut = diagonal_cut(a, b, ox, oy, o.u_max, o.resolution);
    const std::string name = "cut_" + parts[0] + "_" + parts[1] + ".csv";
    write_file(dir / name, cut.to_csv());
    out << "cut (" << parts[0] << "," << parts[1] << "): F(0)=" << fmt_g(cut.cdf.front())
        << " F(" << fmt_g(o.u_max) << ")=" << fmt_g(cut.cdf.back()) << " -> " << (dir / name).string()
        << '\n';
  }
  return kExitOk;
}

int cmd_health(const Options& o, std::ostream& out, std::ostream&) {
  const MetadataIndex meta = load_metadata(o);
  auto vulns = load_vulns(o);
  if (o.min_cvss && !o.no_severity_filter) {
    std::erase_if(vulns, [&](const VulnerabilityRecord& v) { return v.severity < *o.min_cvss; });
  }
  const auto chains = build_cchains(meta.instances());
  HealthOptions hopts;
  hopts.all_prior_versions = o.all_prior_versions;
  hopts.order = qualifier_order(o);
  const HealthReport health = chain_health(chains, vulns, hopts);

  std::optional<fs::path> dir;
  if (!o.out.empty()) dir = require_out_dir(o);
  out << "c-chain health (fraction of instances inside published vulnerable ranges):\n"
      << health_table(health);
  if (dir) write_file(*dir / "health.json", health_to_json(health));

  if (!o.snapshots.empty()) {
    const TimeDependencyTree tdt = load_tdt(o, meta);
    PervasiveOptions popts;
    popts.min_dependents = o.min_dependents;
    popts.weighted = o.weighted;
    const auto pervasive = pervasive_dependencies(tdt, popts);
    const auto spofs = spof(tdt, o.min_coverage);
    out << "pervasive dependencies (>= " << o.min_dependents << " dependents):\n";
    for (const auto& c : pervasive) {
      out << "  " << tdt.nodes()[c.node].key() << "  " << c.dependents;
      if (o.weighted) out << "  weighted=" << fmt_g(c.weighted);
      out << '\n';
    }
    out << "single points of failure (coverage >= " << fmt_g(o.min_coverage) << "):\n";
    for (const auto& r : spofs) {
      out << "  " << tdt.nodes()[r.node].key() << "  " << r.columns.size() << "/" << tdt.column_count()
          << '\n';
    }
    if (dir) {
      write_file(*dir / "pervasive.json", pervasive_to_json(tdt, pervasive));
      write_file(*dir / "spof.json", spof_to_json(tdt, spofs));
    }
  }
  return kExitOk;
}

int cmd_tdt_export(const Options& o, std::ostream& out, std::ostream&) {
  const MetadataIndex meta = load_metadata(o);
  const auto snaps = load_snapshots(o, meta);
  const TimeDependencyTree tdt = build_tdt(snaps);
  const fs::path dir = require_out_dir(o);
  write_file(dir / "tdt.json", tdt_to_json(tdt));
  write_file(dir / "tdt.dot", tdt_to_dot(tdt));
  if (o.write_snapshots) {
    for (const auto& s : snaps) {
      const std::string name = s.root().id.artifact + "-" + s.root().version.raw() + ".json";
      write_file(dir / "snapshots" / name, serialize_snapshot_json(s));
    }
  }
  out << "span " << tdt.span_start().to_iso() << " .. " << tdt.span_end().to_iso() << ": "
      << tdt.nodes().size() << " nodes, " << tdt.dep_edges().size() << " dependency edges, "
      << tdt.chain_edges().size() << " chain edges\n";
  return kExitOk;
}

void report_error(std::ostream& err, bool json, std::string_view kind, const std::string& message) {
  if (json) {
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    err << j.dump() << '\n';
  } else {
    err << "error: " << kind << ": " << message << '\n';
  }
}

void add_shared(CLI::App* cmd, Options& o) {
  cmd->add_option("--metadata", o.metadata, "Instance metadata CSV");
  cmd->add_option("--vulns", o.vulns, "Vulnerability records JSON");
  cmd->add_option("--snapshots", o.snapshots, "Snapshot files or directories (.json, .txt tree dumps)");
  cmd->add_option("--models-dir", o.models_dir, "Directory of fitted model files");
  cmd->add_option("--out", o.out, "Output file or directory");
  cmd->add_option("--horizon", o.horizon, "Forecast window in days");
  cmd->add_option("--at", o.at, "Comma-separated ISO dates");
  cmd->add_option("--scheme", o.scheme, "Cluster scheme JSON (default: orientation x 100k LoC)");
  cmd->add_option("--min-cvss", o.min_cvss, "Minimum severity for evidence (fit default 7.0)");
  cmd->add_flag("--no-severity-filter", o.no_severity_filter, "Keep records of any severity");
  cmd->add_flag("--post-release-qualifiers", o.post_release_qualifiers,
                "Order qualified versions after their plain release");
  cmd->add_option("--omit-scopes", o.omit_scopes, "Dependency scopes dropped from tree dumps")
      ->delimiter(',');
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const bool json_errors = std::find(args.begin(), args.end(), "--json-errors") != args.end();
  Options o;
  CLI::App app{"Vulnerability forecasting over time dependency trees", "tdtf"};
  app.set_config("--config", "", "TOML/INI file with option defaults");
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  bool json_flag = false;
  app.add_flag("--json-errors", json_flag, "Report errors as JSON on stderr");
  app.require_subcommand(1);

  auto* fit = app.add_subcommand("fit", "Fit one grace-period density per cluster");
  add_shared(fit, o);
  fit->add_option("--min-samples", o.min_samples, "Minimum pool size per cluster")->capture_default_str();
  fit->add_option("--bandwidth", o.bandwidth, "Fixed bandwidth in days instead of Silverman's rule");
  fit->add_flag("--allow-sparse", o.allow_sparse, "Fit clusters below --min-samples too");

  auto* fc = app.add_subcommand("forecast", "Forecast disclosure probability for a project");
  add_shared(fc, o);
  fc->add_flag("--allow-extrapolation", o.allow_extrapolation,
               "Evaluate densities past the fitted grid instead of treating them as exhausted");

  auto* joint = app.add_subcommand("joint", "Joint CDF plane and diagonal cuts for two clusters");
  add_shared(joint, o);
  joint->add_option("--cluster-a", o.cluster_a, "Cluster label or model file stem");
  joint->add_option("--cluster-b", o.cluster_b, "Cluster label or model file stem");
  joint->add_option("--offsets", o.offsets, "Release offsets X,Y in days; repeatable");
  joint->add_option("--u-max", o.u_max, "Cut length in days")->capture_default_str();
  joint->add_option("--x-max", o.x_max, "Plane extent for A in days")->capture_default_str();
  joint->add_option("--y-max", o.y_max, "Plane extent for B in days")->capture_default_str();
  joint->add_option("--resolution", o.resolution, "Grid points per axis")->capture_default_str();
  joint->add_flag("--allow-extrapolation", o.allow_extrapolation, "Evaluate past the fitted grid");

  auto* health = app.add_subcommand("health", "c-chain health, pervasive dependencies and SPoFs");
  add_shared(health, o);
  health->add_option("--min-coverage", o.min_coverage, "SPoF coverage threshold")->capture_default_str();
  health->add_option("--min-dependents", o.min_dependents, "Pervasiveness threshold")->capture_default_str();
  health->add_flag("--weighted", o.weighted, "Rank by distance-weighted transitive dependents");
  health->add_flag("--all-prior-versions", o.all_prior_versions,
                   "Count every version up to the evidence instance as affected");

  auto* exp = app.add_subcommand("tdt-export", "Write the TDT as JSON and DOT");
  add_shared(exp, o);
  exp->add_flag("--write-snapshots", o.write_snapshots, "Also write canonical snapshot JSON files");

  for (auto* sub : {fit, fc, joint, health, exp}) {
    sub->add_flag("--json-errors", json_flag, "Report errors as JSON on stderr");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    report_error(err, json_errors, "UsageError", e.what());
    return kExitError;
  }

  try {
    if (*fit) return cmd_fit(o, out, err);
    if (*fc) return cmd_forecast(o, out, err);
    if (*joint) return cmd_joint(o, out, err);
    if (*health) return cmd_health(o, out, err);
    return cmd_tdt_export(o, out, err);
  } catch (const Error& e) {
    report_error(err, json_errors, to_string(e.kind()), e.what());
  } catch (const fs::filesystem_error& e) {
    report_error(err, json_errors, to_string(ErrorKind::IoError), e.what());
  } catch (const std::exception& e) {
    report_error(err, json_errors, "InternalError", e.what());
  }
  return kExitError;
}

}  // namespace tdtf::cli
