#include "tdtf/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tdtf/error.hpp"

namespace tdtf {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Orientation o) noexcept {
  return o == Orientation::Local ? "local" : "remote_network";
}

bool AffectedLibrary::applies_to(const LibraryId& lib) const {
  if (lib.group != group || lib.artifact != artifact) return false;
  return !chain_tag || chain_tag == lib.chain_tag;
}

bool AffectedLibrary::affects(const Version& v, QualifierOrder order) const {
  return std::any_of(ranges.begin(), ranges.end(),
                     [&](const VersionRange& r) { return version_in_range(v, r, order); });
}

// ---------------------------------------------------------------------------
// MetadataIndex

namespace {

std::string ga_version(const LibraryId& id, const Version& v) { return id.ga() + ":" + v.raw(); }

}  // namespace

MetadataIndex::MetadataIndex(std::vector<InstanceMetadata> rows) : rows_(std::move(rows)) {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    const std::string key = r.instance().key();
    if (!by_key_.emplace(key, i).second) {
      throw Error(ErrorKind::DuplicateRecord, "metadata lists " + key + " twice");
    }
    by_ga_version_[ga_version(r.id, r.version)].push_back(i);
  }
}

const InstanceMetadata* MetadataIndex::find(const LibraryInstance& inst) const {
  if (auto it = by_key_.find(inst.key()); it != by_key_.end()) return &rows_[it->second];
  if (auto it = by_ga_version_.find(ga_version(inst.id, inst.version));
      it != by_ga_version_.end() && it->second.size() == 1) {
    return &rows_[it->second.front()];
  }
  return nullptr;
}

std::vector<LibraryInstance> MetadataIndex::instances() const {
  std::vector<LibraryInstance> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r.instance());
  return out;
}

std::map<std::string, Date> MetadataIndex::release_dates() const {
  std::map<std::string, Date> out;
  for (const auto& r : rows_) out.emplace(r.instance().key(), r.release_date);
  for (const auto& [gav, idx] : by_ga_version_) {
    if (idx.size() == 1) out.emplace(gav, rows_[idx.front()].release_date);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Maven dependency:tree

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

Error parse_error(std::size_t line, const std::string& what) {
  return Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

/// Incrementally assembles a snapshot, merging repeated instances into one node.
class SnapshotAssembler {
 public:
  std::size_t add(LibraryInstance inst) {
    auto [it, inserted] = index_.emplace(inst.key(), nodes_.size());
    if (inserted) {
      nodes_.push_back(std::move(inst));
      deps_.emplace_back();
    } else if (inst.release_date && nodes_[it->second].release_date &&
               inst.release_date != nodes_[it->second].release_date) {
      throw Error(ErrorKind::ConflictingMetadata,
                  inst.key() + " appears with different release dates");
    } else if (inst.release_date) {
      nodes_[it->second].release_date = inst.release_date;
    }
    return it->second;
  }

  /// Returns false when the edge already exists.
  bool link(std::size_t parent, std::size_t child) {
    auto& d = deps_[parent];
    if (std::find(d.begin(), d.end(), child) != d.end()) return false;
    d.push_back(child);
    return true;
  }

  DependencySnapshot finish(std::optional<Date> observed_at = std::nullopt) {
    return DependencySnapshot::create(std::move(nodes_), std::move(deps_), observed_at);
  }

 private:
  std::vector<LibraryInstance> nodes_;
  std::vector<std::vector<std::size_t>> deps_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace

DependencySnapshot parse_maven_tree(std::string_view text, const MavenTreeOptions& options) {
  SnapshotAssembler assembler;
  std::vector<std::size_t> stack;  // node index per depth
  constexpr std::size_t kNoSkip = static_cast<std::size_t>(-1);
  std::size_t skip_below = kNoSkip;
  std::size_t line_no = 0;
  bool have_root = false;

  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.rfind("[INFO] ", 0) == 0) line.remove_prefix(7);
    if (trim(line).empty()) continue;

    std::size_t depth = 0;
    std::size_t pos = 0;
    bool branch = false;
    while (pos + 3 <= line.size()) {
      const std::string_view tok = line.substr(pos, 3);
      if (tok == "+- " || tok == "\\- ") {
        ++depth;
        pos += 3;
        branch = true;
        break;
      }
      if (tok == "|  " || tok == "   ") {
        ++depth;
        pos += 3;
        continue;
      }
      break;
    }
    if (depth > 0 && !branch) throw parse_error(line_no, "inconsistent indentation");

    std::string_view coord = line.substr(pos);
    if (auto space = coord.find(' '); space != std::string_view::npos) {
      coord = coord.substr(0, space);  // drops "(optional)" and similar annotations
    }
    const auto parts = split(coord, ':');
    if (std::any_of(parts.begin(), parts.end(), [](std::string_view p) { return p.empty(); })) {
      throw parse_error(line_no, "malformed coordinate '" + std::string(coord) + "'");
    }

    std::string_view version;
    std::string_view scope;
    if (depth == 0) {
      if (have_root) throw parse_error(line_no, "second root line");
      if (parts.size() == 4) {
        version = parts[3];
      } else if (parts.size() == 5) {
        version = parts[4];
      } else {
        throw parse_error(line_no, "malformed root coordinate '" + std::string(coord) + "'");
      }
    } else {
      if (!have_root) throw parse_error(line_no, "dependency before root line");
      if (parts.size() == 5) {
        version = parts[3];
        scope = parts[4];
      } else if (parts.size() == 6) {
        version = parts[4];
        scope = parts[5];
      } else {
        throw parse_error(line_no, "malformed coordinate '" + std::string(coord) + "'");
      }
    }

    if (skip_below != kNoSkip && depth > skip_below) continue;
    skip_below = kNoSkip;
    if (depth > stack.size()) throw parse_error(line_no, "inconsistent indentation");
    if (depth > 0 && options.omit_scopes.count(std::string(scope))) {
      skip_below = depth;
      stack.resize(depth);
      continue;
    }

    LibraryInstance inst{LibraryId(std::string(parts[0]), std::string(parts[1])),
                         Version(version), std::nullopt};
    const std::size_t idx = assembler.add(std::move(inst));
    if (depth == 0) {
      have_root = true;
    } else {
      assembler.link(stack[depth - 1], idx);
    }
    stack.resize(depth);
    stack.push_back(idx);
  }
  if (!have_root) throw Error(ErrorKind::ParseError, "empty dependency tree");
  return assembler.finish();
}

// ---------------------------------------------------------------------------
// JSON helpers

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::ParseError, path + ": " + what);
}

json parse_json(std::string_view bytes) {
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
  }
}

const json& require(const json& obj, const char* field, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(field);
  if (it == obj.end()) schema_error(path + "." + field, "missing required field");
  return *it;
}

std::string require_string(const json& obj, const char* field, const std::string& path) {
  const json& v = require(obj, field, path);
  if (!v.is_string() || v.get_ref<const std::string&>().empty()) {
    schema_error(path + "." + field, "expected a non-empty string");
  }
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* field,
                                           const std::string& path) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) schema_error(path + "." + field, "expected a string");
  return it->get<std::string>();
}

bool optional_bool(const json& obj, const char* field, const std::string& path, bool fallback) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_boolean()) schema_error(path + "." + field, "expected a boolean");
  return it->get<bool>();
}

Date json_date(const json& v, const std::string& path) {
  if (!v.is_string()) schema_error(path, "expected an ISO-8601 date string");
  try {
    return Date::parse(v.get_ref<const std::string&>());
  } catch (const Error& e) {
    schema_error(path, e.what());
  }
}

std::size_t parse_node(const json& node, const std::string& path, SnapshotAssembler& assembler) {
  LibraryInstance inst{
      LibraryId(require_string(node, "group", path), require_string(node, "artifact", path),
                optional_string(node, "chain_tag", path)),
      Version(require_string(node, "version", path)), std::nullopt};
  if (auto it = node.find("release_date"); it != node.end() && !it->is_null()) {
    inst.release_date = json_date(*it, path + ".release_date");
  }
  std::size_t idx = 0;
  try {
    idx = assembler.add(std::move(inst));
  } catch (const Error& e) {
    schema_error(path, e.what());
  }

  auto deps = node.find("dependencies");
  if (deps == node.end() || deps->is_null()) return idx;
  if (!deps->is_array()) schema_error(path + ".dependencies", "expected an array");
  // A shared node may be expanded more than once; only repeats within one list are errors.
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < deps->size(); ++i) {
    const std::string child_path = path + ".dependencies[" + std::to_string(i) + "]";
    const std::size_t child = parse_node((*deps)[i], child_path, assembler);
    if (!seen.insert(child).second) schema_error(child_path, "duplicate dependency");
    assembler.link(idx, child);
  }
  return idx;
}

ordered_json node_json(const DependencySnapshot& s, std::size_t i) {
  const LibraryInstance& inst = s.nodes()[i];
  ordered_json out;
  out["group"] = inst.id.group;
  out["artifact"] = inst.id.artifact;
  if (inst.id.chain_tag) out["chain_tag"] = *inst.id.chain_tag;
  out["version"] = inst.version.raw();
  if (inst.release_date) out["release_date"] = inst.release_date->to_iso();
  ordered_json deps = ordered_json::array();
  for (std::size_t j : s.dependencies(i)) deps.push_back(node_json(s, j));
  out["dependencies"] = std::move(deps);
  return out;
}

}  // namespace

DependencySnapshot parse_snapshot_json(std::string_view bytes) {
  const json doc = parse_json(bytes);
  if (!doc.is_object()) schema_error("$", "expected an object");
  std::optional<Date> observed_at;
  if (auto it = doc.find("observed_at"); it != doc.end() && !it->is_null()) {
    observed_at = json_date(*it, "$.observed_at");
  }
  SnapshotAssembler assembler;
  parse_node(require(doc, "root", "$"), "$.root", assembler);
  return assembler.finish(observed_at);
}

std::string serialize_snapshot_json(const DependencySnapshot& snapshot) {
  ordered_json doc;
  if (snapshot.observed_at()) doc["observed_at"] = snapshot.observed_at()->to_iso();
  doc["root"] = node_json(snapshot, 0);
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Vulnerability feed

std::vector<VulnerabilityRecord> parse_vulnerabilities(std::string_view bytes) {
  const json doc = parse_json(bytes);
  if (!doc.is_array()) schema_error("$", "expected an array of vulnerability records");
  std::vector<VulnerabilityRecord> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "$[" + std::to_string(i) + "]";
    const json& rec = doc[i];
    VulnerabilityRecord v;
    v.id = require_string(rec, "id", path);
    v.published = json_date(require(rec, "published", path), path + ".published");
    const json& sev = require(rec, "severity", path);
    if (!sev.is_number()) schema_error(path + ".severity", "expected a number");
    v.severity = sev.get<double>();
    if (!(v.severity >= 0.0 && v.severity <= 10.0)) {
      schema_error(path + ".severity", "must lie in [0, 10]");
    }
    const json& affected = require(rec, "affected", path);
    if (!affected.is_array()) schema_error(path + ".affected", "expected an array");
    for (std::size_t a = 0; a < affected.size(); ++a) {
      const std::string apath = path + ".affected[" + std::to_string(a) + "]";
      const json& entry = affected[a];
      AffectedLibrary lib;
      lib.group = require_string(entry, "group", apath);
      lib.artifact = require_string(entry, "artifact", apath);
      lib.chain_tag = optional_string(entry, "chain_tag", apath);
      const json& ranges = require(entry, "ranges", apath);
      if (!ranges.is_array()) schema_error(apath + ".ranges", "expected an array");
      for (std::size_t r = 0; r < ranges.size(); ++r) {
        const std::string rpath = apath + ".ranges[" + std::to_string(r) + "]";
        const json& rj = ranges[r];
        if (!rj.is_object()) schema_error(rpath, "expected an object");
        VersionRange range;
        if (auto lo = optional_string(rj, "lo", rpath)) range.lo = Version(*lo);
        if (auto hi = optional_string(rj, "hi", rpath)) range.hi = Version(*hi);
        range.lo_inclusive = optional_bool(rj, "lo_inclusive", rpath, true);
        range.hi_inclusive = optional_bool(rj, "hi_inclusive", rpath, false);
        if (range.lo && range.hi && compare_versions(*range.lo, *range.hi) > 0) {
          schema_error(rpath, "lower bound exceeds upper bound");
        }
        lib.ranges.push_back(std::move(range));
      }
      v.affected.push_back(std::move(lib));
    }
    if (!ids.insert(v.id).second) {
      throw Error(ErrorKind::DuplicateRecord, "duplicate vulnerability id " + v.id + " at " + path);
    }
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metadata CSV

namespace {

std::int64_t parse_count(std::string_view field, std::size_t line, const char* name) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || value < 0) {
    throw parse_error(line, std::string(name) + " must be a nonnegative integer, got '" +
                                std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::vector<InstanceMetadata> parse_metadata(std::string_view csv) {
  static const std::vector<std::string> required = {"group",    "artifact", "version",
                                                    "release_date", "own_loc", "dep_loc",
                                                    "orientation"};
  std::vector<InstanceMetadata> out;
  std::map<std::string, std::size_t> column;
  std::size_t line_no = 0;
  for (std::string_view line : split(csv, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    for (auto& f : fields) f = trim(f);
    if (column.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) column.emplace(std::string(fields[i]), i);
      for (const auto& name : required) {
        if (!column.count(name)) throw parse_error(line_no, "header lacks column '" + name + "'");
      }
      continue;
    }
    if (fields.size() != column.size()) {
      throw parse_error(line_no, "expected " + std::to_string(column.size()) + " fields, got " +
                                     std::to_string(fields.size()));
    }
    auto field = [&](const char* name) { return fields[column.at(name)]; };
    std::optional<std::string> tag;
    if (column.count("chain_tag") && !field("chain_tag").empty()) {
      tag = std::string(field("chain_tag"));
    }
    if (field("group").empty() || field("artifact").empty() || field("version").empty()) {
      throw parse_error(line_no, "group, artifact and version are required");
    }
    InstanceMetadata m;
    m.id = LibraryId(std::string(field("group")), std::string(field("artifact")), tag);
    m.version = Version(field("version"));
    try {
      m.release_date = Date::parse(field("release_date"));
    } catch (const Error& e) {
      throw parse_error(line_no, e.what());
    }
    m.own_loc = parse_count(field("own_loc"), line_no, "own_loc");
    if (!field("dep_loc").empty()) m.dep_loc = parse_count(field("dep_loc"), line_no, "dep_loc");
    const std::string_view orient = field("orientation");
    if (orient == "local") {
      m.orientation = Orientation::Local;
    } else if (orient == "remote_network") {
      m.orientation = Orientation::RemoteNetwork;
    } else {
      throw parse_error(line_no, "orientation must be 'local' or 'remote_network', got '" +
                                     std::string(orient) + "'");
    }
    out.push_back(std::move(m));
  }
  if (column.empty()) throw Error(ErrorKind::ParseError, "metadata CSV has no header");
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

}  // namespace tdtf
