#include "tdtf/graph_export.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

namespace tdtf {

std::string tdt_to_json(const TimeDependencyTree& tdt) {
  nlohmann::ordered_json doc;
  doc["span"] = {{"start", tdt.span_start().to_iso()}, {"end", tdt.span_end().to_iso()}};

  auto columns = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < tdt.column_count(); ++k) columns.push_back(tdt.root_node(k));
  doc["columns"] = std::move(columns);

  auto nodes = nlohmann::ordered_json::array();
  for (const auto& n : tdt.nodes()) {
    nlohmann::ordered_json j;
    j["ga"] = n.id.ga();
    if (n.id.chain_tag) j["chain_tag"] = *n.id.chain_tag;
    j["version"] = n.version.raw();
    j["release_date"] = n.release().to_iso();
    nodes.push_back(std::move(j));
  }
  doc["nodes"] = std::move(nodes);

  auto deps = nlohmann::ordered_json::array();
  for (const auto& e : tdt.dep_edges()) {
    deps.push_back({{"from", e.from}, {"to", e.to}, {"columns", e.columns}});
  }
  doc["dep_edges"] = std::move(deps);

  auto chains = nlohmann::ordered_json::array();
  for (const auto& e : tdt.chain_edges()) chains.push_back({{"from", e.from}, {"to", e.to}});
  doc["chain_edges"] = std::move(chains);
  return doc.dump(2) + "\n";
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string tdt_to_dot(const TimeDependencyTree& tdt) {
  std::ostringstream out;
  out << "digraph tdt {\n  rankdir=TB;\n  node [shape=box, fontname=\"Helvetica\"];\n";
  for (std::size_t i = 0; i < tdt.nodes().size(); ++i) {
    const auto& n = tdt.nodes()[i];
    out << "  n" << i << " [label=\"" << dot_escape(n.id.display()) << "\\n"
        << dot_escape(n.version.raw()) << "\\n" << n.release().to_iso() << "\"];\n";
  }
  for (const auto& e : tdt.dep_edges()) {
    out << "  n" << e.from << " -> n" << e.to << " [label=\"";
    for (std::size_t c = 0; c < e.columns.size(); ++c) out << (c ? "," : "") << e.columns[c];
    out << "\"];\n";
  }
  for (const auto& e : tdt.chain_edges()) {
    out << "  n" << e.from << " -> n" << e.to << " [style=dashed, color=darkgreen];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace tdtf
