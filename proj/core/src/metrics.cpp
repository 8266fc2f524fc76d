#include "tdtf/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tdtf/error.hpp"
#include "tdtf/evidence.hpp"

namespace tdtf {

namespace {

class ColumnSet {
 public:
  explicit ColumnSet(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  void fill(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) set(i);
  }
  /// this |= a & b; returns whether anything changed.
  bool merge_and(const ColumnSet& a, const ColumnSet& b) {
    bool changed = false;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      const std::uint64_t next = words_[w] | (a.words_[w] & b.words_[w]);
      changed |= next != words_[w];
      words_[w] = next;
    }
    return changed;
  }

 private:
  std::vector<std::uint64_t> words_;
};

std::vector<std::vector<std::size_t>> reverse_edges(const TimeDependencyTree& tdt) {
  std::vector<std::vector<std::size_t>> in(tdt.nodes().size());
  for (std::size_t e = 0; e < tdt.dep_edges().size(); ++e) in[tdt.dep_edges()[e].to].push_back(e);
  return in;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::vector<DependentCount> pervasive_dependencies(const TimeDependencyTree& tdt,
                                                   const PervasiveOptions& options) {
  const auto in = reverse_edges(tdt);
  std::vector<DependentCount> out;
  for (std::size_t v = 0; v < tdt.nodes().size(); ++v) {
    std::set<std::size_t> direct;
    for (std::size_t e : in[v]) direct.insert(tdt.dep_edges()[e].from);
    if (direct.empty() || direct.size() < options.min_dependents) continue;
    DependentCount c{v, direct.size(), 0.0};
    if (options.weighted) {
      std::vector<std::size_t> dist(tdt.nodes().size(), 0);
      std::deque<std::size_t> queue{v};
      std::vector<char> seen(tdt.nodes().size(), 0);
      seen[v] = 1;
      while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t e : in[u]) {
          const std::size_t p = tdt.dep_edges()[e].from;
          if (seen[p]) continue;
          seen[p] = 1;
          dist[p] = dist[u] + 1;
          c.weighted += 1.0 / static_cast<double>(dist[p]);
          queue.push_back(p);
        }
      }
    }
    out.push_back(c);
  }
  std::stable_sort(out.begin(), out.end(), [&](const DependentCount& a, const DependentCount& b) {
    if (options.weighted && a.weighted != b.weighted) return a.weighted > b.weighted;
    if (a.dependents != b.dependents) return a.dependents > b.dependents;
    return tdt.nodes()[a.node].key() < tdt.nodes()[b.node].key();
  });
  return out;
}

std::vector<SpofReport> spof(const TimeDependencyTree& tdt, double min_coverage) {
  if (!(min_coverage > 0.0 && min_coverage <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "min_coverage must lie in (0, 1]");
  }
  const std::size_t n = tdt.nodes().size();
  const std::size_t m = tdt.column_count();
  const auto in = reverse_edges(tdt);

  std::vector<ColumnSet> edge_cols(tdt.dep_edges().size(), ColumnSet(m));
  for (std::size_t e = 0; e < tdt.dep_edges().size(); ++e) {
    for (std::size_t k : tdt.dep_edges()[e].columns) edge_cols[e].set(k);
  }
  std::vector<char> is_root(n, 0);
  for (std::size_t k = 0; k < m; ++k) is_root[tdt.root_node(k)] = 1;

  std::vector<SpofReport> out;
  for (std::size_t target = 0; target < n; ++target) {
    if (is_root[target]) continue;
    // reach[u]: columns k for which target is reachable from u along edges of column k.
    std::vector<ColumnSet> reach(n, ColumnSet(m));
    reach[target].fill(m);
    std::deque<std::size_t> work{target};
    while (!work.empty()) {
      const std::size_t u = work.front();
      work.pop_front();
      for (std::size_t e : in[u]) {
        const std::size_t p = tdt.dep_edges()[e].from;
        if (reach[p].merge_and(reach[u], edge_cols[e])) work.push_back(p);
      }
    }
    SpofReport r{target, {}, 0.0};
    for (std::size_t k = 0; k < m; ++k) {
      if (reach[tdt.root_node(k)].test(k)) r.columns.push_back(k);
    }
    r.coverage = static_cast<double>(r.columns.size()) / static_cast<double>(m);
    if (!r.columns.empty() && r.coverage >= min_coverage) out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [&](const SpofReport& a, const SpofReport& b) {
    if (a.columns.size() != b.columns.size()) return a.columns.size() > b.columns.size();
    return tdt.nodes()[a.node].key() < tdt.nodes()[b.node].key();
  });
  return out;
}

HealthReport chain_health(std::span<const CChain> chains, std::span<const VulnerabilityRecord> vulns,
                          const HealthOptions& options) {
  HealthReport report;
  for (const auto& chain : chains) {
    std::vector<char> hit(chain.size(), 0);
    for (const auto& vuln : vulns) {
      if (options.all_prior_versions) {
        const auto ev = find_evidence(vuln, chain, options.order);
        if (!ev) continue;
        for (std::size_t i = 0; i < chain.size(); ++i) {
          hit[i] = 1;
          if (chain.instances()[i].key() == ev->key()) break;
        }
        continue;
      }
      for (const auto& a : vuln.affected) {
        if (!a.applies_to(chain.id())) continue;
        for (std::size_t i = 0; i < chain.size(); ++i) {
          if (a.affects(chain.instances()[i].version, options.order)) hit[i] = 1;
        }
      }
    }
    ChainHealth h;
    h.id = chain.id();
    h.instances = chain.size();
    h.affected = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    h.fraction = h.instances ? static_cast<double>(h.affected) / static_cast<double>(h.instances) : 0.0;
    report.total_instances += h.instances;
    report.total_affected += h.affected;
    report.chains.push_back(std::move(h));
  }
  report.fraction = report.total_instances ? static_cast<double>(report.total_affected) /
                                                 static_cast<double>(report.total_instances)
                                           : 0.0;
  return report;
}

std::string pervasive_to_json(const TimeDependencyTree& tdt, std::span<const DependentCount> counts) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& c : counts) {
    const auto& inst = tdt.nodes()[c.node];
    nlohmann::ordered_json j;
    j["ga"] = inst.id.display();
    j["version"] = inst.version.raw();
    j["dependents"] = c.dependents;
    j["weighted_score"] = c.weighted;
    doc.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::string spof_to_json(const TimeDependencyTree& tdt, std::span<const SpofReport> reports) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    const auto& inst = tdt.nodes()[r.node];
    nlohmann::ordered_json j;
    j["ga"] = inst.id.display();
    j["version"] = inst.version.raw();
    auto versions = nlohmann::ordered_json::array();
    for (std::size_t k : r.columns) versions.push_back(tdt.root_chain().instances()[k].version.raw());
    j["compromised_root_versions"] = std::move(versions);
    j["coverage_fraction"] = r.coverage;
    doc.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::string health_to_json(const HealthReport& report) {
  nlohmann::ordered_json doc;
  doc["measure"] = "fraction of c-chain instances inside a published vulnerable range";
  auto chains = nlohmann::ordered_json::array();
  for (const auto& c : report.chains) {
    chains.push_back({{"chain", c.id.display()},
                      {"instances", c.instances},
                      {"instances_affected", c.affected},
                      {"fraction_affected", c.fraction}});
  }
  doc["chains"] = std::move(chains);
  doc["total_instances"] = report.total_instances;
  doc["total_affected"] = report.total_affected;
  doc["ecosystem_fraction_affected"] = report.fraction;
  return doc.dump(2) + "\n";
}

std::string health_table(const HealthReport& report) {
  std::ostringstream out;
  for (const auto& c : report.chains) {
    out << c.id.display() << "  " << c.affected << "/" << c.instances << "  " << fmt(c.fraction) << '\n';
  }
  out << "ecosystem  " << report.total_affected << "/" << report.total_instances << "  "
      << fmt(report.fraction) << '\n';
  return out.str();
}

}  // namespace tdtf
