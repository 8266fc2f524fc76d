#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tdtf/date.hpp"
#include "tdtf/ingest.hpp"
#include "tdtf/model.hpp"

namespace tdtf::test {

inline std::filesystem::path fixture(const std::string& rel) {
  return std::filesystem::path(TDTF_FIXTURES) / rel;
}

inline Date day(int n) { return Date(n); }
inline Date iso(const char* s) { return Date::parse(s); }

inline LibraryInstance inst(const std::string& artifact, const std::string& version,
                            std::optional<Date> date = std::nullopt,
                            const std::string& group = "t") {
  return LibraryInstance{LibraryId(group, artifact), Version(version), date};
}

/// Incremental snapshot construction keyed by instance; the first node is the root.
class SnapBuilder {
 public:
  std::size_t add(const LibraryInstance& i) {
    auto [it, inserted] = index_.emplace(i.key(), nodes_.size());
    if (inserted) {
      nodes_.push_back(i);
      deps_.emplace_back();
    }
    return it->second;
  }
  SnapBuilder& edge(const LibraryInstance& from, const LibraryInstance& to) {
    const std::size_t a = add(from);
    const std::size_t b = add(to);
    deps_[a].push_back(b);
    return *this;
  }
  DependencySnapshot build() const { return DependencySnapshot::create(nodes_, deps_); }

 private:
  std::vector<LibraryInstance> nodes_;
  std::vector<std::vector<std::size_t>> deps_;
  std::map<std::string, std::size_t> index_;
};

/// Three-version toy family: a1 uses b1 and d2, b1 uses c1, c1 uses d1; a2
/// swaps d2 for d3; a3 keeps d3 while b1 moves to c2, which no longer uses d.
struct ThreeRelease {
  LibraryInstance a1 = inst("a", "1", day(100)), a2 = inst("a", "2", day(200)),
                  a3 = inst("a", "3", day(300));
  LibraryInstance b1 = inst("b", "1", day(10));
  LibraryInstance c1 = inst("c", "1", day(20)), c2 = inst("c", "2", day(250));
  LibraryInstance d1 = inst("d", "1", day(5)), d2 = inst("d", "2", day(50)),
                  d3 = inst("d", "3", day(150));

  std::vector<DependencySnapshot> snapshots() const {
    return {SnapBuilder().edge(a1, b1).edge(a1, d2).edge(b1, c1).edge(c1, d1).build(),
            SnapBuilder().edge(a2, b1).edge(a2, d3).edge(b1, c1).edge(c1, d1).build(),
            SnapBuilder().edge(a3, b1).edge(a3, d3).edge(b1, c2).build()};
  }
};

/// Deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool chance(double p) { return unit() < p; }
  std::mt19937_64& engine() { return rng_; }

  std::string version() {
    std::string v = std::to_string(integer(0, 3));
    const int parts = integer(0, 3);
    for (int i = 0; i < parts; ++i) v += "." + std::to_string(integer(0, 12));
    if (chance(0.25)) {
      static const char* quals[] = {"-alpha", "-beta1", "-rc1", "m1", "-SNAPSHOT", ".Final", "-jre"};
      v += quals[integer(0, 6)];
    }
    if (chance(0.05)) v = chance(0.5) ? "latest" : "";
    return v;
  }

  /// Connected DAG on `n` distinct instances rooted at node 0; extra edges
  /// only point from lower to higher indices.
  DependencySnapshot snapshot(std::size_t n, double extra_edge_p = 0.2, bool dated = true) {
    std::vector<LibraryInstance> nodes;
    for (std::size_t i = 0; i < n; ++i) {
      nodes.push_back(inst("lib" + std::to_string(i), std::to_string(integer(1, 5)) + ".0",
                           dated ? std::optional<Date>(day(integer(0, 1000))) : std::nullopt));
    }
    std::vector<std::vector<std::size_t>> deps(n);
    for (std::size_t i = 1; i < n; ++i) {
      deps[static_cast<std::size_t>(integer(0, static_cast<int>(i) - 1))].push_back(i);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (std::find(deps[i].begin(), deps[i].end(), j) == deps[i].end() && chance(extra_edge_p)) {
          deps[i].push_back(j);
        }
      }
    }
    return DependencySnapshot::create(std::move(nodes), std::move(deps));
  }

  /// Family of snapshots of one root library over a shared universe of
  /// dated instances, suitable for build_tdt.
  std::vector<DependencySnapshot> family(std::size_t columns, std::size_t libraries) {
    std::vector<std::vector<LibraryInstance>> universe(libraries);
    for (std::size_t l = 0; l < libraries; ++l) {
      const int versions = integer(1, 4);
      int date = integer(0, 50);
      for (int v = 1; v <= versions; ++v) {
        universe[l].push_back(inst("l" + std::to_string(l), std::to_string(v) + ".0", day(date)));
        date += integer(1, 60);
      }
    }
    std::vector<DependencySnapshot> out;
    int root_date = 1000;
    for (std::size_t k = 0; k < columns; ++k) {
      root_date += integer(1, 40);
      std::vector<LibraryInstance> nodes{inst("root", std::to_string(k + 1) + ".0", day(root_date))};
      std::set<std::string> keys;
      for (std::size_t l = 0; l < libraries; ++l) {
        if (chance(0.3)) continue;
        const int copies = chance(0.15) ? 2 : 1;
        for (int c = 0; c < copies; ++c) {
          const auto& pick = universe[l][static_cast<std::size_t>(
              integer(0, static_cast<int>(universe[l].size()) - 1))];
          if (keys.insert(pick.key()).second) nodes.push_back(pick);
        }
      }
      std::vector<std::set<std::size_t>> edges(nodes.size());
      for (std::size_t i = 1; i < nodes.size(); ++i) {
        edges[static_cast<std::size_t>(integer(0, static_cast<int>(i) - 1))].insert(i);
        if (i + 1 < nodes.size() && chance(0.2)) {
          edges[i].insert(static_cast<std::size_t>(
              integer(static_cast<int>(i) + 1, static_cast<int>(nodes.size()) - 1)));
        }
      }
      std::vector<std::vector<std::size_t>> deps;
      for (const auto& e : edges) deps.emplace_back(e.begin(), e.end());
      out.push_back(DependencySnapshot::create(std::move(nodes), std::move(deps)));
    }
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

/// Keys of the instances in a snapshot.
inline std::set<std::string> keys_of(const DependencySnapshot& s) {
  std::set<std::string> out;
  for (const auto& n : s.nodes()) out.insert(n.key());
  return out;
}

/// Edge set of a snapshot as key pairs.
inline std::set<std::pair<std::string, std::string>> edges_of(const DependencySnapshot& s) {
  std::set<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j : s.dependencies(i)) out.emplace(s.nodes()[i].key(), s.nodes()[j].key());
  }
  return out;
}

}  // namespace tdtf::test
