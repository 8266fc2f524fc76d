#include "tdtf/model.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <utility>

#include "tdtf/error.hpp"

namespace tdtf {

LibraryId::LibraryId(std::string group, std::string artifact, std::optional<std::string> chain_tag)
    : group(std::move(group)), artifact(std::move(artifact)), chain_tag(std::move(chain_tag)) {
  if (this->group.empty() || this->artifact.empty()) {
    throw Error(ErrorKind::InvalidArgument, "library group and artifact must be non-empty");
  }
}

std::string LibraryId::display() const {
  return chain_tag ? ga() + "@" + *chain_tag : ga();
}

Date LibraryInstance::release() const {
  if (!release_date) throw Error(ErrorKind::MissingReleaseDate, "no release date for " + key());
  return *release_date;
}

bool chain_less(const LibraryInstance& a, const LibraryInstance& b) {
  const Date ra = a.release();
  const Date rb = b.release();
  if (ra != rb) return ra < rb;
  return compare_versions(a.version, b.version) < 0;
}

CChain::CChain(LibraryId id, std::vector<LibraryInstance> instances)
    : id_(std::move(id)), instances_(std::move(instances)) {
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    if (instances_[i].id != id_) {
      throw Error(ErrorKind::InvalidChain,
                  instances_[i].key() + " does not belong to chain " + id_.display());
    }
    if (i > 0 && !chain_less(instances_[i - 1], instances_[i])) {
      throw Error(ErrorKind::InvalidChain, "chain " + id_.display() + " is not ordered at " +
                                               instances_[i - 1].key() + " -> " +
                                               instances_[i].key());
    }
  }
  std::vector<const Version*> versions;
  versions.reserve(instances_.size());
  for (const auto& inst : instances_) versions.push_back(&inst.version);
  std::sort(versions.begin(), versions.end(),
            [](const Version* a, const Version* b) { return compare_versions(*a, *b) < 0; });
  for (std::size_t i = 1; i < versions.size(); ++i) {
    if (compare_versions(*versions[i - 1], *versions[i]) == 0) {
      throw Error(ErrorKind::InvalidChain, "duplicate version " + versions[i]->raw() +
                                               " in chain " + id_.display());
    }
  }
}

CChain contract_row(const LibraryId& id, const DMatrixRow& row) {
  std::vector<LibraryInstance> distinct;
  std::set<std::string> seen;
  for (const auto& cell : row) {
    if (cell && seen.insert(cell->key()).second) distinct.push_back(*cell);
  }
  std::stable_sort(distinct.begin(), distinct.end(), chain_less);
  return CChain(id, std::move(distinct));
}

// ---------------------------------------------------------------------------
// DependencySnapshot

DependencySnapshot DependencySnapshot::create(std::vector<LibraryInstance> nodes,
                                              std::vector<std::vector<std::size_t>> dependencies,
                                              std::optional<Date> observed_at) {
  if (nodes.empty()) throw Error(ErrorKind::InvalidSnapshot, "snapshot has no nodes");
  if (dependencies.size() != nodes.size()) {
    throw Error(ErrorKind::InvalidSnapshot, "adjacency size does not match node count");
  }
  const std::size_t n = nodes.size();
  std::set<std::string> keys;
  for (const auto& node : nodes) {
    if (!keys.insert(node.key()).second) {
      throw Error(ErrorKind::InvalidSnapshot, "instance " + node.key() + " listed twice");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::size_t> targets;
    for (std::size_t j : dependencies[i]) {
      if (j >= n) throw Error(ErrorKind::InvalidSnapshot, "dependency index out of range");
      if (j == i) {
        throw Error(ErrorKind::CycleDetected, nodes[i].key() + " depends on itself");
      }
      if (!targets.insert(j).second) {
        throw Error(ErrorKind::InvalidSnapshot,
                    "duplicate edge " + nodes[i].key() + " -> " + nodes[j].key());
      }
    }
  }

  // Iterative three-colour DFS over every node.
  enum : char { White, Grey, Black };
  std::vector<char> colour(n, White);
  for (std::size_t start = 0; start < n; ++start) {
    if (colour[start] != White) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
    colour[start] = Grey;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < dependencies[node].size()) {
        const std::size_t child = dependencies[node][next++];
        if (colour[child] == Grey) {
          throw Error(ErrorKind::CycleDetected,
                      "cycle through " + nodes[node].key() + " -> " + nodes[child].key());
        }
        if (colour[child] == White) {
          colour[child] = Grey;
          stack.emplace_back(child, 0);
        }
      } else {
        colour[node] = Black;
        stack.pop_back();
      }
    }
  }

  std::vector<bool> reached(n, false);
  std::deque<std::size_t> queue{0};
  reached[0] = true;
  while (!queue.empty()) {
    const std::size_t node = queue.front();
    queue.pop_front();
    for (std::size_t child : dependencies[node]) {
      if (!reached[child]) {
        reached[child] = true;
        queue.push_back(child);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!reached[i]) {
      throw Error(ErrorKind::InvalidSnapshot,
                  nodes[i].key() + " is not reachable from root " + nodes[0].key());
    }
  }

  DependencySnapshot s;
  s.nodes_ = std::move(nodes);
  s.deps_ = std::move(dependencies);
  s.observed_at_ = observed_at;
  return s;
}

std::size_t DependencySnapshot::edge_count() const noexcept {
  std::size_t count = 0;
  for (const auto& d : deps_) count += d.size();
  return count;
}

std::optional<std::size_t> DependencySnapshot::find(const std::string& key) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].key() == key) return i;
  }
  return std::nullopt;
}

DependencySnapshot DependencySnapshot::with_release_dates(
    const std::map<std::string, Date>& dates) const {
  DependencySnapshot copy = *this;
  for (auto& node : copy.nodes_) {
    if (node.release_date) continue;
    if (auto it = dates.find(node.key()); it != dates.end()) node.release_date = it->second;
  }
  return copy;
}

DependencySnapshot DependencySnapshot::with_observed_at(Date t) const {
  DependencySnapshot copy = *this;
  copy.observed_at_ = t;
  return copy;
}

namespace {

using CanonicalSnapshot =
    std::map<std::string, std::pair<std::optional<Date>, std::vector<std::string>>>;

CanonicalSnapshot canonical(const DependencySnapshot& s) {
  CanonicalSnapshot out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<std::string> deps;
    for (std::size_t j : s.dependencies(i)) deps.push_back(s.nodes()[j].key());
    std::sort(deps.begin(), deps.end());
    out.emplace(s.nodes()[i].key(), std::make_pair(s.nodes()[i].release_date, std::move(deps)));
  }
  return out;
}

}  // namespace

bool operator==(const DependencySnapshot& a, const DependencySnapshot& b) {
  return a.root().key() == b.root().key() && canonical(a) == canonical(b);
}

// ---------------------------------------------------------------------------
// TimeDependencyTree

namespace {

bool edge_in_column(const DepEdge& e, std::size_t column) {
  return std::binary_search(e.columns.begin(), e.columns.end(), column);
}

}  // namespace

std::optional<std::size_t> TimeDependencyTree::find(const std::string& key) const {
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  return std::nullopt;
}

std::vector<LibraryId> TimeDependencyTree::libraries() const {
  std::set<LibraryId> ids;
  for (const auto& node : nodes_) ids.insert(node.id);
  return {ids.begin(), ids.end()};
}

DependencySnapshot TimeDependencyTree::column_snapshot(std::size_t column) const {
  const std::size_t root = root_nodes_.at(column);
  std::map<std::size_t, std::size_t> local;
  std::vector<LibraryInstance> nodes;
  std::vector<std::vector<std::size_t>> deps;
  std::deque<std::size_t> queue{root};
  local.emplace(root, 0);
  nodes.push_back(nodes_[root]);
  deps.emplace_back();
  while (!queue.empty()) {
    const std::size_t g = queue.front();
    queue.pop_front();
    const std::size_t li = local.at(g);
    for (std::size_t ei : out_edges_[g]) {
      const DepEdge& e = dep_edges_[ei];
      if (!edge_in_column(e, column)) continue;
      auto [it, inserted] = local.emplace(e.to, nodes.size());
      if (inserted) {
        nodes.push_back(nodes_[e.to]);
        deps.emplace_back();
        queue.push_back(e.to);
      }
      deps[li].push_back(it->second);
    }
  }
  return DependencySnapshot::create(std::move(nodes), std::move(deps));
}

std::vector<CChain> build_cchains(std::span<const LibraryInstance> instances) {
  std::map<LibraryId, std::map<std::string, LibraryInstance>> grouped;
  for (const auto& inst : instances) {
    inst.release();  // precondition: every instance has a release date
    auto& bucket = grouped[inst.id];
    auto [it, inserted] = bucket.emplace(inst.version.raw(), inst);
    if (!inserted && it->second.release_date != inst.release_date) {
      throw Error(ErrorKind::ConflictingMetadata,
                  inst.key() + " has conflicting release dates " +
                      it->second.release_date->to_iso() + " and " + inst.release_date->to_iso());
    }
  }
  std::vector<CChain> chains;
  chains.reserve(grouped.size());
  for (auto& [id, bucket] : grouped) {
    std::vector<LibraryInstance> members;
    members.reserve(bucket.size());
    for (auto& [raw, inst] : bucket) members.push_back(std::move(inst));
    std::sort(members.begin(), members.end(), chain_less);
    for (std::size_t i = 1; i < members.size(); ++i) {
      if (compare_versions(members[i - 1].version, members[i].version) == 0 &&
          members[i - 1].release_date == members[i].release_date) {
        throw Error(ErrorKind::ConflictingMetadata, members[i - 1].key() + " and " +
                                                        members[i].key() +
                                                        " denote the same version");
      }
    }
    try {
      chains.emplace_back(id, std::move(members));
    } catch (const Error& e) {
      throw Error(ErrorKind::ConflictingMetadata, e.what());
    }
  }
  return chains;
}

TimeDependencyTree build_tdt(std::span<const DependencySnapshot> snapshots) {
  if (snapshots.empty()) throw Error(ErrorKind::InvalidArgument, "no snapshots given");
  const LibraryId root_id = snapshots.front().root().id;
  for (const auto& s : snapshots) {
    if (s.root().id != root_id) {
      throw Error(ErrorKind::MixedRoots, "snapshot root " + s.root().key() +
                                             " differs from library " + root_id.display());
    }
  }
  for (std::size_t k = 1; k < snapshots.size(); ++k) {
    if (!(snapshots[k - 1].root().release() < snapshots[k].root().release())) {
      throw Error(ErrorKind::InvalidArgument,
                  "root release dates must strictly increase: " + snapshots[k - 1].root().key() +
                      " then " + snapshots[k].root().key());
    }
  }

  TimeDependencyTree tdt;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index;
  std::vector<LibraryInstance> roots;

  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    const DependencySnapshot& s = snapshots[k];
    std::vector<std::size_t> global(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const LibraryInstance& inst = s.nodes()[i];
      inst.release();
      auto [it, inserted] = tdt.index_.emplace(inst.key(), tdt.nodes_.size());
      if (inserted) {
        tdt.nodes_.push_back(inst);
        tdt.out_edges_.emplace_back();
      } else if (tdt.nodes_[it->second].release_date != inst.release_date) {
        throw Error(ErrorKind::ConflictingMetadata,
                    inst.key() + " appears with different release dates");
      }
      global[i] = it->second;
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j : s.dependencies(i)) {
        const auto key = std::make_pair(global[i], global[j]);
        auto [it, inserted] = edge_index.emplace(key, tdt.dep_edges_.size());
        if (inserted) {
          tdt.dep_edges_.push_back(DepEdge{global[i], global[j], {}});
          tdt.out_edges_[global[i]].push_back(it->second);
        }
        tdt.dep_edges_[it->second].columns.push_back(k);
      }
    }
    tdt.root_nodes_.push_back(global[0]);
    roots.push_back(s.root());
  }
  tdt.root_chain_ = CChain(root_id, std::move(roots));

  tdt.derive_chain_edges();
  return tdt;
}

DependencySnapshot time_index(const TimeDependencyTree& tdt, Date t) {
  if (t < tdt.span_start() || t > tdt.span_end()) {
    throw Error(ErrorKind::OutOfSpan, t.to_iso() + " is outside [" + tdt.span_start().to_iso() +
                                          ", " + tdt.span_end().to_iso() + "]");
  }
  std::size_t column = 0;
  for (std::size_t k = 0; k < tdt.column_count(); ++k) {
    if (tdt.nodes()[tdt.root_node(k)].release() <= t) column = k;
  }
  return tdt.column_snapshot(column).with_observed_at(t);
}

// ---------------------------------------------------------------------------
// Library slicing

namespace {

constexpr std::size_t kMaxPathsPerNode = 64;

struct ColumnView {
  std::vector<std::size_t> bfs_order;                     // reachable nodes, BFS from root
  std::map<std::size_t, std::set<std::string>> paths;     // library paths from the root
};

ColumnView view_column(const TimeDependencyTree& tdt, std::size_t column) {
  ColumnView view;
  const std::size_t root = tdt.root_node(column);
  std::map<std::size_t, std::vector<std::size_t>> children;
  std::set<std::size_t> seen{root};
  std::deque<std::size_t> queue{root};
  while (!queue.empty()) {
    const std::size_t g = queue.front();
    queue.pop_front();
    view.bfs_order.push_back(g);
    for (std::size_t ei : tdt.out_edges(g)) {
      const DepEdge& e = tdt.dep_edges()[ei];
      if (!edge_in_column(e, column)) continue;
      children[g].push_back(e.to);
      if (seen.insert(e.to).second) queue.push_back(e.to);
    }
  }

  // Topological order (reverse DFS post-order) so each node's parents are
  // complete before its paths are extended.
  std::vector<std::size_t> post;
  std::set<std::size_t> done;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
  done.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    const auto& kids = children[node];
    if (next < kids.size()) {
      const std::size_t child = kids[next++];
      if (done.insert(child).second) stack.emplace_back(child, 0);
    } else {
      post.push_back(node);
      stack.pop_back();
    }
  }
  std::reverse(post.begin(), post.end());

  view.paths[root].insert(tdt.nodes()[root].id.display());
  for (std::size_t node : post) {
    const auto& mine = view.paths[node];
    for (std::size_t child : children[node]) {
      auto& theirs = view.paths[child];
      for (const auto& p : mine) {
        if (theirs.size() >= kMaxPathsPerNode) break;
        theirs.insert(p + '\x1f' + tdt.nodes()[child].id.display());
      }
    }
  }
  return view;
}

struct RowState {
  std::set<std::string> paths;
  std::optional<std::size_t> last;  // most recent node index
};

std::size_t overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t n = 0;
  for (const auto& p : a) n += b.count(p);
  return n;
}

DMatrix slice_with_views(const TimeDependencyTree& tdt, const LibraryId& lib,
                         const std::vector<ColumnView>& views) {
  DMatrix m;
  m.id = lib;
  const std::size_t columns = tdt.column_count();
  for (std::size_t k = 0; k < columns; ++k) m.columns.push_back(tdt.nodes()[tdt.root_node(k)].release());

  // Version rank of each instance of lib, for the proximity fallback.
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < tdt.nodes().size(); ++i) {
    if (tdt.nodes()[i].id == lib) members.push_back(i);
  }
  std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
    return chain_less(tdt.nodes()[a], tdt.nodes()[b]);
  });
  std::map<std::size_t, long> rank;
  for (std::size_t r = 0; r < members.size(); ++r) rank[members[r]] = static_cast<long>(r);

  std::vector<RowState> state;
  std::vector<std::vector<std::optional<std::size_t>>> cells;  // row -> column -> node
  bool found = false;

  for (std::size_t k = 0; k < columns; ++k) {
    const ColumnView& view = views[k];
    std::vector<std::size_t> occurrences;
    for (std::size_t g : view.bfs_order) {
      if (tdt.nodes()[g].id == lib) occurrences.push_back(g);
    }
    found = found || !occurrences.empty();

    std::vector<std::optional<std::size_t>> assignment(occurrences.size());
    std::vector<bool> taken(state.size(), false);

    // Pass 1: dependency-path overlap.
    for (std::size_t o = 0; o < occurrences.size(); ++o) {
      const auto& paths = view.paths.at(occurrences[o]);
      std::size_t best_score = 0;
      std::optional<std::size_t> best;
      for (std::size_t r = 0; r < state.size(); ++r) {
        if (taken[r]) continue;
        const std::size_t score = overlap(paths, state[r].paths);
        if (score > best_score) {
          best_score = score;
          best = r;
        }
      }
      if (best) {
        assignment[o] = best;
        taken[*best] = true;
      }
    }
    // Pass 2: version proximity against rows still free in this column.
    for (std::size_t o = 0; o < occurrences.size(); ++o) {
      if (assignment[o]) continue;
      std::optional<std::size_t> best;
      long best_dist = 0;
      for (std::size_t r = 0; r < state.size(); ++r) {
        if (taken[r] || !state[r].last) continue;
        const long dist = std::labs(rank.at(occurrences[o]) - rank.at(*state[r].last));
        if (!best || dist < best_dist) {
          best = r;
          best_dist = dist;
        }
      }
      if (best) {
        assignment[o] = best;
        taken[*best] = true;
      }
    }
    // Pass 3: new rows.
    for (std::size_t o = 0; o < occurrences.size(); ++o) {
      if (assignment[o]) continue;
      assignment[o] = state.size();
      state.emplace_back();
      cells.emplace_back(k, std::nullopt);
      taken.push_back(true);
    }

    for (auto& row : cells) row.emplace_back(std::nullopt);
    for (std::size_t o = 0; o < occurrences.size(); ++o) {
      const std::size_t r = *assignment[o];
      cells[r][k] = occurrences[o];
      state[r].last = occurrences[o];
      const auto& paths = view.paths.at(occurrences[o]);
      state[r].paths.insert(paths.begin(), paths.end());
    }
  }

  if (!found) {
    throw Error(ErrorKind::NotADependency, lib.display() + " occurs in no snapshot of the TDT");
  }
  for (const auto& row : cells) {
    DMatrixRow out;
    out.reserve(columns);
    for (const auto& cell : row) {
      out.push_back(cell ? DMatrixCell(tdt.nodes()[*cell]) : std::nullopt);
    }
    m.rows.push_back(std::move(out));
  }
  return m;
}

std::vector<ColumnView> view_columns(const TimeDependencyTree& tdt) {
  std::vector<ColumnView> views;
  views.reserve(tdt.column_count());
  for (std::size_t k = 0; k < tdt.column_count(); ++k) views.push_back(view_column(tdt, k));
  return views;
}

}  // namespace

DMatrix library_slice(const TimeDependencyTree& tdt, const LibraryId& lib) {
  return slice_with_views(tdt, lib, view_columns(tdt));
}

void TimeDependencyTree::derive_chain_edges() {
  const auto views = view_columns(*this);
  std::set<ChainEdge> edges;
  for (const LibraryId& lib : libraries()) {
    const DMatrix m = slice_with_views(*this, lib, views);
    for (const auto& row : m.rows) {
      const CChain chain = contract_row(lib, row);
      for (std::size_t i = 1; i < chain.size(); ++i) {
        edges.insert(ChainEdge{index_.at(chain.instances()[i - 1].key()),
                               index_.at(chain.instances()[i].key())});
      }
    }
  }
  chain_edges_.assign(edges.begin(), edges.end());
}

}  // namespace tdtf
