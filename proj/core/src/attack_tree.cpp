#include "tdtf/attack_tree.hpp"

#include <cmath>

#include "tdtf/error.hpp"

namespace tdtf {

AttackTree AttackTree::from_snapshot(const DependencySnapshot& snapshot) {
  AttackTree at;
  const std::size_t n = snapshot.size();
  at.instances_ = snapshot.nodes();
  at.bas_.resize(n);
  at.gate_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!snapshot.is_leaf(i)) {
      at.gate_[i] = at.nodes_.size();
      at.nodes_.push_back(Node{Kind::Or, i, {}});
    }
    at.bas_[i] = at.nodes_.size();
    at.nodes_.push_back(Node{Kind::Bas, i, {}});
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!at.gate_[i]) continue;
    auto& children = at.nodes_[*at.gate_[i]].children;
    children.push_back(at.bas_[i]);
    for (std::size_t d : snapshot.dependencies(i)) {
      children.push_back(at.gate_[d] ? *at.gate_[d] : at.bas_[d]);
    }
  }
  at.root_ = at.gate_[0] ? *at.gate_[0] : at.bas_[0];
  return at;
}

std::size_t AttackTree::gate_count() const noexcept { return nodes_.size() - instances_.size(); }

std::size_t AttackTree::edge_count() const noexcept {
  std::size_t e = 0;
  for (const auto& node : nodes_) e += node.children.size();
  return e;
}

AttackTree to_attack_tree(const DependencySnapshot& snapshot) {
  return AttackTree::from_snapshot(snapshot);
}

double propagate(const AttackTree& tree, std::span<const std::optional<double>> bas_probability) {
  if (bas_probability.size() != tree.instances().size()) {
    throw Error(ErrorKind::InvalidArgument, "expected one estimate per instance");
  }
  std::vector<char> seen(tree.nodes().size(), 0);
  std::vector<std::size_t> stack{tree.root()};
  seen[tree.root()] = 1;
  double log_survival = 0.0;
  bool certain = false;
  while (!stack.empty()) {
    const auto& node = tree.nodes()[stack.back()];
    stack.pop_back();
    if (node.kind == AttackTree::Kind::Bas) {
      const auto& p = bas_probability[node.instance];
      if (!p) {
        throw Error(ErrorKind::MissingEstimate,
                    "no estimate for " + tree.instances()[node.instance].key());
      }
      if (!(*p >= 0.0 && *p <= 1.0)) {
        throw Error(ErrorKind::DomainError, "estimate for " + tree.instances()[node.instance].key() +
                                                " lies outside [0, 1]");
      }
      if (*p == 1.0) certain = true;
      else log_survival += std::log1p(-*p);
      continue;
    }
    for (std::size_t c : node.children) {
      if (!seen[c]) {
        seen[c] = 1;
        stack.push_back(c);
      }
    }
  }
  return certain ? 1.0 : -std::expm1(log_survival);
}

}  // namespace tdtf
