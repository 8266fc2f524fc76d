#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tdtf/model.hpp"

namespace tdtf {

/// OR-gate attack tree mirroring a dependency snapshot. A leaf instance maps
/// to a basic attack step (BAS); any other instance maps to an OR gate whose
/// inputs are its own-code BAS followed by its dependencies.
class AttackTree {
 public:
  enum class Kind { Bas, Or };

  struct Node {
    Kind kind;
    std::size_t instance;               ///< index into DependencySnapshot::nodes()
    std::vector<std::size_t> children;  ///< AttackTree node indices; empty for a BAS
  };

  static AttackTree from_snapshot(const DependencySnapshot& snapshot);

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t root() const noexcept { return root_; }
  const std::vector<LibraryInstance>& instances() const noexcept { return instances_; }
  /// BAS node of an instance.
  std::size_t bas_of(std::size_t instance) const { return bas_.at(instance); }
  /// OR gate of a non-leaf instance.
  std::optional<std::size_t> gate_of(std::size_t instance) const { return gate_.at(instance); }
  std::size_t bas_count() const noexcept { return instances_.size(); }
  std::size_t gate_count() const noexcept;
  std::size_t edge_count() const noexcept;

 private:
  std::vector<Node> nodes_;
  std::size_t root_ = 0;
  std::vector<LibraryInstance> instances_;
  std::vector<std::size_t> bas_;
  std::vector<std::optional<std::size_t>> gate_;
};

AttackTree to_attack_tree(const DependencySnapshot& snapshot);

/// Root probability under independent BAS and OR gates: 1 - prod(1 - p) over
/// the distinct BAS reachable from the root, so shared subtrees count once.
/// `bas_probability` is indexed by snapshot instance. Throws MissingEstimate for
/// an undecorated reachable BAS and DomainError for values outside [0, 1].
double propagate(const AttackTree& tree, std::span<const std::optional<double>> bas_probability);

}  // namespace tdtf
