#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "treeweave/ids.hpp"
#include "treeweave/rng.hpp"

namespace treeweave {

/// All nodes of one subtree, plus its root for convenience. Used by the
/// occupied-subtree decomposition.
struct SubtreeSet {
  VirtualNodeId root;
  std::vector<VirtualNodeId> members;  // sorted by id, includes root
};

/// Full binary tree of virtual overlay nodes. Every internal node has exactly
/// two children, so |leaves| = |internals| + 1 at all times. Each node carries
/// the leaf count of its subtree, which drives weighted leaf sampling and the
/// rotation-based rebalancing.
///
/// Single-threaded per instance; distinct instances are independent.
class VirtualTree {
 public:
  struct InsertedPair {
    VirtualNodeId new_leaf;
    VirtualNodeId new_internal;
  };
  struct RemovedPair {
    VirtualNodeId removed_leaf;
    VirtualNodeId removed_internal;
  };

  /// Builds a complete binary tree with num_leaves leaves (power of two, >= 2)
  /// and num_leaves - 1 internal nodes, all leaves at depth log2(num_leaves).
  static VirtualTree complete(std::uint32_t num_leaves);

  VirtualNodeId root() const { return root_; }
  bool contains(VirtualNodeId v) const;
  bool is_leaf(VirtualNodeId v) const;
  bool is_internal(VirtualNodeId v) const { return contains(v) && !is_leaf(v); }

  /// Parent of v; invalid id for the root.
  VirtualNodeId parent(VirtualNodeId v) const;
  VirtualNodeId left_child(VirtualNodeId v) const;
  VirtualNodeId right_child(VirtualNodeId v) const;
  VirtualNodeId sibling(VirtualNodeId v) const;

  /// Number of leaves in the subtree rooted at v (1 for a leaf).
  std::uint32_t subtree_leaf_count(VirtualNodeId v) const;

  std::size_t leaf_count() const { return leaf_count_; }
  std::size_t internal_count() const { return internal_count_; }
  std::size_t node_count() const { return leaf_count_ + internal_count_; }

  /// Ids are allocated in [0, id_bound); some may be dead after removals.
  std::uint32_t id_bound() const { return static_cast<std::uint32_t>(nodes_.size()); }

  std::size_t depth(VirtualNodeId v) const;
  /// Height of the subtree rooted at v (0 for a leaf).
  std::size_t height(VirtualNodeId v) const;
  std::size_t height() const { return height(root_); }

  /// Leaves left to right.
  std::vector<VirtualNodeId> leaves_in_order() const;
  /// Internal nodes in in-order position (the i-th internal separates leaf i
  /// from leaf i+1).
  std::vector<VirtualNodeId> internals_in_order() const;
  /// All live nodes sorted by id.
  std::vector<VirtualNodeId> nodes() const;

  /// Deepest leaf; ties broken toward the smallest id.
  VirtualNodeId deepest_leaf() const;

  /// Random leaf, uniform over all leaves of any tree shape: the descent from
  /// the root picks a child with probability proportional to its subtree leaf
  /// count. On complete trees this coincides with an unweighted coin.
  VirtualNodeId sample_leaf(Rng& rng) const;

  /// Grows the tree at a leaf: a new internal node takes at_leaf's position
  /// and adopts at_leaf (left) plus a fresh leaf (right) as children.
  InsertedPair insert_pair(VirtualNodeId at_leaf);

  /// Shrinks the tree: deletes the given leaf and its parent, promoting the
  /// sibling into the parent's position. Requires at least 3 leaves.
  RemovedPair remove_pair(VirtualNodeId leaf);

  /// Rotates the tree into the canonical balanced shape (left-packed splits
  /// driven by leaf counts). Afterwards leaf depths differ by at most 1 and
  /// the in-order leaf sequence is unchanged. Returns the rotation count;
  /// a tree already in canonical shape reports 0.
  std::size_t rebalance();

  /// Decomposes a set of leaves S into the maximal subtrees whose leaves all
  /// lie in S. Results are pairwise disjoint, ordered left to right. Singleton
  /// leaves of S appear as one-node subtrees. Empty S yields an empty list.
  std::vector<SubtreeSet> maximal_occupied_subtrees(
      std::span<const VirtualNodeId> occupied_leaves) const;

  /// Structural audit: full-binary shape, consistent leaf counts, parent and
  /// child links symmetric, |L| = |I| + 1. Throws DomainError on violation.
  void validate() const;

 private:
  struct Node {
    VirtualNodeId parent;
    VirtualNodeId left;
    VirtualNodeId right;
    std::uint32_t leaf_cnt = 0;
    bool alive = false;
    bool is_leaf() const { return !left.is_valid(); }
  };

  VirtualTree() = default;

  const Node& at(VirtualNodeId v) const;
  Node& at(VirtualNodeId v);
  VirtualNodeId allocate_leaf(VirtualNodeId parent);
  VirtualNodeId allocate_internal(VirtualNodeId parent);
  void require_node(VirtualNodeId v) const;

  /// Lifts x into its parent's position with a single rotation.
  void rotate_up(VirtualNodeId x);
  /// Internal node splitting the subtree's leaves after position m.
  VirtualNodeId boundary_internal(VirtualNodeId sub_root, std::uint32_t m) const;
  std::size_t balance_subtree(VirtualNodeId sub_root);

  std::vector<Node> nodes_;
  VirtualNodeId root_;
  std::size_t leaf_count_ = 0;
  std::size_t internal_count_ = 0;
};

}  // namespace treeweave
