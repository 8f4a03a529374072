#pragma once

#include <compare>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "treeweave/graph.hpp"
#include "treeweave/ids.hpp"
#include "treeweave/rng.hpp"
#include "treeweave/vtree.hpp"

namespace treeweave {

/// The tree root is served by two interchangeable slots so that leaves and
/// internal slots are equinumerous; every other internal node has a single
/// Primary slot.
enum class SlotCopy : std::uint8_t { kPrimary = 0, kRootDuplicate = 1 };

struct InternalSlot {
  VirtualNodeId node;
  SlotCopy copy = SlotCopy::kPrimary;

  static InternalSlot primary(VirtualNodeId v) { return {v, SlotCopy::kPrimary}; }
  static InternalSlot root_duplicate(VirtualNodeId v) {
    return {v, SlotCopy::kRootDuplicate};
  }

  friend constexpr auto operator<=>(const InternalSlot&, const InternalSlot&) = default;
};

/// Bijection from leaves to internal slots (all internals' Primary slots plus
/// one RootDuplicate of the current root). This is the leaf-to-internal
/// matching whose contraction defines the physical graph.
class Pairing {
 public:
  Pairing() = default;

  /// Deterministic maximally biased pairing: the leaf at in-order position i
  /// maps to the internal at in-order position i; the root-duplicate slot
  /// takes the final position. Worst-case start for the mixing protocol.
  static Pairing canonical(const VirtualTree& tree);

  /// Uniform over all labeled bijections (Fisher-Yates over the slot list,
  /// slots in canonical order, shuffled from the back). The two root slots
  /// are distinguishable labels, so each distinct matching is hit by exactly
  /// two labelings.
  static Pairing uniform_random(const VirtualTree& tree, Rng& rng);

  std::size_t size() const { return slot_by_leaf_.size(); }
  bool contains_leaf(VirtualNodeId leaf) const;

  /// Image of a leaf; throws DomainError for leaves outside the domain.
  InternalSlot slot_of(VirtualNodeId leaf) const;
  /// Preimage of a slot; throws DomainError for slots outside the image.
  VirtualNodeId leaf_of(InternalSlot slot) const;

  /// Domain sorted by leaf id.
  std::vector<VirtualNodeId> leaves() const;

  /// Exchanges the images of two leaves. Swapping a leaf with itself is a
  /// no-op; unknown leaves raise DomainError.
  void swap_slots(VirtualNodeId leaf_a, VirtualNodeId leaf_b);

  /// Extends the bijection after a tree insertion.
  void insert(VirtualNodeId leaf, InternalSlot slot);
  /// Drops a leaf from the domain.
  void erase_leaf(VirtualNodeId leaf);

  /// Repoints the RootDuplicate slot at the current root after rotations
  /// changed which node is the root; its holder keeps holding it.
  void rebind_root_duplicate(VirtualNodeId new_root);

  /// Full bijection audit against a tree: domain = leaves, image = every
  /// internal's Primary slot plus exactly one RootDuplicate of the root.
  /// Throws DomainError on violation.
  void validate_for(const VirtualTree& tree) const;

  friend bool operator==(const Pairing& a, const Pairing& b) {
    return a.slot_by_leaf_ == b.slot_by_leaf_;
  }

 private:
  static std::uint64_t slot_key(InternalSlot s) {
    return (static_cast<std::uint64_t>(s.node.value()) << 1) |
           static_cast<std::uint64_t>(s.copy);
  }

  std::unordered_map<VirtualNodeId, InternalSlot> slot_by_leaf_;
  std::unordered_map<std::uint64_t, VirtualNodeId> leaf_by_slot_;
};

/// Contracts each (leaf, paired internal) couple into one physical vertex and
/// keeps the surviving tree adjacencies: physical vertices are numbered by
/// leaf in-order rank, an edge joins two vertices whenever some virtual node
/// of one is a tree neighbor of a virtual node of the other. The root's
/// adjacencies belong to the Primary slot holder; the RootDuplicate slot is
/// bookkeeping only, so its holder is joined through its leaf alone. Self-
/// loops vanish and parallel edges collapse. The result is simple, connected
/// for every valid pairing (it contracts a connected tree), and has maximum
/// degree 4 (leaf parent + internal parent + two internal children).
Graph contract(const VirtualTree& tree, const Pairing& pairing);

}  // namespace treeweave
