#include "treeweave/pairing.hpp"

#include <algorithm>
#include <string>

#include "treeweave/errors.hpp"

namespace treeweave {

namespace {

std::vector<InternalSlot> canonical_slot_list(const VirtualTree& tree) {
  std::vector<InternalSlot> slots;
  slots.reserve(tree.leaf_count());
  for (const VirtualNodeId v : tree.internals_in_order()) {
    slots.push_back(InternalSlot::primary(v));
  }
  slots.push_back(InternalSlot::root_duplicate(tree.root()));
  return slots;
}

}  // namespace

Pairing Pairing::canonical(const VirtualTree& tree) {
  const std::vector<VirtualNodeId> leaves = tree.leaves_in_order();
  const std::vector<InternalSlot> slots = canonical_slot_list(tree);
  Pairing p;
  for (std::size_t i = 0; i < leaves.size(); ++i) p.insert(leaves[i], slots[i]);
  return p;
}

Pairing Pairing::uniform_random(const VirtualTree& tree, Rng& rng) {
  const std::vector<VirtualNodeId> leaves = tree.leaves_in_order();
  std::vector<InternalSlot> slots = canonical_slot_list(tree);
  for (std::size_t i = slots.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(slots[i - 1], slots[j]);
  }
  Pairing p;
  for (std::size_t i = 0; i < leaves.size(); ++i) p.insert(leaves[i], slots[i]);
  return p;
}

bool Pairing::contains_leaf(VirtualNodeId leaf) const {
  return slot_by_leaf_.find(leaf) != slot_by_leaf_.end();
}

InternalSlot Pairing::slot_of(VirtualNodeId leaf) const {
  const auto it = slot_by_leaf_.find(leaf);
  if (it == slot_by_leaf_.end()) {
    throw DomainError("leaf " + std::to_string(leaf.value()) + " is not in the pairing");
  }
  return it->second;
}

VirtualNodeId Pairing::leaf_of(InternalSlot slot) const {
  const auto it = leaf_by_slot_.find(slot_key(slot));
  if (it == leaf_by_slot_.end()) {
    throw DomainError("slot of node " + std::to_string(slot.node.value()) +
                      " is not in the pairing image");
  }
  return it->second;
}

std::vector<VirtualNodeId> Pairing::leaves() const {
  std::vector<VirtualNodeId> out;
  out.reserve(slot_by_leaf_.size());
  for (const auto& [leaf, slot] : slot_by_leaf_) out.push_back(leaf);
  std::sort(out.begin(), out.end());
  return out;
}

void Pairing::swap_slots(VirtualNodeId leaf_a, VirtualNodeId leaf_b) {
  const auto ita = slot_by_leaf_.find(leaf_a);
  const auto itb = slot_by_leaf_.find(leaf_b);
  if (ita == slot_by_leaf_.end() || itb == slot_by_leaf_.end()) {
    throw DomainError("swap requires both leaves to be in the pairing");
  }
  if (leaf_a == leaf_b) return;
  std::swap(ita->second, itb->second);
  leaf_by_slot_[slot_key(ita->second)] = leaf_a;
  leaf_by_slot_[slot_key(itb->second)] = leaf_b;
}

void Pairing::insert(VirtualNodeId leaf, InternalSlot slot) {
  if (contains_leaf(leaf)) {
    throw DomainError("leaf " + std::to_string(leaf.value()) + " already paired");
  }
  if (leaf_by_slot_.find(slot_key(slot)) != leaf_by_slot_.end()) {
    throw DomainError("slot of node " + std::to_string(slot.node.value()) +
                      " already taken");
  }
  slot_by_leaf_.emplace(leaf, slot);
  leaf_by_slot_.emplace(slot_key(slot), leaf);
}

void Pairing::erase_leaf(VirtualNodeId leaf) {
  const auto it = slot_by_leaf_.find(leaf);
  if (it == slot_by_leaf_.end()) {
    throw DomainError("cannot erase unpaired leaf " + std::to_string(leaf.value()));
  }
  leaf_by_slot_.erase(slot_key(it->second));
  slot_by_leaf_.erase(it);
}

void Pairing::rebind_root_duplicate(VirtualNodeId new_root) {
  VirtualNodeId holder;
  InternalSlot old_slot;
  bool found = false;
  for (const auto& [leaf, slot] : slot_by_leaf_) {
    if (slot.copy == SlotCopy::kRootDuplicate) {
      holder = leaf;
      old_slot = slot;
      found = true;
      break;
    }
  }
  if (!found) throw DomainError("pairing has no root-duplicate slot");
  if (old_slot.node == new_root) return;
  const InternalSlot fresh = InternalSlot::root_duplicate(new_root);
  if (leaf_by_slot_.find(slot_key(fresh)) != leaf_by_slot_.end()) {
    throw DomainError("root-duplicate slot of the new root already taken");
  }
  leaf_by_slot_.erase(slot_key(old_slot));
  slot_by_leaf_[holder] = fresh;
  leaf_by_slot_.emplace(slot_key(fresh), holder);
}

void Pairing::validate_for(const VirtualTree& tree) const {
  const std::vector<VirtualNodeId> leaves = tree.leaves_in_order();
  if (slot_by_leaf_.size() != leaves.size() || leaf_by_slot_.size() != leaves.size()) {
    throw DomainError("pairing audit: domain size mismatch");
  }
  std::size_t duplicates = 0;
  for (const VirtualNodeId leaf : leaves) {
    const auto it = slot_by_leaf_.find(leaf);
    if (it == slot_by_leaf_.end()) {
      throw DomainError("pairing audit: leaf missing from domain");
    }
    const InternalSlot slot = it->second;
    if (!tree.is_internal(slot.node)) {
      throw DomainError("pairing audit: slot node is not a live internal");
    }
    if (slot.copy == SlotCopy::kRootDuplicate) {
      if (slot.node != tree.root()) {
        throw DomainError("pairing audit: duplicate slot not at the root");
      }
      ++duplicates;
    }
    const auto back = leaf_by_slot_.find(slot_key(slot));
    if (back == leaf_by_slot_.end() || back->second != leaf) {
      throw DomainError("pairing audit: inverse map inconsistent");
    }
  }
  if (duplicates != 1) {
    throw DomainError("pairing audit: expected exactly one root-duplicate slot");
  }
  // Injectivity over the slot keys plus matching sizes makes the image all
  // n-1 primaries plus the duplicate.
}

Graph contract(const VirtualTree& tree, const Pairing& pairing) {
  pairing.validate_for(tree);

  const std::vector<VirtualNodeId> leaves = tree.leaves_in_order();
  const std::size_t n = leaves.size();
  std::vector<std::uint32_t> pid_of_leaf(tree.id_bound(), 0);
  for (std::size_t i = 0; i < n; ++i) pid_of_leaf[leaves[i].value()] = static_cast<std::uint32_t>(i);

  // Owner of a virtual node in the contracted graph. Every internal node,
  // the root included, is represented by its Primary slot holder; the
  // duplicate root slot carries no adjacency of its own.
  const auto owner_of = [&](VirtualNodeId v) -> std::uint32_t {
    if (tree.is_leaf(v)) return pid_of_leaf[v.value()];
    return pid_of_leaf[pairing.leaf_of(InternalSlot::primary(v)).value()];
  };

  std::vector<std::uint32_t> vertices(n);
  for (std::size_t i = 0; i < n; ++i) vertices[i] = static_cast<std::uint32_t>(i);

  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(2 * n);
  for (const VirtualNodeId v : tree.nodes()) {
    const VirtualNodeId p = tree.parent(v);
    if (!p.is_valid()) continue;
    const std::uint32_t a = owner_of(v);
    const std::uint32_t b = owner_of(p);
    if (a != b) edges.emplace_back(a, b);
  }
  return Graph(std::move(vertices), edges);
}

}  // namespace treeweave
