#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>

namespace treeweave {

/// Identifier of a node in the virtual tree overlay. Ids are allocated
/// sequentially by a VirtualTree, are never reused within one tree, and are
/// stable across structural mutations (rotation, splice).
class VirtualNodeId {
 public:
  static constexpr std::uint32_t kInvalid = std::numeric_limits<std::uint32_t>::max();

  constexpr VirtualNodeId() = default;
  constexpr explicit VirtualNodeId(std::uint32_t value) : value_(value) {}

  constexpr std::uint32_t value() const { return value_; }
  constexpr bool is_valid() const { return value_ != kInvalid; }

  friend constexpr auto operator<=>(VirtualNodeId, VirtualNodeId) = default;

 private:
  std::uint32_t value_ = kInvalid;
};

/// Identifier of a physical node (one leaf plus one internal slot).
class PhysicalNodeId {
 public:
  static constexpr std::uint32_t kInvalid = std::numeric_limits<std::uint32_t>::max();

  constexpr PhysicalNodeId() = default;
  constexpr explicit PhysicalNodeId(std::uint32_t value) : value_(value) {}

  constexpr std::uint32_t value() const { return value_; }
  constexpr bool is_valid() const { return value_ != kInvalid; }

  friend constexpr auto operator<=>(PhysicalNodeId, PhysicalNodeId) = default;

 private:
  std::uint32_t value_ = kInvalid;
};

}  // namespace treeweave

template <>
struct std::hash<treeweave::VirtualNodeId> {
  std::size_t operator()(treeweave::VirtualNodeId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value());
  }
};

template <>
struct std::hash<treeweave::PhysicalNodeId> {
  std::size_t operator()(treeweave::PhysicalNodeId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value());
  }
};
