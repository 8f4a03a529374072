#include "treeweave/vtree.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "treeweave/errors.hpp"

namespace treeweave {

namespace {

std::uint32_t ceil_log2(std::uint32_t n) {
  std::uint32_t h = 0;
  while ((1u << h) < n) ++h;
  return h;
}

/// Canonical balanced split: the left subtree takes the largest power-of-two
/// block that still leaves the right side at least a quarter-full, so both
/// sides stay within one level of each other.
std::uint32_t target_left_split(std::uint32_t n) {
  if (n == 2) return 1;
  const std::uint32_t h = ceil_log2(n);
  return std::min(1u << (h - 1), n - (1u << (h - 2)));
}

}  // namespace

const VirtualTree::Node& VirtualTree::at(VirtualNodeId v) const {
  return nodes_[v.value()];
}

VirtualTree::Node& VirtualTree::at(VirtualNodeId v) { return nodes_[v.value()]; }

void VirtualTree::require_node(VirtualNodeId v) const {
  if (!contains(v)) {
    throw DomainError("unknown virtual node id " +
                      (v.is_valid() ? std::to_string(v.value()) : "<invalid>"));
  }
}

bool VirtualTree::contains(VirtualNodeId v) const {
  return v.is_valid() && v.value() < nodes_.size() && nodes_[v.value()].alive;
}

bool VirtualTree::is_leaf(VirtualNodeId v) const {
  require_node(v);
  return at(v).is_leaf();
}

VirtualNodeId VirtualTree::parent(VirtualNodeId v) const {
  require_node(v);
  return at(v).parent;
}

VirtualNodeId VirtualTree::left_child(VirtualNodeId v) const {
  require_node(v);
  return at(v).left;
}

VirtualNodeId VirtualTree::right_child(VirtualNodeId v) const {
  require_node(v);
  return at(v).right;
}

VirtualNodeId VirtualTree::sibling(VirtualNodeId v) const {
  require_node(v);
  const VirtualNodeId p = at(v).parent;
  if (!p.is_valid()) return VirtualNodeId();
  return at(p).left == v ? at(p).right : at(p).left;
}

std::uint32_t VirtualTree::subtree_leaf_count(VirtualNodeId v) const {
  require_node(v);
  return at(v).leaf_cnt;
}

VirtualNodeId VirtualTree::allocate_leaf(VirtualNodeId parent) {
  Node n;
  n.parent = parent;
  n.leaf_cnt = 1;
  n.alive = true;
  nodes_.push_back(n);
  ++leaf_count_;
  return VirtualNodeId(static_cast<std::uint32_t>(nodes_.size() - 1));
}

VirtualNodeId VirtualTree::allocate_internal(VirtualNodeId parent) {
  Node n;
  n.parent = parent;
  n.alive = true;
  nodes_.push_back(n);
  ++internal_count_;
  return VirtualNodeId(static_cast<std::uint32_t>(nodes_.size() - 1));
}

VirtualTree VirtualTree::complete(std::uint32_t num_leaves) {
  if (num_leaves < 2 || !std::has_single_bit(num_leaves)) {
    throw DomainError("complete tree requires a power-of-two leaf count >= 2, got " +
                      std::to_string(num_leaves));
  }
  VirtualTree t;
  // Heap layout: node i has children 2i+1 and 2i+2; leaves occupy the last
  // num_leaves slots left to right.
  const std::uint32_t total = 2 * num_leaves - 1;
  t.nodes_.resize(total);
  for (std::uint32_t i = 0; i < total; ++i) {
    Node& n = t.nodes_[i];
    n.alive = true;
    n.parent = i == 0 ? VirtualNodeId() : VirtualNodeId((i - 1) / 2);
    if (2 * i + 2 < total) {
      n.left = VirtualNodeId(2 * i + 1);
      n.right = VirtualNodeId(2 * i + 2);
    }
  }
  for (std::uint32_t i = total; i-- > 0;) {
    Node& n = t.nodes_[i];
    n.leaf_cnt = n.is_leaf()
                     ? 1
                     : t.nodes_[n.left.value()].leaf_cnt + t.nodes_[n.right.value()].leaf_cnt;
  }
  t.root_ = VirtualNodeId(0);
  t.leaf_count_ = num_leaves;
  t.internal_count_ = num_leaves - 1;
  return t;
}

std::size_t VirtualTree::depth(VirtualNodeId v) const {
  require_node(v);
  std::size_t d = 0;
  for (VirtualNodeId p = at(v).parent; p.is_valid(); p = at(p).parent) ++d;
  return d;
}

std::size_t VirtualTree::height(VirtualNodeId v) const {
  require_node(v);
  if (at(v).is_leaf()) return 0;
  // Iterative post-order over the subtree.
  std::size_t best = 0;
  std::vector<std::pair<VirtualNodeId, std::size_t>> stack{{v, 0}};
  while (!stack.empty()) {
    auto [x, d] = stack.back();
    stack.pop_back();
    const Node& n = at(x);
    if (n.is_leaf()) {
      best = std::max(best, d);
    } else {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return best;
}

std::vector<VirtualNodeId> VirtualTree::leaves_in_order() const {
  std::vector<VirtualNodeId> out;
  out.reserve(leaf_count_);
  std::vector<VirtualNodeId> stack{root_};
  while (!stack.empty()) {
    const VirtualNodeId x = stack.back();
    stack.pop_back();
    const Node& n = at(x);
    if (n.is_leaf()) {
      out.push_back(x);
    } else {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return out;
}

std::vector<VirtualNodeId> VirtualTree::internals_in_order() const {
  std::vector<VirtualNodeId> out;
  out.reserve(internal_count_);
  // In-order without recursion: (node, expanded) pairs.
  std::vector<std::pair<VirtualNodeId, bool>> stack{{root_, false}};
  while (!stack.empty()) {
    auto [x, expanded] = stack.back();
    stack.pop_back();
    const Node& n = at(x);
    if (n.is_leaf()) continue;
    if (expanded) {
      out.push_back(x);
    } else {
      stack.emplace_back(n.right, false);
      stack.emplace_back(x, true);
      stack.emplace_back(n.left, false);
    }
  }
  return out;
}

std::vector<VirtualNodeId> VirtualTree::nodes() const {
  std::vector<VirtualNodeId> out;
  out.reserve(node_count());
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].alive) out.push_back(VirtualNodeId(i));
  }
  return out;
}

VirtualNodeId VirtualTree::deepest_leaf() const {
  VirtualNodeId best;
  std::size_t best_depth = 0;
  std::vector<std::pair<VirtualNodeId, std::size_t>> stack{{root_, 0}};
  while (!stack.empty()) {
    auto [x, d] = stack.back();
    stack.pop_back();
    const Node& n = at(x);
    if (n.is_leaf()) {
      if (!best.is_valid() || d > best_depth || (d == best_depth && x < best)) {
        best = x;
        best_depth = d;
      }
    } else {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return best;
}

VirtualNodeId VirtualTree::sample_leaf(Rng& rng) const {
  VirtualNodeId x = root_;
  while (!at(x).is_leaf()) {
    const Node& n = at(x);
    const std::uint32_t left_cnt = at(n.left).leaf_cnt;
    const std::uint64_t r = uniform_below(rng, n.leaf_cnt);
    x = r < left_cnt ? n.left : n.right;
  }
  return x;
}

VirtualTree::InsertedPair VirtualTree::insert_pair(VirtualNodeId at_leaf) {
  require_node(at_leaf);
  if (!at(at_leaf).is_leaf()) {
    throw DomainError("insert_pair target must be a leaf");
  }
  const VirtualNodeId old_parent = at(at_leaf).parent;
  const VirtualNodeId vprime = allocate_internal(old_parent);
  const VirtualNodeId vnew = allocate_leaf(vprime);

  Node& np = at(vprime);
  np.left = at_leaf;
  np.right = vnew;
  np.leaf_cnt = 2;
  at(at_leaf).parent = vprime;

  if (old_parent.is_valid()) {
    Node& op = at(old_parent);
    (op.left == at_leaf ? op.left : op.right) = vprime;
    for (VirtualNodeId a = old_parent; a.is_valid(); a = at(a).parent) ++at(a).leaf_cnt;
  } else {
    root_ = vprime;
  }
  return {vnew, vprime};
}

VirtualTree::RemovedPair VirtualTree::remove_pair(VirtualNodeId leaf) {
  require_node(leaf);
  if (!at(leaf).is_leaf()) {
    throw DomainError("remove_pair target must be a leaf");
  }
  if (leaf_count_ <= 2) {
    throw DomainError("cannot shrink a tree with 2 or fewer leaves");
  }
  const VirtualNodeId p = at(leaf).parent;
  const VirtualNodeId sib = sibling(leaf);
  const VirtualNodeId g = at(p).parent;

  at(sib).parent = g;
  if (g.is_valid()) {
    Node& gn = at(g);
    (gn.left == p ? gn.left : gn.right) = sib;
    for (VirtualNodeId a = g; a.is_valid(); a = at(a).parent) --at(a).leaf_cnt;
  } else {
    root_ = sib;
  }

  at(leaf).alive = false;
  at(p).alive = false;
  --leaf_count_;
  --internal_count_;
  return {leaf, p};
}

void VirtualTree::rotate_up(VirtualNodeId x) {
  const VirtualNodeId p = at(x).parent;
  const VirtualNodeId g = at(p).parent;
  Node& xn = at(x);
  Node& pn = at(p);

  if (pn.left == x) {
    // Right rotation at p:  p=(x=(a,b), c)  ->  x=(a, p=(b,c))
    const VirtualNodeId b = xn.right;
    pn.left = b;
    at(b).parent = p;
    xn.right = p;
  } else {
    // Left rotation at p:  p=(a, x=(b,c))  ->  x=(p=(a,b), c)
    const VirtualNodeId b = xn.left;
    pn.right = b;
    at(b).parent = p;
    xn.left = p;
  }
  pn.parent = x;
  xn.parent = g;
  if (g.is_valid()) {
    Node& gn = at(g);
    (gn.left == p ? gn.left : gn.right) = x;
  } else {
    root_ = x;
  }
  pn.leaf_cnt = at(pn.left).leaf_cnt + at(pn.right).leaf_cnt;
  xn.leaf_cnt = at(xn.left).leaf_cnt + at(xn.right).leaf_cnt;
}

VirtualNodeId VirtualTree::boundary_internal(VirtualNodeId sub_root, std::uint32_t m) const {
  VirtualNodeId x = sub_root;
  for (;;) {
    const Node& n = at(x);
    const std::uint32_t left_cnt = at(n.left).leaf_cnt;
    if (m == left_cnt) return x;
    if (m < left_cnt) {
      x = n.left;
    } else {
      m -= left_cnt;
      x = n.right;
    }
  }
}

std::size_t VirtualTree::balance_subtree(VirtualNodeId sub_root) {
  const std::uint32_t n = at(sub_root).leaf_cnt;
  if (n <= 2) return 0;

  std::size_t rotations = 0;
  const VirtualNodeId parent_anchor = at(sub_root).parent;
  VirtualNodeId b = boundary_internal(sub_root, target_left_split(n));
  while (at(b).parent != parent_anchor) {
    rotate_up(b);
    ++rotations;
  }
  rotations += balance_subtree(at(b).left);
  rotations += balance_subtree(at(b).right);
  return rotations;
}

std::size_t VirtualTree::rebalance() { return balance_subtree(root_); }

std::vector<SubtreeSet> VirtualTree::maximal_occupied_subtrees(
    std::span<const VirtualNodeId> occupied_leaves) const {
  std::vector<char> in_s(nodes_.size(), 0);
  for (const VirtualNodeId l : occupied_leaves) {
    require_node(l);
    if (!at(l).is_leaf()) {
      throw DomainError("occupied set must contain only leaves");
    }
    in_s[l.value()] = 1;
  }
  if (occupied_leaves.empty()) return {};

  // occ(v): every leaf under v belongs to S. Computed by a post-order sweep.
  std::vector<char> occ(nodes_.size(), 0);
  std::vector<std::pair<VirtualNodeId, bool>> stack{{root_, false}};
  while (!stack.empty()) {
    auto [x, expanded] = stack.back();
    stack.pop_back();
    const Node& n = at(x);
    if (n.is_leaf()) {
      occ[x.value()] = in_s[x.value()];
    } else if (expanded) {
      occ[x.value()] = occ[n.left.value()] && occ[n.right.value()];
    } else {
      stack.emplace_back(x, true);
      stack.emplace_back(n.left, false);
      stack.emplace_back(n.right, false);
    }
  }

  std::vector<SubtreeSet> out;
  // Left-to-right scan for maximal occupied roots, then collect members.
  std::vector<VirtualNodeId> scan{root_};
  std::vector<VirtualNodeId> roots;
  while (!scan.empty()) {
    const VirtualNodeId x = scan.back();
    scan.pop_back();
    if (occ[x.value()]) {
      roots.push_back(x);
      continue;
    }
    const Node& n = at(x);
    if (!n.is_leaf()) {
      scan.push_back(n.right);
      scan.push_back(n.left);
    }
  }
  for (const VirtualNodeId r : roots) {
    SubtreeSet s;
    s.root = r;
    std::vector<VirtualNodeId> walk{r};
    while (!walk.empty()) {
      const VirtualNodeId x = walk.back();
      walk.pop_back();
      s.members.push_back(x);
      const Node& n = at(x);
      if (!n.is_leaf()) {
        walk.push_back(n.left);
        walk.push_back(n.right);
      }
    }
    std::sort(s.members.begin(), s.members.end());
    out.push_back(std::move(s));
  }
  return out;
}

void VirtualTree::validate() const {
  if (!contains(root_)) throw DomainError("audit: root is not alive");
  if (at(root_).parent.is_valid()) throw DomainError("audit: root has a parent");

  std::size_t leaves = 0;
  std::size_t internals = 0;
  std::vector<VirtualNodeId> stack{root_};
  std::vector<char> seen(nodes_.size(), 0);
  while (!stack.empty()) {
    const VirtualNodeId x = stack.back();
    stack.pop_back();
    if (!contains(x)) throw DomainError("audit: dead node reachable");
    if (seen[x.value()]) throw DomainError("audit: node reachable twice");
    seen[x.value()] = 1;
    const Node& n = at(x);
    if (n.left.is_valid() != n.right.is_valid()) {
      throw DomainError("audit: node with exactly one child");
    }
    if (n.is_leaf()) {
      ++leaves;
      if (n.leaf_cnt != 1) throw DomainError("audit: leaf with leaf_cnt != 1");
    } else {
      ++internals;
      if (at(n.left).parent != x || at(n.right).parent != x) {
        throw DomainError("audit: child parent link broken");
      }
      if (n.leaf_cnt != at(n.left).leaf_cnt + at(n.right).leaf_cnt) {
        throw DomainError("audit: leaf_cnt inconsistent");
      }
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
  }
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].alive && !seen[i]) throw DomainError("audit: live node unreachable");
  }
  if (leaves != leaf_count_ || internals != internal_count_) {
    throw DomainError("audit: node counters out of sync");
  }
  if (leaves != internals + 1) {
    throw DomainError("audit: |L| != |I| + 1");
  }
}

}  // namespace treeweave
