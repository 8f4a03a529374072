#include "treeweave/boundary_sweeps.hpp"

#include <algorithm>
#include <bit>
#include <vector>

#include "treeweave/errors.hpp"
#include "treeweave/graph.hpp"
#include "treeweave/pairing.hpp"
#include "treeweave/vtree.hpp"

namespace treeweave {

namespace {

struct TreeContext {
  VirtualTree tree;
  Graph graph;  // the tree itself as a graph
  std::vector<VirtualNodeId> internals;
  std::vector<VirtualNodeId> leaves;

  explicit TreeContext(std::uint32_t num_leaves)
      : tree(VirtualTree::complete(num_leaves)),
        graph(tree_as_graph(tree)),
        internals(tree.internals_in_order()),
        leaves(tree.leaves_in_order()) {}
};

std::vector<std::uint32_t> ids_of(const std::vector<VirtualNodeId>& nodes,
                                  std::uint32_t mask) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (mask & (1u << i)) out.push_back(nodes[i].value());
  }
  return out;
}

/// Connected components of the subgraph induced on the masked nodes,
/// adjacency = tree edges.
std::size_t induced_component_count(const TreeContext& ctx, std::uint32_t mask) {
  const std::size_t k = ctx.internals.size();
  std::vector<char> in_set(ctx.tree.id_bound(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    if (mask & (1u << i)) in_set[ctx.internals[i].value()] = 1;
  }
  std::vector<char> seen(ctx.tree.id_bound(), 0);
  std::size_t comps = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(mask & (1u << i))) continue;
    const VirtualNodeId start = ctx.internals[i];
    if (seen[start.value()]) continue;
    ++comps;
    std::vector<VirtualNodeId> stack{start};
    seen[start.value()] = 1;
    while (!stack.empty()) {
      const VirtualNodeId v = stack.back();
      stack.pop_back();
      VirtualNodeId nbrs[3] = {ctx.tree.parent(v), VirtualNodeId(), VirtualNodeId()};
      if (!ctx.tree.is_leaf(v)) {
        nbrs[1] = ctx.tree.left_child(v);
        nbrs[2] = ctx.tree.right_child(v);
      }
      for (const VirtualNodeId nb : nbrs) {
        if (nb.is_valid() && in_set[nb.value()] && !seen[nb.value()]) {
          seen[nb.value()] = 1;
          stack.push_back(nb);
        }
      }
    }
  }
  return comps;
}

}  // namespace

SweepResult sweep_connected_internal_boundary(std::uint32_t leaves) {
  const TreeContext ctx(leaves);
  const std::size_t k = ctx.internals.size();
  const VirtualNodeId root = ctx.tree.root();

  SweepResult res;
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    if (induced_component_count(ctx, mask) != 1) continue;
    const std::vector<std::uint32_t> s = ids_of(ctx.internals, mask);
    const std::size_t boundary = ctx.graph.node_boundary(s).size();
    const bool has_root =
        std::find(s.begin(), s.end(), root.value()) != s.end();
    const std::size_t required = s.size() + (has_root ? 1 : 2);
    ++res.cases_checked;
    if (boundary < required) ++res.violations;
  }
  return res;
}

SweepResult sweep_general_internal_boundary(std::uint32_t leaves) {
  const TreeContext ctx(leaves);
  const VirtualNodeId root = ctx.tree.root();
  std::vector<VirtualNodeId> non_root;
  for (const VirtualNodeId v : ctx.internals) {
    if (v != root) non_root.push_back(v);
  }
  const std::size_t k = non_root.size();

  // Reuse the component counter through a context whose internal list is the
  // non-root subset.
  TreeContext masked = ctx;
  masked.internals = non_root;

  SweepResult res;
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    const std::size_t m = induced_component_count(masked, mask);
    const std::vector<std::uint32_t> s = ids_of(non_root, mask);
    const std::size_t boundary = ctx.graph.node_boundary(s).size();
    ++res.cases_checked;
    if (boundary < s.size() + m + 1) ++res.violations;
  }
  return res;
}

SweepResult sweep_subtree_internal_boundary(std::uint32_t leaves) {
  const TreeContext ctx(leaves);

  SweepResult res;
  for (const VirtualNodeId x : ctx.internals) {
    // Nodes and internal nodes of the subtree rooted at x.
    std::vector<VirtualNodeId> subtree_internals;
    std::vector<char> in_subtree(ctx.tree.id_bound(), 0);
    std::vector<VirtualNodeId> stack{x};
    while (!stack.empty()) {
      const VirtualNodeId v = stack.back();
      stack.pop_back();
      in_subtree[v.value()] = 1;
      if (!ctx.tree.is_leaf(v)) {
        subtree_internals.push_back(v);
        stack.push_back(ctx.tree.left_child(v));
        stack.push_back(ctx.tree.right_child(v));
      }
    }
    const std::size_t k = subtree_internals.size();
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
      const std::vector<std::uint32_t> s = ids_of(subtree_internals, mask);
      std::size_t boundary_in_x = 0;
      for (const std::uint32_t b : ctx.graph.node_boundary(s)) {
        if (in_subtree[b]) ++boundary_in_x;
      }
      ++res.cases_checked;
      if (boundary_in_x < s.size() + 1) ++res.violations;
    }
  }
  return res;
}

namespace {

/// Bit-index bookkeeping for the exhaustive halving sweep: node ids mapped
/// onto bits of one 32-bit word (trees up to 16 leaves = 31 nodes).
struct MaskedTree {
  const TreeContext& ctx;
  std::vector<int> bit_of_id;           // node id -> bit
  std::vector<std::uint32_t> adj_mask;  // per bit
  std::vector<int> leaf_bits;           // per leaf position
  std::vector<int> slot_node_bits;      // per canonical slot position
  std::vector<InternalSlot> slots;

  explicit MaskedTree(const TreeContext& context) : ctx(context) {
    const std::vector<VirtualNodeId> nodes = ctx.tree.nodes();
    bit_of_id.assign(ctx.tree.id_bound(), -1);
    for (std::size_t i = 0; i < nodes.size(); ++i) bit_of_id[nodes[i].value()] = static_cast<int>(i);
    adj_mask.assign(nodes.size(), 0);
    for (const VirtualNodeId v : nodes) {
      const VirtualNodeId p = ctx.tree.parent(v);
      if (!p.is_valid()) continue;
      adj_mask[bit_of_id[v.value()]] |= 1u << bit_of_id[p.value()];
      adj_mask[bit_of_id[p.value()]] |= 1u << bit_of_id[v.value()];
    }
    for (const VirtualNodeId l : ctx.leaves) leaf_bits.push_back(bit_of_id[l.value()]);
    for (const VirtualNodeId v : ctx.internals) slots.push_back(InternalSlot::primary(v));
    slots.push_back(InternalSlot::root_duplicate(ctx.tree.root()));
    for (const InternalSlot s : slots) slot_node_bits.push_back(bit_of_id[s.node.value()]);
  }

  std::uint32_t boundary_mask(std::uint32_t q) const {
    std::uint32_t covered = 0;
    std::uint32_t rest = q;
    while (rest != 0) {
      covered |= adj_mask[std::countr_zero(rest)];
      rest &= rest - 1;
    }
    return covered & ~q;
  }
};

/// One halving check through the public APIs, used to cross-check the masked
/// fast path and to drive the randomized sweep.
bool halving_holds_via_api(const VirtualTree& tree, const Graph& tree_graph,
                           const std::vector<VirtualNodeId>& s_leaves,
                           const Pairing& pairing, std::size_t* cases = nullptr) {
  std::vector<std::uint32_t> q_ids;
  std::vector<char> in_q(tree.id_bound(), 0);
  for (const VirtualNodeId l : s_leaves) {
    if (!in_q[l.value()]) {
      in_q[l.value()] = 1;
      q_ids.push_back(l.value());
    }
    const VirtualNodeId image = pairing.slot_of(l).node;
    if (!in_q[image.value()]) {
      in_q[image.value()] = 1;
      q_ids.push_back(image.value());
    }
  }
  std::vector<char> in_boundary(tree.id_bound(), 0);
  for (const std::uint32_t b : tree_graph.node_boundary(q_ids)) in_boundary[b] = 1;

  bool ok = true;
  for (const SubtreeSet& x : tree.maximal_occupied_subtrees(s_leaves)) {
    std::size_t boundary_in_x = 0;
    std::size_t hole_in_x = 0;
    for (const VirtualNodeId v : x.members) {
      if (in_boundary[v.value()]) ++boundary_in_x;
      if (!in_q[v.value()]) ++hole_in_x;
    }
    if (cases) ++*cases;
    if (2 * boundary_in_x < hole_in_x) ok = false;
  }
  return ok;
}

}  // namespace

SweepResult sweep_occupied_halving_exhaustive(std::uint32_t leaves) {
  if (leaves > 8) {
    throw CapacityError("exhaustive halving sweep is capped at 8 leaves");
  }
  const TreeContext ctx(leaves);
  const MaskedTree mt(ctx);
  const std::size_t n = ctx.leaves.size();

  SweepResult res;
  std::size_t combo = 0;
  for (std::uint32_t s_mask = 1; s_mask < (1u << n); ++s_mask) {
    std::vector<VirtualNodeId> s_leaves;
    std::uint32_t s_node_mask = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (s_mask & (1u << i)) {
        s_leaves.push_back(ctx.leaves[i]);
        s_node_mask |= 1u << mt.leaf_bits[i];
      }
    }
    // The decomposition depends only on S, not on the pairing.
    std::vector<std::uint32_t> x_masks;
    for (const SubtreeSet& x : ctx.tree.maximal_occupied_subtrees(s_leaves)) {
      std::uint32_t m = 0;
      for (const VirtualNodeId v : x.members) m |= 1u << mt.bit_of_id[v.value()];
      x_masks.push_back(m);
    }

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    do {
      std::uint32_t q = s_node_mask;
      for (std::size_t i = 0; i < n; ++i) {
        if (s_mask & (1u << i)) q |= 1u << mt.slot_node_bits[perm[i]];
      }
      const std::uint32_t boundary = mt.boundary_mask(q);
      bool ok = true;
      for (const std::uint32_t xm : x_masks) {
        ++res.cases_checked;
        const int b_in_x = std::popcount(boundary & xm);
        const int hole_in_x = std::popcount(~q & xm);
        if (2 * b_in_x < hole_in_x) {
          ok = false;
          ++res.violations;
        }
      }
      if ((combo++ & 0x1FFF) == 0) {
        Pairing p;
        for (std::size_t i = 0; i < n; ++i) p.insert(ctx.leaves[i], mt.slots[perm[i]]);
        if (halving_holds_via_api(ctx.tree, ctx.graph, s_leaves, p) != ok) {
          throw DomainError("halving sweep: masked fast path disagrees with the API");
        }
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return res;
}

SweepResult sweep_occupied_halving_random(std::uint32_t min_leaves, std::uint32_t max_leaves,
                                          std::size_t samples, Rng& rng) {
  std::vector<std::uint32_t> sizes;
  for (std::uint32_t n = min_leaves; n <= max_leaves; n *= 2) sizes.push_back(n);
  if (sizes.empty()) {
    throw DomainError("halving sweep needs a nonempty size range");
  }
  std::vector<TreeContext> contexts;
  contexts.reserve(sizes.size());
  for (const std::uint32_t n : sizes) contexts.emplace_back(n);

  SweepResult res;
  for (std::size_t it = 0; it < samples; ++it) {
    const TreeContext& ctx = contexts[uniform_below(rng, contexts.size())];
    std::vector<VirtualNodeId> s_leaves;
    while (s_leaves.empty()) {
      for (const VirtualNodeId l : ctx.leaves) {
        if (coin_flip(rng)) s_leaves.push_back(l);
      }
    }
    const Pairing p = Pairing::uniform_random(ctx.tree, rng);
    if (!halving_holds_via_api(ctx.tree, ctx.graph, s_leaves, p, &res.cases_checked)) {
      ++res.violations;
    }
  }
  return res;
}

}  // namespace treeweave
