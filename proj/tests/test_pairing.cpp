#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "support/stats.hpp"
#include "treeweave/errors.hpp"
#include "treeweave/graph.hpp"
#include "treeweave/pairing.hpp"
#include "treeweave/rng.hpp"
#include "treeweave/vtree.hpp"

using namespace treeweave;

namespace {

// Collapses root copies: the matching key lists each leaf's partner node.
std::vector<std::uint32_t> matching_key(const VirtualTree& t, const Pairing& p) {
  std::vector<std::uint32_t> key;
  for (const VirtualNodeId l : t.leaves_in_order()) key.push_back(p.slot_of(l).node.value());
  return key;
}

// All distinct matchings of a tree, by brute force over slot permutations.
std::set<std::vector<std::uint32_t>> enumerate_matchings(const VirtualTree& t) {
  std::vector<InternalSlot> slots;
  for (const VirtualNodeId v : t.internals_in_order()) slots.push_back(InternalSlot::primary(v));
  slots.push_back(InternalSlot::root_duplicate(t.root()));
  std::vector<std::size_t> perm(slots.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  const std::vector<VirtualNodeId> leaves = t.leaves_in_order();
  std::set<std::vector<std::uint32_t>> keys;
  do {
    std::vector<std::uint32_t> key;
    for (std::size_t i = 0; i < leaves.size(); ++i) key.push_back(slots[perm[i]].node.value());
    keys.insert(key);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return keys;
}

// Independent contraction oracle: builds the owner map by listing pairing
// entries, then walks every unordered node pair testing tree adjacency.
std::set<std::pair<std::uint32_t, std::uint32_t>> contract_oracle(const VirtualTree& t,
                                                                  const Pairing& p) {
  const std::vector<VirtualNodeId> leaves = t.leaves_in_order();
  std::map<VirtualNodeId, std::uint32_t> owner;  // virtual node -> physical rank
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    owner[leaves[i]] = static_cast<std::uint32_t>(i);
    const InternalSlot s = p.slot_of(leaves[i]);
    if (s.copy == SlotCopy::kPrimary) owner[s.node] = static_cast<std::uint32_t>(i);
  }
  const std::vector<VirtualNodeId> nodes = t.nodes();
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const VirtualNodeId u : nodes) {
    for (const VirtualNodeId v : nodes) {
      if (!(u < v)) continue;
      const bool adjacent = t.parent(u) == v || t.parent(v) == u;
      if (!adjacent) continue;
      const std::uint32_t a = owner.at(u);
      const std::uint32_t b = owner.at(v);
      if (a != b) edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  return edges;
}

std::set<std::pair<std::uint32_t, std::uint32_t>> edge_set(const Graph& g) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::size_t i = 0; i < g.order(); ++i) {
    for (const std::uint32_t j : g.neighbor_indices(i)) {
      const std::uint32_t a = g.ids()[i];
      const std::uint32_t b = g.ids()[j];
      if (a < b) edges.insert({a, b});
    }
  }
  return edges;
}

}  // namespace

TEST_CASE("canonical pairing on the 2-leaf tree") {
  const VirtualTree t = VirtualTree::complete(2);
  const Pairing p = Pairing::canonical(t);
  const std::vector<VirtualNodeId> leaves = t.leaves_in_order();
  CHECK(p.slot_of(leaves[0]) == InternalSlot::primary(t.root()));
  CHECK(p.slot_of(leaves[1]) == InternalSlot::root_duplicate(t.root()));
}

TEST_CASE("canonical pairing follows in-order positions") {
  const VirtualTree t = VirtualTree::complete(4);
  const Pairing p = Pairing::canonical(t);
  const std::vector<VirtualNodeId> leaves = t.leaves_in_order();
  const VirtualNodeId a = t.left_child(t.root());
  const VirtualNodeId b = t.right_child(t.root());
  CHECK(p.slot_of(leaves[0]) == InternalSlot::primary(a));
  CHECK(p.slot_of(leaves[1]) == InternalSlot::primary(t.root()));
  CHECK(p.slot_of(leaves[2]) == InternalSlot::primary(b));
  CHECK(p.slot_of(leaves[3]) == InternalSlot::root_duplicate(t.root()));
}

TEST_CASE("canonical pairing audits cleanly across sizes") {
  for (std::uint32_t n = 2; n <= 1024; n *= 2) {
    const VirtualTree t = VirtualTree::complete(n);
    Pairing::canonical(t).validate_for(t);
  }
}

TEST_CASE("random pairing is uniform over distinct matchings at 4 leaves") {
  const VirtualTree t = VirtualTree::complete(4);
  const std::set<std::vector<std::uint32_t>> all = enumerate_matchings(t);
  REQUIRE(all.size() == 12);
  std::map<std::vector<std::uint32_t>, std::size_t> index;
  std::size_t next = 0;
  for (const auto& key : all) index[key] = next++;

  Rng rng = make_rng(2024);
  const std::size_t draws = 100000;
  std::vector<std::size_t> counts(12, 0);
  for (std::size_t i = 0; i < draws; ++i) {
    const Pairing p = Pairing::uniform_random(t, rng);
    p.validate_for(t);
    ++counts[index.at(matching_key(t, p))];
  }
  const double stat = testsupport::chi2_statistic(counts, static_cast<double>(draws) / 12);
  CHECK(stat < testsupport::chi2_crit_p01(11));
}

TEST_CASE("random pairing is reproducible per seed") {
  const VirtualTree t = VirtualTree::complete(16);
  Rng a = make_rng(5);
  Rng b = make_rng(5);
  CHECK(Pairing::uniform_random(t, a) == Pairing::uniform_random(t, b));
  Rng c = make_rng(6);
  CHECK_FALSE(Pairing::uniform_random(t, a) == Pairing::uniform_random(t, c));
}

TEST_CASE("swap semantics") {
  const VirtualTree t = VirtualTree::complete(4);
  const std::vector<VirtualNodeId> leaves = t.leaves_in_order();
  Pairing p = Pairing::canonical(t);
  const Pairing original = p;

  p.swap_slots(leaves[0], leaves[0]);  // self-swap is the identity
  CHECK(p == original);

  p.swap_slots(leaves[0], leaves[2]);
  const VirtualNodeId a = t.left_child(t.root());
  const VirtualNodeId b = t.right_child(t.root());
  CHECK(p.slot_of(leaves[0]) == InternalSlot::primary(b));
  CHECK(p.slot_of(leaves[2]) == InternalSlot::primary(a));
  CHECK(p.slot_of(leaves[1]) == original.slot_of(leaves[1]));
  CHECK(p.slot_of(leaves[3]) == original.slot_of(leaves[3]));

  p.swap_slots(leaves[0], leaves[2]);  // involution
  CHECK(p == original);

  CHECK_THROWS_AS(p.swap_slots(leaves[0], t.root()), DomainError);
}

TEST_CASE("contract: 2-leaf tree gives a single edge") {
  const VirtualTree t = VirtualTree::complete(2);
  const Graph g = contract(t, Pairing::canonical(t));
  CHECK(g.order() == 2);
  CHECK(g.size() == 1);
  CHECK(g.has_edge(0, 1));
}

TEST_CASE("contract: 4-leaf canonical pairing matches the oracle") {
  const VirtualTree t = VirtualTree::complete(4);
  const Pairing p = Pairing::canonical(t);
  const Graph g = contract(t, p);
  CHECK(g.order() == 4);
  CHECK(edge_set(g) == contract_oracle(t, p));
  // The canonical pairing contracts to the path 0-1-2-3.
  CHECK(edge_set(g) ==
        std::set<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}, {1, 2}, {2, 3}});
  CHECK(g.connected_components().size() == 1);
  CHECK(g.max_degree() <= 4);
}

TEST_CASE("contract matches the oracle on random pairings") {
  Rng rng = make_rng(77);
  for (const std::uint32_t n : {4u, 8u, 16u, 32u}) {
    const VirtualTree t = VirtualTree::complete(n);
    for (int trial = 0; trial < 20; ++trial) {
      const Pairing p = Pairing::uniform_random(t, rng);
      CHECK(edge_set(contract(t, p)) == contract_oracle(t, p));
    }
  }
}

TEST_CASE("contract at 512 leaves: connected, bounded degree, pure") {
  const VirtualTree t = VirtualTree::complete(512);
  Rng rng = make_rng(7);
  const Pairing p = Pairing::uniform_random(t, rng);
  const Graph g = contract(t, p);
  CHECK(g.order() == 512);
  CHECK(g.connected_components().size() == 1);
  CHECK(g.max_degree() <= 4);
  const Graph again = contract(t, p);
  CHECK(edge_set(g) == edge_set(again));
}

TEST_CASE("contract stays connected under tree mutations") {
  VirtualTree t = VirtualTree::complete(16);
  Rng rng = make_rng(55);
  Pairing p = Pairing::uniform_random(t, rng);
  for (int step = 0; step < 50; ++step) {
    const auto [nl, ni] = t.insert_pair(t.sample_leaf(rng));
    p.insert(nl, InternalSlot::primary(ni));
    p.validate_for(t);
    const Graph g = contract(t, p);
    CHECK(g.connected_components().size() == 1);
    CHECK(g.max_degree() <= 4);
  }
}

TEST_CASE("contract rejects a pairing from a different tree") {
  const VirtualTree t4 = VirtualTree::complete(4);
  const VirtualTree t8 = VirtualTree::complete(8);
  CHECK_THROWS_AS(contract(t8, Pairing::canonical(t4)), DomainError);
}

TEST_CASE("rebind_root_duplicate follows the root") {
  VirtualTree t = VirtualTree::complete(2);
  Pairing p = Pairing::canonical(t);
  // Grow leftward so rebalancing moves the root.
  for (int i = 0; i < 6; ++i) {
    const auto [nl, ni] = t.insert_pair(t.leaves_in_order().front());
    p.insert(nl, InternalSlot::primary(ni));
  }
  const VirtualNodeId old_root = t.root();
  t.rebalance();
  REQUIRE(t.root() != old_root);
  CHECK_THROWS_AS(p.validate_for(t), DomainError);
  p.rebind_root_duplicate(t.root());
  p.validate_for(t);
}

TEST_CASE("pairing insert and erase guard the bijection") {
  const VirtualTree t = VirtualTree::complete(4);
  Pairing p = Pairing::canonical(t);
  const VirtualNodeId leaf = t.leaves_in_order().front();
  CHECK_THROWS_AS(p.insert(leaf, InternalSlot::primary(t.root())), DomainError);
  CHECK_THROWS_AS(p.leaf_of(InternalSlot{VirtualNodeId(4000), SlotCopy::kPrimary}),
                  DomainError);
  p.erase_leaf(leaf);
  CHECK_FALSE(p.contains_leaf(leaf));
  CHECK_THROWS_AS(p.erase_leaf(leaf), DomainError);
  CHECK_THROWS_AS(p.slot_of(leaf), DomainError);
}
