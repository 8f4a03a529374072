#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "support/stats.hpp"
#include "treeweave/errors.hpp"
#include "treeweave/rng.hpp"
#include "treeweave/vtree.hpp"

using namespace treeweave;

namespace {

std::vector<std::size_t> leaf_depths(const VirtualTree& t) {
  std::vector<std::size_t> out;
  for (const VirtualNodeId l : t.leaves_in_order()) out.push_back(t.depth(l));
  return out;
}

std::size_t depth_spread(const VirtualTree& t) {
  const std::vector<std::size_t> d = leaf_depths(t);
  return *std::max_element(d.begin(), d.end()) - *std::min_element(d.begin(), d.end());
}

// Left-degenerate full tree with the given leaf count, built by repeatedly
// splitting the leftmost leaf.
VirtualTree left_chain(std::uint32_t leaves) {
  VirtualTree t = VirtualTree::complete(2);
  for (std::uint32_t n = 2; n < leaves; ++n) {
    t.insert_pair(t.leaves_in_order().front());
  }
  return t;
}

}  // namespace

TEST_CASE("complete tree construction") {
  const VirtualTree t2 = VirtualTree::complete(2);
  CHECK(t2.node_count() == 3);
  CHECK(t2.leaf_count() == 2);
  CHECK(t2.internal_count() == 1);
  CHECK(t2.is_leaf(t2.left_child(t2.root())));
  CHECK(t2.is_leaf(t2.right_child(t2.root())));

  const VirtualTree t4 = VirtualTree::complete(4);
  CHECK(t4.node_count() == 7);
  CHECK(t4.internal_count() == 3);
  for (const VirtualNodeId l : t4.leaves_in_order()) CHECK(t4.depth(l) == 2);

  const VirtualTree t512 = VirtualTree::complete(512);
  CHECK(t512.node_count() == 1023);
  CHECK(t512.internal_count() == 511);
  CHECK(t512.height() == 9);
  t512.validate();
}

TEST_CASE("complete rejects bad leaf counts") {
  CHECK_THROWS_AS(VirtualTree::complete(0), DomainError);
  CHECK_THROWS_AS(VirtualTree::complete(1), DomainError);
  CHECK_THROWS_AS(VirtualTree::complete(3), DomainError);
  CHECK_THROWS_AS(VirtualTree::complete(12), DomainError);
}

TEST_CASE("sample_leaf is uniform on complete trees") {
  for (const std::uint32_t n : {4u, 8u, 16u}) {
    const VirtualTree t = VirtualTree::complete(n);
    Rng rng = make_rng(100 + n);
    std::map<VirtualNodeId, std::size_t> counts;
    const std::size_t draws = 100000;
    for (std::size_t i = 0; i < draws; ++i) ++counts[t.sample_leaf(rng)];
    CHECK(counts.size() == n);
    std::vector<std::size_t> observed;
    for (const auto& [leaf, c] : counts) observed.push_back(c);
    const double stat =
        testsupport::chi2_statistic(observed, static_cast<double>(draws) / n);
    CHECK(stat < testsupport::chi2_crit_p01(n - 1));
  }
}

TEST_CASE("sample_leaf weights by subtree size on unbalanced trees") {
  // Left subtree 3 leaves, right 1 leaf: the right leaf must come out 1/4.
  VirtualTree t = VirtualTree::complete(2);
  const VirtualNodeId right_leaf = t.leaves_in_order().back();
  t.insert_pair(t.leaves_in_order().front());
  t.insert_pair(t.leaves_in_order().front());
  REQUIRE(t.leaf_count() == 4);
  REQUIRE(t.subtree_leaf_count(t.left_child(t.root())) == 3);

  Rng rng = make_rng(7);
  const std::size_t draws = 100000;
  std::size_t right_hits = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    if (t.sample_leaf(rng) == right_leaf) ++right_hits;
  }
  const double freq = static_cast<double>(right_hits) / draws;
  // 5 sigma around p = 1/4.
  CHECK(std::abs(freq - 0.25) < 5.0 * std::sqrt(0.25 * 0.75 / draws));
}

TEST_CASE("sample_leaf frequency spread at 512 leaves") {
  const VirtualTree t = VirtualTree::complete(512);
  Rng rng = make_rng(42);
  std::map<VirtualNodeId, std::size_t> counts;
  const std::size_t draws = 1000000;
  for (std::size_t i = 0; i < draws; ++i) ++counts[t.sample_leaf(rng)];
  REQUIRE(counts.size() == 512);
  std::size_t mn = draws, mx = 0;
  for (const auto& [leaf, c] : counts) {
    mn = std::min(mn, c);
    mx = std::max(mx, c);
  }
  CHECK(static_cast<double>(mx) / static_cast<double>(mn) < 1.2);
}

TEST_CASE("insert_pair grows the tree in place") {
  VirtualTree t = VirtualTree::complete(2);
  const VirtualNodeId l1 = t.leaves_in_order().front();
  const auto [nl, ni] = t.insert_pair(l1);
  CHECK(t.node_count() == 5);
  CHECK(t.depth(l1) == 2);
  CHECK(t.depth(nl) == 2);
  CHECK(t.parent(l1) == ni);
  CHECK(t.parent(nl) == ni);
  t.validate();

  // Counting: every insert adds exactly one leaf, one internal, two new ids.
  VirtualTree t8 = VirtualTree::complete(8);
  const std::uint32_t before_bound = t8.id_bound();
  Rng rng = make_rng(5);
  t8.insert_pair(t8.sample_leaf(rng));
  CHECK(t8.leaf_count() == 9);
  CHECK(t8.internal_count() == 8);
  CHECK(t8.id_bound() == before_bound + 2);
  t8.validate();
}

TEST_CASE("insert_pair at first leaf of a complete 4-tree") {
  VirtualTree t = VirtualTree::complete(4);
  t.insert_pair(t.leaves_in_order().front());
  std::multiset<std::size_t> depths;
  for (const std::size_t d : leaf_depths(t)) depths.insert(d);
  CHECK(depths == std::multiset<std::size_t>{3, 3, 2, 2, 2});
  CHECK(t.rebalance() == 0);  // this shape is already the canonical one
  CHECK(depth_spread(t) <= 1);
}

TEST_CASE("insert_pair rejects internal nodes") {
  VirtualTree t = VirtualTree::complete(4);
  CHECK_THROWS_AS(t.insert_pair(t.root()), DomainError);
}

TEST_CASE("remove_pair splices leaf and parent") {
  VirtualTree t = VirtualTree::complete(4);
  const auto removed = t.remove_pair(t.deepest_leaf());
  CHECK(t.leaf_count() == 3);
  CHECK(t.internal_count() == 2);
  CHECK_FALSE(t.contains(removed.removed_leaf));
  CHECK_FALSE(t.contains(removed.removed_internal));
  t.validate();
}

TEST_CASE("remove_pair refuses to shrink below two leaves") {
  VirtualTree t = VirtualTree::complete(2);
  CHECK_THROWS_AS(t.remove_pair(t.leaves_in_order().front()), DomainError);
}

TEST_CASE("repeated removal keeps the tree full-binary") {
  VirtualTree t = VirtualTree::complete(8);
  while (t.leaf_count() > 2) {
    t.remove_pair(t.deepest_leaf());
    t.validate();
  }
  CHECK(t.leaf_count() == 2);
  CHECK_THROWS_AS(t.remove_pair(t.deepest_leaf()), DomainError);
}

TEST_CASE("rebalance fixes a degenerate chain and preserves leaf order") {
  VirtualTree t = left_chain(4);
  REQUIRE(depth_spread(t) == 2);
  const std::vector<VirtualNodeId> order_before = t.leaves_in_order();
  const std::size_t rotations = t.rebalance();
  CHECK(rotations > 0);
  CHECK(depth_spread(t) <= 1);
  CHECK(t.leaves_in_order() == order_before);
  t.validate();
  CHECK(t.rebalance() == 0);  // idempotent
}

TEST_CASE("rebalance of a complete tree is a no-op") {
  for (const std::uint32_t n : {2u, 4u, 8u, 64u}) {
    VirtualTree t = VirtualTree::complete(n);
    CHECK(t.rebalance() == 0);
  }
}

TEST_CASE("rebalance handles churn-sized mutations") {
  VirtualTree t = VirtualTree::complete(512);
  Rng rng = make_rng(99);
  for (int i = 0; i < 51; ++i) t.insert_pair(t.sample_leaf(rng));
  for (int i = 0; i < 51; ++i) t.remove_pair(t.deepest_leaf());
  t.rebalance();
  CHECK(depth_spread(t) <= 1);
  t.validate();
  CHECK(t.rebalance() == 0);
}

TEST_CASE("structural auditor survives random operation sequences") {
  Rng rng = make_rng(1234);
  VirtualTree t = VirtualTree::complete(8);
  for (int step = 0; step < 400; ++step) {
    const std::uint64_t action = uniform_below(rng, 4);
    if (action == 0 || t.leaf_count() <= 3) {
      const std::vector<VirtualNodeId> leaves = t.leaves_in_order();
      t.insert_pair(leaves[uniform_below(rng, leaves.size())]);
    } else if (action == 1) {
      const std::vector<VirtualNodeId> leaves = t.leaves_in_order();
      t.remove_pair(leaves[uniform_below(rng, leaves.size())]);
    } else if (action == 2) {
      t.remove_pair(t.deepest_leaf());
    } else {
      t.rebalance();
      CHECK(depth_spread(t) <= 1);
    }
    t.validate();
  }
}

TEST_CASE("maximal occupied subtrees: sibling pair merges") {
  const VirtualTree t = VirtualTree::complete(4);
  const std::vector<VirtualNodeId> leaves = t.leaves_in_order();
  const std::vector<VirtualNodeId> s{leaves[0], leaves[1]};
  const std::vector<SubtreeSet> out = t.maximal_occupied_subtrees(s);
  REQUIRE(out.size() == 1);
  CHECK(out[0].root == t.parent(leaves[0]));
  CHECK(out[0].members.size() == 3);
}

TEST_CASE("maximal occupied subtrees: non-siblings stay singletons") {
  const VirtualTree t = VirtualTree::complete(4);
  const std::vector<VirtualNodeId> leaves = t.leaves_in_order();
  const std::vector<VirtualNodeId> s{leaves[0], leaves[2]};
  const std::vector<SubtreeSet> out = t.maximal_occupied_subtrees(s);
  REQUIRE(out.size() == 2);
  CHECK(out[0].members == std::vector<VirtualNodeId>{leaves[0]});
  CHECK(out[1].members == std::vector<VirtualNodeId>{leaves[2]});
}

TEST_CASE("maximal occupied subtrees: 8-leaf mixed set") {
  const VirtualTree t = VirtualTree::complete(8);
  const std::vector<VirtualNodeId> leaves = t.leaves_in_order();
  const std::vector<VirtualNodeId> s{leaves[0], leaves[1], leaves[2], leaves[3], leaves[5]};
  const std::vector<SubtreeSet> out = t.maximal_occupied_subtrees(s);
  REQUIRE(out.size() == 2);
  CHECK(out[0].root == t.left_child(t.root()));
  CHECK(out[0].members.size() == 7);
  CHECK(out[1].members == std::vector<VirtualNodeId>{leaves[5]});

  // Exhaustive oracle: a node roots a maximal occupied subtree iff all its
  // leaves are in S and its parent subtree has a leaf outside S.
  std::set<VirtualNodeId> in_s(s.begin(), s.end());
  std::set<VirtualNodeId> expected_roots;
  for (const VirtualNodeId v : t.nodes()) {
    std::vector<VirtualNodeId> stack{v};
    bool occupied = true;
    while (!stack.empty()) {
      const VirtualNodeId x = stack.back();
      stack.pop_back();
      if (t.is_leaf(x)) {
        occupied = occupied && in_s.count(x) > 0;
      } else {
        stack.push_back(t.left_child(x));
        stack.push_back(t.right_child(x));
      }
    }
    if (!occupied) continue;
    const VirtualNodeId p = t.parent(v);
    bool parent_occupied = false;
    if (p.is_valid()) {
      parent_occupied = true;
      std::vector<VirtualNodeId> stack2{p};
      while (!stack2.empty()) {
        const VirtualNodeId x = stack2.back();
        stack2.pop_back();
        if (t.is_leaf(x)) {
          parent_occupied = parent_occupied && in_s.count(x) > 0;
        } else {
          stack2.push_back(t.left_child(x));
          stack2.push_back(t.right_child(x));
        }
      }
    }
    if (!parent_occupied) expected_roots.insert(v);
  }
  std::set<VirtualNodeId> got_roots;
  for (const SubtreeSet& x : out) got_roots.insert(x.root);
  CHECK(got_roots == expected_roots);
}

TEST_CASE("maximal occupied subtrees: edge cases") {
  const VirtualTree t = VirtualTree::complete(4);
  CHECK(t.maximal_occupied_subtrees({}).empty());
  CHECK_THROWS_AS(t.maximal_occupied_subtrees(std::vector<VirtualNodeId>{t.root()}),
                  DomainError);

  // Whole leaf set decomposes into the full tree.
  const std::vector<VirtualNodeId> all = t.leaves_in_order();
  const std::vector<SubtreeSet> out = t.maximal_occupied_subtrees(all);
  REQUIRE(out.size() == 1);
  CHECK(out[0].root == t.root());
  CHECK(out[0].members.size() == t.node_count());
}

TEST_CASE("occupied decomposition covers S exactly and is maximal") {
  Rng rng = make_rng(321);
  const VirtualTree t = VirtualTree::complete(16);
  const std::vector<VirtualNodeId> leaves = t.leaves_in_order();
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<VirtualNodeId> s;
    for (const VirtualNodeId l : leaves) {
      if (coin_flip(rng)) s.push_back(l);
    }
    const std::vector<SubtreeSet> out = t.maximal_occupied_subtrees(s);
    std::set<VirtualNodeId> covered;
    std::set<VirtualNodeId> parents;
    for (const SubtreeSet& x : out) {
      for (const VirtualNodeId v : x.members) {
        if (t.is_leaf(v)) CHECK(covered.insert(v).second);  // pairwise disjoint
      }
      const VirtualNodeId p = t.parent(x.root);
      if (p.is_valid()) CHECK(parents.insert(p).second);  // distinct parents
    }
    CHECK(covered == std::set<VirtualNodeId>(s.begin(), s.end()));
  }
}
