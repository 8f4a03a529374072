#pragma once

#include <cstdint>

#include "treeweave/rng.hpp"

namespace treeweave {

/// Outcome of one structural property sweep.
struct SweepResult {
  std::size_t cases_checked = 0;
  std::size_t violations = 0;

  bool passed() const { return violations == 0 && cases_checked > 0; }
};

/// On a complete tree, every nonempty connected set S of internal nodes has
/// node boundary at least |S| + 1, and at least |S| + 2 when the root is not
/// in S. Exhaustive over all such S.
SweepResult sweep_connected_internal_boundary(std::uint32_t leaves);

/// Every nonempty set S of non-root internal nodes with m induced connected
/// components has node boundary at least |S| + m + 1. Exhaustive.
SweepResult sweep_general_internal_boundary(std::uint32_t leaves);

/// For every subtree X and every nonempty S of X's internal nodes, the part
/// of S's boundary inside X has at least |S| + 1 nodes. Exhaustive.
SweepResult sweep_subtree_internal_boundary(std::uint32_t leaves);

/// For every maximal occupied subtree X of a leaf set S and Q = S together
/// with its paired internals, at least half of X's nodes outside Q lie on
/// Q's boundary. Exhaustive over all (S, pairing) combinations; feasible up
/// to 8 leaves. Periodically cross-checked against the public boundary and
/// decomposition APIs.
SweepResult sweep_occupied_halving_exhaustive(std::uint32_t leaves);

/// Randomized version of the halving sweep for larger trees: each sample
/// draws a uniform tree size from the given power-of-two range, a random
/// nonempty leaf set and a uniform pairing.
SweepResult sweep_occupied_halving_random(std::uint32_t min_leaves, std::uint32_t max_leaves,
                                          std::size_t samples, Rng& rng);

}  // namespace treeweave
