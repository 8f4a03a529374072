#pragma once

#include <cstddef>
#include <vector>

#include "treeweave/pairing.hpp"
#include "treeweave/rng.hpp"
#include "treeweave/vtree.hpp"

namespace treeweave {

/// Per-round counters of the matching-mixing process. swaps always equals
/// accepted, and every active leaf sends exactly one request.
struct MixRoundStats {
  std::size_t actives = 0;
  std::size_t requests_sent = 0;
  std::size_t accepted = 0;
  std::size_t swaps = 0;
  std::size_t probe_hops = 0;  // summed descent depth of all probes
};

/// One synchronous round of matching mixing:
///   1. every leaf flips a fair coin, active or passive;
///   2. every active leaf probes a uniform random leaf (weighted descent from
///      the root) and sends it one matching-exchange request;
///   3. a passive leaf receiving exactly one request accepts it; a passive
///      leaf with two or more rejects them all, and requests that land on
///      active leaves (self-probes included) are rejected;
///   4. each agreed pair exchanges internal slots.
///
/// All coins and probes for the round are drawn before any swap is applied:
/// draws happen in leaf in-order (coins first, then the actives' probes), and
/// the resulting swaps are disjoint transpositions, so any application order
/// yields the same pairing.
MixRoundStats mix_round(const VirtualTree& tree, Pairing& pairing, Rng& rng);

/// Applies mix_round the given number of times.
std::vector<MixRoundStats> run_mixing(const VirtualTree& tree, Pairing& pairing,
                                      std::size_t rounds, Rng& rng);

/// Number of leaves whose images differ between two pairings over the same
/// domain. The two root slots count as the same image, so exchanging only the
/// root copies gives distance 0.
std::size_t matching_distance(const Pairing& p, const Pairing& q);

}  // namespace treeweave
