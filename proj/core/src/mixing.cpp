#include "treeweave/mixing.hpp"

#include <unordered_map>

#include "treeweave/errors.hpp"

namespace treeweave {

MixRoundStats mix_round(const VirtualTree& tree, Pairing& pairing, Rng& rng) {
  const std::vector<VirtualNodeId> leaves = tree.leaves_in_order();
  const std::size_t id_bound = tree.id_bound();

  std::vector<char> active(id_bound, 0);
  MixRoundStats stats;
  for (const VirtualNodeId l : leaves) {
    if (coin_flip(rng)) {
      active[l.value()] = 1;
      ++stats.actives;
    }
  }

  std::vector<std::pair<VirtualNodeId, VirtualNodeId>> requests;  // (active, target)
  std::vector<std::uint32_t> request_count(id_bound, 0);
  for (const VirtualNodeId l : leaves) {
    if (!active[l.value()]) continue;
    const VirtualNodeId target = tree.sample_leaf(rng);
    stats.probe_hops += tree.depth(target);
    requests.emplace_back(l, target);
    ++request_count[target.value()];
  }
  stats.requests_sent = requests.size();

  for (const auto& [sender, target] : requests) {
    if (active[target.value()]) continue;            // includes self-probes
    if (request_count[target.value()] != 1) continue;  // contention rejects all
    pairing.swap_slots(sender, target);
    ++stats.accepted;
  }
  stats.swaps = stats.accepted;
  return stats;
}

std::vector<MixRoundStats> run_mixing(const VirtualTree& tree, Pairing& pairing,
                                      std::size_t rounds, Rng& rng) {
  std::vector<MixRoundStats> out;
  out.reserve(rounds);
  for (std::size_t i = 0; i < rounds; ++i) out.push_back(mix_round(tree, pairing, rng));
  return out;
}

std::size_t matching_distance(const Pairing& p, const Pairing& q) {
  const std::vector<VirtualNodeId> dp = p.leaves();
  if (dp != q.leaves()) {
    throw DomainError("matching_distance requires identical domains");
  }
  std::size_t differing = 0;
  for (const VirtualNodeId leaf : dp) {
    // Root copies are identified: only the slot's node matters.
    if (p.slot_of(leaf).node != q.slot_of(leaf).node) ++differing;
  }
  return differing;
}

}  // namespace treeweave
