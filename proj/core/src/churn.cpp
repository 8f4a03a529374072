#include "treeweave/churn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "treeweave/errors.hpp"
#include "treeweave/spectral.hpp"

namespace treeweave {

const char* adversary_name(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::kHighestH: return "highest_h";
    case AdversaryKind::kRandom: return "random";
    case AdversaryKind::kLowestH: return "lowest_h";
  }
  return "unknown";
}

AdversaryKind adversary_from_name(const std::string& name) {
  if (name == "highest_h") return AdversaryKind::kHighestH;
  if (name == "random") return AdversaryKind::kRandom;
  if (name == "lowest_h") return AdversaryKind::kLowestH;
  throw DomainError("unknown adversary '" + name + "'");
}

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::kJoin: return "Join";
    case Phase::kLeave: return "Leave";
    case Phase::kBalanceMix: return "BalanceMix";
    case Phase::kMix: return "Mix";
  }
  return "unknown";
}

Phase phase_from_name(const std::string& name) {
  if (name == "Join") return Phase::kJoin;
  if (name == "Leave") return Phase::kLeave;
  if (name == "BalanceMix") return Phase::kBalanceMix;
  if (name == "Mix") return Phase::kMix;
  throw DomainError("unknown phase '" + name + "'");
}

void ScenarioConfig::validate() const {
  if (initial_leaves < 2 || !std::has_single_bit(initial_leaves)) {
    throw DomainError("initial_leaves must be a power of two >= 2");
  }
  if (total_rounds < 1) throw DomainError("total_rounds must be >= 1");
  if (!(churn_fraction >= 0.0 && churn_fraction <= 1.0)) {
    throw DomainError("churn_fraction must lie in [0, 1]");
  }
  if (cycle_length < 3) {
    throw DomainError("cycle_length must be >= 3 (join, leave, balance)");
  }
  if (mix_rounds_per_balance_round < 1) {
    throw DomainError("mix_rounds_per_balance_round must be >= 1");
  }
  if (runs < 1) throw DomainError("runs must be >= 1");
  if (!(lambda_tol > 0.0) || lambda_tol > 1e-2) {
    throw DomainError("lambda_tol must lie in (0, 1e-2]");
  }
}

namespace {

/// Churn counts round down; both figures' percentages are relative to the
/// initial population.
std::size_t churn_count(double fraction, std::size_t initial) {
  return static_cast<std::size_t>(fraction * static_cast<double>(initial) + 1e-9);
}

}  // namespace

Simulation::Simulation(std::uint32_t initial_leaves, std::uint64_t seed,
                       AdversaryKind adversary)
    : tree_(VirtualTree::complete(initial_leaves)),
      rng_(make_rng(seed)),
      adversary_(adversary),
      initial_population_(initial_leaves) {
  pairing_ = Pairing::uniform_random(tree_, rng_);
  for (const VirtualNodeId leaf : tree_.leaves_in_order()) {
    const PhysicalNodeId pid(next_pid_++);
    pid_by_leaf_.emplace(leaf, pid);
    leaf_by_pid_.emplace(pid, leaf);
  }
}

std::vector<PhysicalNodeId> Simulation::physical_nodes() const {
  std::vector<PhysicalNodeId> out;
  out.reserve(leaf_by_pid_.size());
  for (const auto& [pid, leaf] : leaf_by_pid_) out.push_back(pid);
  std::sort(out.begin(), out.end());
  return out;
}

PhysicalNodeId Simulation::owner_of_leaf(VirtualNodeId leaf) const {
  const auto it = pid_by_leaf_.find(leaf);
  if (it == pid_by_leaf_.end()) {
    throw DomainError("leaf " + std::to_string(leaf.value()) + " has no owner");
  }
  return it->second;
}

VirtualNodeId Simulation::leaf_of(PhysicalNodeId pid) const {
  const auto it = leaf_by_pid_.find(pid);
  if (it == leaf_by_pid_.end()) {
    throw DomainError("unknown physical node " + std::to_string(pid.value()));
  }
  return it->second;
}

InternalSlot Simulation::slot_of(PhysicalNodeId pid) const {
  return pairing_.slot_of(leaf_of(pid));
}

std::size_t Simulation::join_phase(double fraction) {
  const std::size_t count = churn_count(fraction, initial_population_);
  // All joiners probe their bootstrap leaf against the round-start tree
  // (synchronous-round semantics), then the insertions are applied. A leaf
  // stays a leaf when split, so repeated targets stack beneath it.
  std::vector<VirtualNodeId> bootstrap;
  bootstrap.reserve(count);
  for (std::size_t i = 0; i < count; ++i) bootstrap.push_back(tree_.sample_leaf(rng_));
  for (const VirtualNodeId u : bootstrap) {
    const auto [new_leaf, new_internal] = tree_.insert_pair(u);
    pairing_.insert(new_leaf, InternalSlot::primary(new_internal));
    const PhysicalNodeId pid(next_pid_++);
    pid_by_leaf_.emplace(new_leaf, pid);
    leaf_by_pid_.emplace(pid, new_leaf);
  }
  return count;
}

HeightMetric Simulation::h_metric(PhysicalNodeId pid) const {
  const VirtualNodeId leaf = leaf_of(pid);
  VirtualNodeId internal = pairing_.slot_of(leaf).node;  // duplicate resolves to the root

  // Lowest common ancestor by depth-equalized parent walk.
  VirtualNodeId a = leaf;
  VirtualNodeId b = internal;
  std::size_t da = tree_.depth(a);
  std::size_t db = tree_.depth(b);
  while (da > db) {
    a = tree_.parent(a);
    --da;
  }
  while (db > da) {
    b = tree_.parent(b);
    --db;
  }
  while (a != b) {
    a = tree_.parent(a);
    b = tree_.parent(b);
  }
  return static_cast<HeightMetric>(tree_.height(a));
}

namespace {

struct TreeScan {
  std::vector<std::uint32_t> height;  // by id
  std::vector<std::uint32_t> depth;   // by id
};

TreeScan scan_tree(const VirtualTree& t) {
  TreeScan s;
  s.height.assign(t.id_bound(), 0);
  s.depth.assign(t.id_bound(), 0);
  std::vector<std::pair<VirtualNodeId, bool>> stack{{t.root(), false}};
  while (!stack.empty()) {
    auto [v, expanded] = stack.back();
    stack.pop_back();
    if (t.is_leaf(v)) continue;
    const VirtualNodeId l = t.left_child(v);
    const VirtualNodeId r = t.right_child(v);
    if (expanded) {
      s.height[v.value()] = 1 + std::max(s.height[l.value()], s.height[r.value()]);
    } else {
      s.depth[l.value()] = s.depth[v.value()] + 1;
      s.depth[r.value()] = s.depth[v.value()] + 1;
      stack.emplace_back(v, true);
      stack.emplace_back(l, false);
      stack.emplace_back(r, false);
    }
  }
  return s;
}

VirtualNodeId lowest_common_ancestor(const VirtualTree& t, const TreeScan& s,
                                     VirtualNodeId a, VirtualNodeId b) {
  std::uint32_t da = s.depth[a.value()];
  std::uint32_t db = s.depth[b.value()];
  while (da > db) {
    a = t.parent(a);
    --da;
  }
  while (db > da) {
    b = t.parent(b);
    --db;
  }
  while (a != b) {
    a = t.parent(a);
    b = t.parent(b);
  }
  return a;
}

}  // namespace

PhysicalNodeId Simulation::pick_victim() {
  const std::vector<PhysicalNodeId> pids = physical_nodes();
  if (adversary_ == AdversaryKind::kRandom) {
    return pids[uniform_below(rng_, pids.size())];
  }
  const TreeScan scan = scan_tree(tree_);
  PhysicalNodeId best;
  HeightMetric best_h = 0;
  for (const PhysicalNodeId pid : pids) {
    const VirtualNodeId leaf = leaf_by_pid_.at(pid);
    const VirtualNodeId internal = pairing_.slot_of(leaf).node;
    const VirtualNodeId lca = lowest_common_ancestor(tree_, scan, leaf, internal);
    const HeightMetric h = scan.height[lca.value()];
    // Ascending pid order, strict improvement only: ties go to the smallest id.
    const bool better = !best.is_valid() ||
                        (adversary_ == AdversaryKind::kHighestH ? h > best_h : h < best_h);
    if (better) {
      best = pid;
      best_h = h;
    }
  }
  return best;
}

void Simulation::depart(PhysicalNodeId victim) {
  const VirtualNodeId leaver_leaf = leaf_of(victim);
  const InternalSlot leaver_slot = pairing_.slot_of(leaver_leaf);

  const VirtualNodeId spliced_leaf = tree_.deepest_leaf();
  const VirtualNodeId spliced_internal = tree_.parent(spliced_leaf);
  const InternalSlot displaced_slot = pairing_.slot_of(spliced_leaf);
  const VirtualNodeId displaced_leaf =
      pairing_.leaf_of(InternalSlot::primary(spliced_internal));
  const PhysicalNodeId leaf_heir = owner_of_leaf(spliced_leaf);

  tree_.remove_pair(spliced_leaf);

  // Rebuild the three touched pairing entries. The spliced leaf's owner
  // inherits the leaver's leaf, the spliced internal's owner inherits the
  // leaver's slot; coincidences between the three parties collapse entries.
  pairing_.erase_leaf(spliced_leaf);
  if (displaced_leaf != spliced_leaf) pairing_.erase_leaf(displaced_leaf);
  if (leaver_leaf != spliced_leaf && leaver_leaf != displaced_leaf) {
    pairing_.erase_leaf(leaver_leaf);
  }
  if (leaver_leaf != spliced_leaf) {
    const bool displaced_slot_died =
        displaced_slot == InternalSlot::primary(spliced_internal);
    pairing_.insert(leaver_leaf, displaced_slot_died ? leaver_slot : displaced_slot);
  }
  if (displaced_leaf != spliced_leaf && displaced_leaf != leaver_leaf) {
    pairing_.insert(displaced_leaf, leaver_slot);
  }

  // Ownership: the spliced leaf disappears; the leaver's leaf moves to the
  // spliced leaf's owner (unless the leaver owned it).
  pid_by_leaf_.erase(spliced_leaf);
  leaf_by_pid_.erase(victim);
  if (leaver_leaf != spliced_leaf) {
    pid_by_leaf_[leaver_leaf] = leaf_heir;
    leaf_by_pid_[leaf_heir] = leaver_leaf;
  }
}

std::size_t Simulation::leave_phase(double fraction) {
  const std::size_t count = churn_count(fraction, initial_population_);
  for (std::size_t i = 0; i < count; ++i) {
    if (population() - 1 < 2) {
      throw ScenarioError("departure would shrink the system below 2 physical nodes");
    }
    depart(pick_victim());
  }
  return count;
}

std::size_t Simulation::rebalance() {
  const std::size_t rotations = tree_.rebalance();
  pairing_.rebind_root_duplicate(tree_.root());
  return rotations;
}

MixRoundStats Simulation::mix() { return mix_round(tree_, pairing_, rng_); }

void Simulation::validate() const {
  tree_.validate();
  pairing_.validate_for(tree_);
  if (pid_by_leaf_.size() != leaf_by_pid_.size() ||
      pid_by_leaf_.size() != tree_.leaf_count()) {
    throw DomainError("ownership audit: population out of sync with leaves");
  }
  for (const auto& [leaf, pid] : pid_by_leaf_) {
    if (!tree_.contains(leaf) || !tree_.is_leaf(leaf)) {
      throw DomainError("ownership audit: owned node is not a live leaf");
    }
    const auto it = leaf_by_pid_.find(pid);
    if (it == leaf_by_pid_.end() || it->second != leaf) {
      throw DomainError("ownership audit: leaf/pid maps inconsistent");
    }
    pairing_.slot_of(leaf);  // every owner has a slot through the pairing
  }
}

std::vector<RoundTrace> run_one(const ScenarioConfig& config, std::size_t run_index) {
  config.validate();
  Simulation sim(config.initial_leaves, run_seed(config.seed, run_index),
                 config.adversary);

  std::vector<RoundTrace> traces;
  traces.reserve(config.total_rounds);
  for (std::size_t round = 1; round <= config.total_rounds; ++round) {
    const std::size_t pos = (round - 1) % config.cycle_length;
    Phase phase;
    std::size_t swaps = 0;
    if (pos == 0) {
      phase = Phase::kJoin;
      sim.join_phase(config.churn_fraction);
    } else if (pos == 1) {
      phase = Phase::kLeave;
      sim.leave_phase(config.churn_fraction);
    } else if (pos == 2) {
      phase = Phase::kBalanceMix;
      sim.rebalance();
      for (std::size_t i = 0; i < config.mix_rounds_per_balance_round; ++i) {
        swaps += sim.mix().swaps;
      }
    } else {
      phase = Phase::kMix;
      swaps = sim.mix().swaps;
    }

    const SpectralReport report =
        lambda2(contract(sim.tree(), sim.pairing()), config.lambda_tol);
    traces.push_back(RoundTrace{run_index, round, phase, sim.population(),
                                report.lambda2, swaps, !report.connected});
  }
  return traces;
}

std::vector<RoundTrace> run_scenario(const ScenarioConfig& config) {
  config.validate();
  std::vector<RoundTrace> all;
  all.reserve(config.runs * config.total_rounds);
  for (std::size_t run = 0; run < config.runs; ++run) {
    const std::vector<RoundTrace> one = run_one(config, run);
    all.insert(all.end(), one.begin(), one.end());
  }
  return all;
}

}  // namespace treeweave
