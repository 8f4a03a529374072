#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "treeweave/ids.hpp"
#include "treeweave/mixing.hpp"
#include "treeweave/pairing.hpp"
#include "treeweave/rng.hpp"
#include "treeweave/vtree.hpp"

namespace treeweave {

/// Height of the smallest subtree containing both virtual nodes of a
/// physical node; the departure adversary targets the highest value.
using HeightMetric = std::uint32_t;

enum class AdversaryKind : std::uint8_t { kHighestH = 0, kRandom = 1, kLowestH = 2 };

const char* adversary_name(AdversaryKind kind);
AdversaryKind adversary_from_name(const std::string& name);

/// Experiment parameters for one batch of scenario runs.
struct ScenarioConfig {
  std::uint32_t initial_leaves = 512;  // power of two, >= 2
  std::size_t total_rounds = 100;
  double churn_fraction = 0.0;  // joins and leaves per cycle, relative to the initial population
  std::size_t cycle_length = 7;
  std::size_t mix_rounds_per_balance_round = 1;
  std::uint64_t seed = 1;
  std::size_t runs = 1;
  AdversaryKind adversary = AdversaryKind::kHighestH;
  double lambda_tol = 1e-8;

  /// Throws DomainError on invalid parameters.
  void validate() const;
};

enum class Phase : std::uint8_t { kJoin = 0, kLeave = 1, kBalanceMix = 2, kMix = 3 };

const char* phase_name(Phase phase);
Phase phase_from_name(const std::string& name);

/// One measured round of a scenario run. lambda2 is 0 exactly iff
/// disconnected is set.
struct RoundTrace {
  std::size_t run = 0;
  std::size_t round = 0;  // 1-based
  Phase phase = Phase::kMix;
  std::size_t population = 0;
  double lambda2 = 0.0;
  std::size_t swaps = 0;
  bool disconnected = false;

  friend bool operator==(const RoundTrace&, const RoundTrace&) = default;
};

/// The dynamic system under churn: a virtual tree, the leaf-to-internal
/// pairing, and the ownership of both by physical nodes. Every physical node
/// owns exactly one leaf and the internal slot that leaf is paired with, so
/// the pairing carries the slot side of the ownership.
///
/// One instance per run, single-threaded; a batch runner may execute many
/// runs in parallel, each with its own instance and rng stream.
class Simulation {
 public:
  Simulation(std::uint32_t initial_leaves, std::uint64_t seed,
             AdversaryKind adversary = AdversaryKind::kHighestH);

  const VirtualTree& tree() const { return tree_; }
  const Pairing& pairing() const { return pairing_; }
  std::size_t population() const { return pid_by_leaf_.size(); }
  std::size_t initial_population() const { return initial_population_; }

  std::vector<PhysicalNodeId> physical_nodes() const;  // sorted
  PhysicalNodeId owner_of_leaf(VirtualNodeId leaf) const;
  VirtualNodeId leaf_of(PhysicalNodeId pid) const;
  InternalSlot slot_of(PhysicalNodeId pid) const;

  /// floor(fraction * initial population) fresh physical nodes join; each
  /// splits a uniformly random existing leaf and owns the new leaf plus the
  /// new internal. Returns the join count.
  std::size_t join_phase(double fraction);

  /// floor(fraction * initial population) departures, one at a time: the
  /// adversary picks the victim (highest h, ties toward the smallest id, for
  /// the default adversary), the tree splices out a deepest leaf and its
  /// parent, and ownership is repaired locally: the spliced leaf's owner
  /// inherits the leaver's leaf, the spliced internal's owner inherits the
  /// leaver's slot. Throws ScenarioError if the population would drop
  /// below 2. Returns the departure count.
  std::size_t leave_phase(double fraction);

  /// Height of the subtree rooted at the lowest common ancestor of the
  /// node's leaf and its internal (a root-duplicate slot resolves to the
  /// root).
  HeightMetric h_metric(PhysicalNodeId pid) const;

  /// Rotation rebalance; keeps the root-duplicate slot bound to the current
  /// root. Returns the rotation count.
  std::size_t rebalance();

  /// One mixing round over the current tree and pairing.
  MixRoundStats mix();

  /// Joint invariant audit across tree, pairing and ownership.
  void validate() const;

 private:
  void depart(PhysicalNodeId victim);
  PhysicalNodeId pick_victim();

  VirtualTree tree_;
  Pairing pairing_;
  Rng rng_;
  AdversaryKind adversary_;
  std::size_t initial_population_;
  std::uint32_t next_pid_ = 0;
  std::unordered_map<VirtualNodeId, PhysicalNodeId> pid_by_leaf_;
  std::unordered_map<PhysicalNodeId, VirtualNodeId> leaf_by_pid_;
};

/// Executes one scenario run. Rounds cycle through the configured phases:
/// position 1 joins, position 2 leaves, position 3 rebalances and mixes,
/// the remaining positions mix. lambda2 of the contracted physical graph is
/// measured at the end of every round. Deterministic for a fixed config and
/// run index (the run seed is derived by run_seed()).
std::vector<RoundTrace> run_one(const ScenarioConfig& config, std::size_t run_index);

/// All runs of the batch, concatenated in run order.
std::vector<RoundTrace> run_scenario(const ScenarioConfig& config);

}  // namespace treeweave
