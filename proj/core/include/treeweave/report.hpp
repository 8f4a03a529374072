#pragma once

#include <span>
#include <string>
#include <vector>

#include "treeweave/churn.hpp"

namespace treeweave {

/// min/max/mean/sample-stddev of the lambda2 column.
struct LambdaStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
};

/// Pooled statistics plus one entry per run (indexed by run order of
/// appearance, which equals the run index for run_scenario output).
struct SummaryStats {
  LambdaStats pooled;
  std::vector<LambdaStats> per_run;
};

/// Per-run and pooled lambda2 statistics. Throws DomainError on empty input.
SummaryStats summarize(std::span<const RoundTrace> traces);

/// CSV with header run,round,phase,population,lambda2,swaps,disconnected.
/// Floats carry 9 significant digits; phase uses the literal labels
/// Join/Leave/BalanceMix/Mix; disconnected is 0/1.
std::string traces_to_csv(std::span<const RoundTrace> traces);

/// Parses trace CSV back into records. Re-emitting the result reproduces the
/// input byte for byte. Throws DomainError on malformed input.
std::vector<RoundTrace> traces_from_csv(const std::string& csv);

/// Summary JSON: {"config": {...}, "per_run": [{run,min,max,mean,stddev}...],
/// "pooled": {min,max,mean,stddev}}.
std::string summary_to_json(const ScenarioConfig& config, const SummaryStats& stats);

/// Two-column "round lambda2" data for one run, for plotting.
std::string run_to_gnuplot(std::span<const RoundTrace> traces, std::size_t run);

}  // namespace treeweave
