#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "beepsim/graph.hpp"
#include "beepsim/protocol.hpp"
#include "beepsim/rng.hpp"

namespace beepsim {

struct TraceOptions {
  // Full snapshots are kept at rounds 0, k, 2k, ... and always at the final
  // round. The final configuration is kept even with record_snapshots off.
  int snapshot_every = 1;
  bool record_snapshots = true;
  // Per-node beep round lists; gives exact cumulative beep counts at every
  // round, independent of snapshot thinning.
  bool record_beeps = true;
};

enum class StopRule { single_leader, fixed_rounds };

struct RunTrace {
  std::uint64_t seed = 0;
  int snapshot_every = 1;
  std::int64_t rounds_executed = 0;
  // First round with exactly one leader; empty when never reached within
  // the executed rounds (for stop single_leader this is the non-convergence
  // outcome: the trace is still returned in full).
  std::optional<std::int64_t> convergence_round;
  std::vector<Configuration> snapshots;                 // ascending rounds
  std::vector<std::vector<std::int64_t>> beep_rounds;   // per node, ascending
  std::vector<int> leader_count_history;                // index = round

  bool converged() const { return convergence_round.has_value(); }
  bool has_beep_counts() const { return !beep_rounds.empty(); }
  const Configuration* snapshot_at(std::int64_t t) const;
  const Configuration& final_snapshot() const { return snapshots.back(); }
  // N^beep_t: number of rounds s <= t in which the node beeped.
  std::int64_t beep_count_at(int node, std::int64_t t) const;
};

// Every node in the protocol's start state, round 0.
Configuration initial_configuration(const Graph& g, const ProtocolDefinition& proto);

// One synchronous round. Hearing is computed from cfg alone: a node hears
// iff some neighbor is in a beeping state. Each node then samples from
// delta_heard if it beeps or hears, else from delta_quiet. Draws are
// consumed in ascending node order, one per node whose applicable
// transition is non-deterministic, none otherwise; this makes traces
// independent of any internal update order.
Configuration step(const Graph& g, const ProtocolDefinition& proto,
                   const Configuration& cfg, Rng& rng);

// Runs from the all-start configuration until the stop rule holds or
// max_rounds is reached. Identical (g, proto, seed, opts) give identical
// traces.
RunTrace run(const Graph& g, const ProtocolDefinition& proto, std::uint64_t seed,
             std::int64_t max_rounds, StopRule stop, const TraceOptions& opts = {});

// Same, from an explicit starting configuration (round forced to 0).
// extra_stop, when set, additionally ends the run at the first round where
// it returns true.
RunTrace run_from(const Graph& g, const ProtocolDefinition& proto,
                  Configuration start, std::uint64_t seed, std::int64_t max_rounds,
                  StopRule stop, const TraceOptions& opts = {},
                  std::function<bool(const Configuration&)> extra_stop = nullptr);

}  // namespace beepsim
