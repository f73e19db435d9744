#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "beepsim/engine.hpp"
#include "beepsim/graph.hpp"

namespace beepsim {

// Walk along oriented edges of the graph; vertices and edges may repeat.
struct OrientedPath {
  std::vector<int> vertices;  // k+1 vertices for k >= 1 edges

  int length() const { return static_cast<int>(vertices.size()) - 1; }
  int first() const { return vertices.front(); }
  int last() const { return vertices.back(); }

  // Validates consecutive adjacency; throws std::invalid_argument.
  static OrientedPath of(std::vector<int> vertices, const Graph& g);
};

// Flow along the oriented edge (u,v): +1 if u beeps and v waits, -1 if u
// waits and v beeps, 0 otherwise. Leader and non-leader halves of a phase
// are equivalent here. Throws on a non-edge.
int edge_flow(const Graph& g, const Configuration& cfg, int u, int v);

// Sum of edge flows along the path; bounded by the path length.
int path_flow(const Configuration& cfg, const OrientedPath& path);

struct Violation {
  std::string check;
  std::int64_t round = 0;
  std::string detail;
};

struct CheckCounts {
  std::string name;
  std::int64_t checked = 0;
  std::int64_t passed = 0;
  std::int64_t violated = 0;
  std::int64_t indeterminate = 0;
};

struct FlowReport {
  std::vector<CheckCounts> checks;
  std::optional<Violation> first_violation;

  bool clean() const;
  CheckCounts& section(const std::string& name);
  const CheckCounts* find(const std::string& name) const;
  void record_pass(const std::string& name);
  void record_violation(const std::string& name, std::int64_t round, std::string detail);
  void record_indeterminate(const std::string& name);
  void merge(const FlowReport& other);
  std::string to_json() const;
};

// Round-to-round flow bookkeeping along one path: across every pair of
// consecutive recorded rounds, the flow changes exactly by
// [first vertex beeps] - [last vertex beeps]. Requires dense snapshots
// (snapshot_every == 1); throws otherwise.
FlowReport audit_conservation(const Graph& g, const RunTrace& trace,
                              const OrientedPath& path);

// Path flow equals the difference of cumulative beep counts at the path's
// endpoints, at every recorded round. Requires dense snapshots and beep
// counts.
FlowReport audit_ohm(const Graph& g, const RunTrace& trace,
                     const OrientedPath& path);

// Cumulative beep counts of any two nodes never differ by more than their
// hop distance; checked for all pairs at every round. Requires beep counts.
FlowReport audit_lipschitz(const Graph& g, const RunTrace& trace,
                           const DistanceTable& dist);

// Whenever a node is ahead of another in cumulative beeps, the trailing
// node must beep within one hop-distance worth of rounds. Only a node's
// first beep creates a non-trivial obligation (afterwards some past beep
// already satisfies the bound), so obligations are checked per ordered
// pair via first-beep rounds. Deadlines past the end of the trace count as
// indeterminate, never as failures. Requires beep counts.
FlowReport audit_traveling_beep(const Graph& g, const RunTrace& trace,
                                const DistanceTable& dist);

// Every node that starts beeping as a non-leader at round t >= 1 must have
// had, at round t-1, a neighbor with exactly one more cumulative beep.
// Also checks the leader-count floor (>= 1 every round) and, for this
// protocol, monotone non-increase. Requires dense snapshots and beep
// counts.
FlowReport audit_elimination(const Graph& g, const RunTrace& trace);

struct AuditOptions {
  bool conservation = true;
  bool ohm = true;
  bool lipschitz = true;
  bool traveling = true;
  bool elimination = true;
  // Path sampling: all single edges are always audited; additionally one
  // BFS shortest path per sampled node pair and `random_walks` walks of
  // length <= 2*diameter (repeated vertices allowed).
  int shortest_path_pairs = 16;
  int random_walks = 8;
  std::uint64_t seed = 0;
};

FlowReport audit_all(const Graph& g, const DistanceTable& dist,
                     const RunTrace& trace, const AuditOptions& opts = {});

}  // namespace beepsim
