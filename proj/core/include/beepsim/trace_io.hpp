#pragma once

#include <iosfwd>
#include <string>

#include "beepsim/engine.hpp"

namespace beepsim {

struct TraceHeader {
  std::string graph_spec;  // generator descriptor, or "edgelist"
  std::string edge_list;   // populated when graph_spec == "edgelist"
  int n = 0;
  double p = 0;
  std::string p_mode = "uniform";  // "uniform" | "diameter_tuned"
  std::uint64_t seed = 0;
  int snapshot_every = 1;
};

// JSON-lines: a header record followed by one record per recorded round,
// {"t": .., "states": ["LW", ...], "beeps": [..], "leaders": ..} with
// cumulative beep counts. Tokens are the six-state protocol's.
void write_trace_jsonl(std::ostream& out, const TraceHeader& header,
                       const RunTrace& trace);

struct LoadedTrace {
  TraceHeader header;
  RunTrace trace;
  Graph graph;  // regenerated from the header
};

// Parses a trace file back into a RunTrace. Beep round lists are
// reconstructed from the per-round cumulative counts; that is only exact
// for dense traces, so snapshot_every must be 1. Throws
// std::invalid_argument on malformed input.
LoadedTrace load_trace_jsonl(std::istream& in);

}  // namespace beepsim
