#include "beepsim/trace_io.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "beepsim/bfw.hpp"

#include "json.hpp"

namespace beepsim {

namespace {

nlohmann::json header_json(const TraceHeader& h) {
  nlohmann::json j;
  j["schema"] = "beepsim.trace/1";
  j["graph"] = h.graph_spec;
  if (h.graph_spec == "edgelist") j["edges"] = h.edge_list;
  j["n"] = h.n;
  j["p"] = h.p;
  j["p_mode"] = h.p_mode;
  j["seed"] = h.seed;
  j["snapshot_every"] = h.snapshot_every;
  return j;
}

[[noreturn]] void bad(const std::string& msg) {
  throw std::invalid_argument("trace file: " + msg);
}

}  // namespace

void write_trace_jsonl(std::ostream& out, const TraceHeader& header, const RunTrace& trace) {
  out << header_json(header).dump() << '\n';
  for (const auto& cfg : trace.snapshots) {
    nlohmann::json row;
    row["t"] = cfg.round;
    auto& states = row["states"] = nlohmann::json::array();
    for (auto s : cfg.state) states.push_back(std::string(bfw_tokens[s]));
    auto& beeps = row["beeps"] = nlohmann::json::array();
    for (std::size_t u = 0; u < cfg.state.size(); ++u) {
      beeps.push_back(trace.has_beep_counts()
                          ? trace.beep_count_at(static_cast<int>(u), cfg.round)
                          : 0);
    }
    row["leaders"] = cfg.round < static_cast<std::int64_t>(trace.leader_count_history.size())
                         ? trace.leader_count_history[cfg.round]
                         : 0;
    out << row.dump() << '\n';
  }
}

LoadedTrace load_trace_jsonl(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) bad("empty input");

  LoadedTrace loaded;
  try {
    const auto h = nlohmann::json::parse(line);
    loaded.header.graph_spec = h.at("graph").get<std::string>();
    if (h.contains("edges")) loaded.header.edge_list = h["edges"].get<std::string>();
    loaded.header.n = h.at("n").get<int>();
    loaded.header.p = h.at("p").get<double>();
    loaded.header.p_mode = h.value("p_mode", "uniform");
    loaded.header.seed = h.at("seed").get<std::uint64_t>();
    loaded.header.snapshot_every = h.value("snapshot_every", 1);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("bad header: ") + e.what());
  }
  if (loaded.header.snapshot_every != 1) {
    bad("snapshot_every != 1; audits need dense traces");
  }

  loaded.graph = loaded.header.graph_spec == "edgelist"
                     ? load_edge_list(loaded.header.edge_list)
                     : generate(loaded.header.graph_spec);
  if (loaded.graph.n != loaded.header.n) bad("header n does not match graph");

  RunTrace& trace = loaded.trace;
  trace.seed = loaded.header.seed;
  trace.snapshot_every = 1;
  trace.beep_rounds.assign(loaded.graph.n, {});

  std::vector<std::int64_t> prev_counts(loaded.graph.n, 0);
  std::int64_t expected_round = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      bad(std::string("bad record: ") + e.what());
    }
    Configuration cfg;
    cfg.round = row.at("t").get<std::int64_t>();
    if (cfg.round != expected_round) bad("rounds are not consecutive from 0");
    ++expected_round;
    const auto& states = row.at("states");
    const auto& beeps = row.at("beeps");
    if (static_cast<int>(states.size()) != loaded.graph.n ||
        static_cast<int>(beeps.size()) != loaded.graph.n) {
      bad("row width does not match node count");
    }
    cfg.state.resize(loaded.graph.n);
    for (int u = 0; u < loaded.graph.n; ++u) {
      const int s = bfw_state_from_token(states[u].get<std::string>());
      if (s < 0) bad("unknown state token '" + states[u].get<std::string>() + "'");
      cfg.state[u] = static_cast<std::uint8_t>(s);
      const std::int64_t count = beeps[u].get<std::int64_t>();
      const std::int64_t delta = count - prev_counts[u];
      if (delta < 0 || delta > 1) bad("beep count changed by " + std::to_string(delta));
      if (delta == 1) trace.beep_rounds[u].push_back(cfg.round);
      prev_counts[u] = count;
    }
    trace.leader_count_history.push_back(row.at("leaders").get<int>());
    trace.snapshots.push_back(std::move(cfg));
  }
  if (trace.snapshots.empty()) bad("no round records");
  trace.rounds_executed = trace.snapshots.back().round;
  for (std::size_t t = 0; t < trace.leader_count_history.size(); ++t) {
    if (trace.leader_count_history[t] == 1) {
      trace.convergence_round = static_cast<std::int64_t>(t);
      break;
    }
  }
  return loaded;
}

}  // namespace beepsim
