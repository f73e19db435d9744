#include "beepsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace beepsim {

int Transition::sample(double draw) const {
  double cum = 0;
  for (const auto& o : outcomes) {
    cum += o.prob;
    if (draw < cum) return o.state;
  }
  return outcomes.back().state;
}

void ProtocolDefinition::validate() const {
  const std::size_t count = state_names.size();
  if (count == 0) throw std::invalid_argument("protocol has no states");
  if (beeping.size() != count || leader.size() != count ||
      delta_quiet.size() != count || delta_heard.size() != count) {
    throw std::invalid_argument("protocol field sizes disagree");
  }
  if (start_state < 0 || start_state >= static_cast<int>(count)) {
    throw std::invalid_argument("protocol start state out of range");
  }
  auto check_dist = [&](const Transition& tr, const std::string& where) {
    if (tr.outcomes.empty()) throw std::invalid_argument(where + ": empty distribution");
    double sum = 0;
    for (const auto& o : tr.outcomes) {
      if (o.state < 0 || o.state >= static_cast<int>(count)) {
        throw std::invalid_argument(where + ": target state out of range");
      }
      if (o.prob < 0.0 || o.prob > 1.0) {
        throw std::invalid_argument(where + ": probability outside [0,1]");
      }
      sum += o.prob;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw std::invalid_argument(where + ": probabilities sum to " + std::to_string(sum));
    }
  };
  for (std::size_t s = 0; s < count; ++s) {
    check_dist(delta_heard[s], "delta_heard(" + state_names[s] + ")");
    // delta_quiet is never consulted from beeping states but must still be
    // well-formed if present.
    check_dist(delta_quiet[s], "delta_quiet(" + state_names[s] + ")");
  }
}

const Configuration* RunTrace::snapshot_at(std::int64_t t) const {
  auto it = std::lower_bound(snapshots.begin(), snapshots.end(), t,
                             [](const Configuration& c, std::int64_t round) {
                               return c.round < round;
                             });
  if (it == snapshots.end() || it->round != t) return nullptr;
  return &*it;
}

std::int64_t RunTrace::beep_count_at(int node, std::int64_t t) const {
  const auto& rounds = beep_rounds[node];
  return std::upper_bound(rounds.begin(), rounds.end(), t) - rounds.begin();
}

Configuration initial_configuration(const Graph& g, const ProtocolDefinition& proto) {
  Configuration cfg;
  cfg.round = 0;
  cfg.state.assign(g.n, static_cast<std::uint8_t>(proto.start_state));
  return cfg;
}

Configuration step(const Graph& g, const ProtocolDefinition& proto,
                   const Configuration& cfg, Rng& rng) {
  const int n = g.n;
  std::vector<std::uint8_t> heard(n, 0);
  for (int u = 0; u < n; ++u) {
    if (proto.beeping[cfg.state[u]]) {
      for (int v : g.adj[u]) heard[v] = 1;
    }
  }
  Configuration next;
  next.round = cfg.round + 1;
  next.state.resize(n);
  for (int u = 0; u < n; ++u) {
    const int s = cfg.state[u];
    const Transition& tr =
        (proto.beeping[s] || heard[u]) ? proto.delta_heard[s] : proto.delta_quiet[s];
    next.state[u] =
        static_cast<std::uint8_t>(tr.deterministic() ? tr.outcomes[0].state : tr.sample(rng.u01()));
  }
  return next;
}

namespace {

int count_leaders(const ProtocolDefinition& proto, const Configuration& cfg) {
  int count = 0;
  for (auto s : cfg.state) count += proto.leader[s];
  return count;
}

void record_beeps(const ProtocolDefinition& proto, const Configuration& cfg,
                  std::vector<std::vector<std::int64_t>>& beep_rounds) {
  for (std::size_t u = 0; u < cfg.state.size(); ++u) {
    if (proto.beeping[cfg.state[u]]) beep_rounds[u].push_back(cfg.round);
  }
}

}  // namespace

RunTrace run(const Graph& g, const ProtocolDefinition& proto, std::uint64_t seed,
             std::int64_t max_rounds, StopRule stop, const TraceOptions& opts) {
  return run_from(g, proto, initial_configuration(g, proto), seed, max_rounds, stop, opts);
}

RunTrace run_from(const Graph& g, const ProtocolDefinition& proto, Configuration start,
                  std::uint64_t seed, std::int64_t max_rounds, StopRule stop,
                  const TraceOptions& opts,
                  std::function<bool(const Configuration&)> extra_stop) {
  if (max_rounds < 0) throw std::invalid_argument("max_rounds must be >= 0");
  if (opts.snapshot_every < 1) throw std::invalid_argument("snapshot_every must be >= 1");
  if (static_cast<int>(start.state.size()) != g.n) {
    throw std::invalid_argument("start configuration size does not match graph");
  }
  start.round = 0;

  RunTrace trace;
  trace.seed = seed;
  trace.snapshot_every = opts.snapshot_every;
  if (opts.record_beeps) trace.beep_rounds.assign(g.n, {});

  Rng rng(seed);
  Configuration cfg = std::move(start);

  auto record_round = [&](const Configuration& c) {
    if (opts.record_beeps) record_beeps(proto, c, trace.beep_rounds);
    int leaders = count_leaders(proto, c);
    trace.leader_count_history.push_back(leaders);
    if (leaders == 1 && !trace.convergence_round) trace.convergence_round = c.round;
    if (opts.record_snapshots && c.round % opts.snapshot_every == 0) {
      trace.snapshots.push_back(c);
    }
    return leaders;
  };

  auto stop_now = [&](int leaders, const Configuration& c) {
    if (stop == StopRule::single_leader && leaders == 1) return true;
    return extra_stop && extra_stop(c);
  };

  int leaders = record_round(cfg);
  while (!stop_now(leaders, cfg) && cfg.round < max_rounds) {
    cfg = step(g, proto, cfg, rng);
    leaders = record_round(cfg);
  }

  trace.rounds_executed = cfg.round;
  if (trace.snapshots.empty() || trace.snapshots.back().round != cfg.round) {
    trace.snapshots.push_back(std::move(cfg));
  }
  return trace;
}

}  // namespace beepsim
