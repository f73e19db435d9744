#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "beepsim/bfw.hpp"
#include "beepsim/engine.hpp"
#include "beepsim/trace_io.hpp"
#include "support/checks.hpp"

using namespace beepsim;
using namespace bfw_state;

namespace {

Configuration make_cfg(std::vector<int> states, std::int64_t round = 0) {
  Configuration cfg;
  cfg.round = round;
  for (int s : states) cfg.state.push_back(static_cast<std::uint8_t>(s));
  return cfg;
}

std::vector<int> states_of(const Configuration& cfg) {
  return {cfg.state.begin(), cfg.state.end()};
}

}  // namespace

TEST_CASE("wave passes a beeping node on a path") {
  // (NW, LB, NW) -> (NB, LF, NB): both waiting neighbors relay, the beeper
  // freezes.
  const auto g = generate("path:3");
  const auto proto = bfw_protocol({});
  Rng rng(1);
  const auto next = step(g, proto, make_cfg({waiting, leader_beeping, waiting}), rng);
  CHECK(states_of(next) == std::vector<int>{beeping, leader_frozen, beeping});
  CHECK(next.round == 1);
}

TEST_CASE("isolated beeping node freezes") {
  const auto g = generate("clique:1");
  const auto proto = bfw_protocol({});
  Rng rng(1);
  const auto next = step(g, proto, make_cfg({beeping}), rng);
  CHECK(states_of(next) == std::vector<int>{frozen});
}

TEST_CASE("p=1 forces both quiet leaders to beep") {
  const auto g = generate("clique:2");
  BfwParams params;
  params.p = 1.0;
  const auto proto = bfw_protocol(params);
  Rng rng(1);
  const auto next = step(g, proto, make_cfg({leader_waiting, leader_waiting}), rng);
  CHECK(states_of(next) == std::vector<int>{leader_beeping, leader_beeping});
}

TEST_CASE("single node converges immediately") {
  const auto g = generate("clique:1");
  const auto trace = run(g, bfw_protocol({}), 0, 1000, StopRule::single_leader);
  CHECK(trace.converged());
  CHECK(*trace.convergence_round == 0);
  CHECK(trace.rounds_executed == 0);
}

TEST_CASE("p=1 on two nodes is a symmetry trap") {
  // Deterministic cycle (W,W) -> (B,B) -> (F,F) -> (W,W); two leaders
  // forever, so the run must come back as non-convergent at any cap.
  const auto g = generate("path:2");
  BfwParams params;
  params.p = 1.0;
  const auto proto = bfw_protocol(params);
  const auto trace = run(g, proto, 7, 99, StopRule::single_leader);
  CHECK(!trace.converged());
  CHECK(trace.rounds_executed == 99);
  const auto* r1 = trace.snapshot_at(1);
  const auto* r2 = trace.snapshot_at(2);
  const auto* r3 = trace.snapshot_at(3);
  REQUIRE(r1);
  REQUIRE(r2);
  REQUIRE(r3);
  CHECK(states_of(*r1) == std::vector<int>{leader_beeping, leader_beeping});
  CHECK(states_of(*r2) == std::vector<int>{leader_frozen, leader_frozen});
  CHECK(states_of(*r3) == std::vector<int>{leader_waiting, leader_waiting});
  for (int count : trace.leader_count_history) CHECK(count == 2);
}

TEST_CASE("two nodes with a fair coin converge") {
  const auto g = generate("path:2");
  const auto trace = run(g, bfw_protocol({}), 42, 1000000, StopRule::single_leader);
  CHECK(trace.converged());
  CHECK(test_support::leader_history_ok(trace));
}

TEST_CASE("identical inputs give identical traces") {
  const auto g = generate("gnp:24:0.2:3");
  const auto proto = bfw_protocol({});
  const auto a = run(g, proto, 99, 400, StopRule::fixed_rounds);
  const auto b = run(g, proto, 99, 400, StopRule::fixed_rounds);
  CHECK(a.snapshots == b.snapshots);
  CHECK(a.beep_rounds == b.beep_rounds);
  CHECK(a.leader_count_history == b.leader_count_history);
  CHECK(a.convergence_round == b.convergence_round);

  const auto c = run(g, proto, 100, 400, StopRule::fixed_rounds);
  CHECK(a.snapshots != c.snapshots);
}

TEST_CASE("update order cannot matter: draws are indexed by node") {
  // Re-apply the same round with a permuted update order, consuming the
  // draws in ascending node order up front; the result must be identical.
  const auto g = generate("gnp:16:0.25:9");
  const auto proto = bfw_protocol({});
  const std::uint64_t seed = 31;

  auto trace = run(g, proto, seed, 50, StopRule::fixed_rounds);
  Rng replay(seed);
  for (std::size_t i = 1; i < trace.snapshots.size(); ++i) {
    const Configuration& prev = trace.snapshots[i - 1];
    std::vector<std::uint8_t> heard(g.n, 0);
    for (int u = 0; u < g.n; ++u) {
      if (proto.beeping[prev.state[u]]) {
        for (int v : g.adj[u]) heard[v] = 1;
      }
    }
    std::vector<double> draw(g.n, -1.0);
    for (int u = 0; u < g.n; ++u) {
      const auto& tr = (proto.beeping[prev.state[u]] || heard[u]) ? proto.delta_heard[prev.state[u]]
                                                                  : proto.delta_quiet[prev.state[u]];
      if (!tr.deterministic()) draw[u] = replay.u01();
    }
    // walk nodes in a scrambled order
    Configuration redone;
    redone.round = prev.round + 1;
    redone.state.resize(g.n);
    for (int step_idx = 0; step_idx < g.n; ++step_idx) {
      const int u = static_cast<int>((7 * step_idx + 3) % g.n);
      const auto& tr = (proto.beeping[prev.state[u]] || heard[u]) ? proto.delta_heard[prev.state[u]]
                                                                  : proto.delta_quiet[prev.state[u]];
      redone.state[u] = static_cast<std::uint8_t>(
          tr.deterministic() ? tr.outcomes[0].state : tr.sample(draw[u]));
    }
    CHECK(redone == trace.snapshots[i]);
  }
}

TEST_CASE("transition facts hold on every trace") {
  for (const char* spec : {"path:8", "cycle:9", "grid:3x3", "tree:14:5", "gnp:12:0.3:2"}) {
    const auto g = generate(spec);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto trace = run(g, bfw_protocol({}), seed, 300, StopRule::fixed_rounds);
      const auto violations = test_support::transition_facts_violations(g, trace);
      CHECK_MESSAGE(violations.empty(),
                    spec << " seed " << seed << ": " << violations.front());
      CHECK(test_support::leader_history_ok(trace));
    }
  }
}

TEST_CASE("beep counts match beeping snapshots") {
  const auto g = generate("cycle:6");
  const auto trace = run(g, bfw_protocol({}), 8, 200, StopRule::fixed_rounds);
  for (int u = 0; u < g.n; ++u) {
    std::int64_t running = 0;
    for (const auto& cfg : trace.snapshots) {
      if (phase_of(cfg.state[u]) == Phase::beeping) ++running;
      CHECK(trace.beep_count_at(u, cfg.round) == running);
    }
  }
}

TEST_CASE("snapshot thinning keeps counts dense") {
  const auto g = generate("path:6");
  TraceOptions opts;
  opts.snapshot_every = 7;
  const auto trace = run(g, bfw_protocol({}), 5, 100, StopRule::fixed_rounds, opts);
  CHECK(trace.snapshots.front().round == 0);
  CHECK(trace.snapshots.back().round == 100);
  for (std::size_t i = 1; i + 1 < trace.snapshots.size(); ++i) {
    CHECK(trace.snapshots[i].round % 7 == 0);
  }
  CHECK(trace.leader_count_history.size() == 101);
  CHECK(trace.has_beep_counts());
  // convergence bookkeeping unaffected by thinning
  const auto dense = run(g, bfw_protocol({}), 5, 100, StopRule::fixed_rounds);
  CHECK(trace.convergence_round == dense.convergence_round);
  CHECK(trace.beep_rounds == dense.beep_rounds);
}

TEST_CASE("protocol-generic hearing: ping-pong wave") {
  // Two states: a beeping 'shout' and a listening 'idle' that shouts back
  // exactly when it hears. A lone shouter on a path bounces the wave
  // between its neighbors.
  ProtocolDefinition proto;
  proto.state_names = {"idle", "shout"};
  proto.beeping = {false, true};
  proto.leader = {false, true};
  proto.start_state = 0;
  proto.delta_quiet = {Transition::to(0), Transition::to(0)};
  proto.delta_heard = {Transition::to(1), Transition::to(0)};
  proto.validate();

  const auto g = generate("path:3");
  Configuration start;
  start.state = {0, 1, 0};
  const auto trace = run_from(g, proto, start, 1, 4, StopRule::fixed_rounds);
  CHECK(states_of(*trace.snapshot_at(1)) == std::vector<int>{1, 0, 1});
  CHECK(states_of(*trace.snapshot_at(2)) == std::vector<int>{0, 1, 0});
  CHECK(states_of(*trace.snapshot_at(3)) == std::vector<int>{1, 0, 1});
}

TEST_CASE("protocol validation rejects bad distributions") {
  ProtocolDefinition proto;
  proto.state_names = {"a", "b"};
  proto.beeping = {false, true};
  proto.leader = {false, false};
  proto.start_state = 0;
  proto.delta_quiet = {Transition::coin(1, 0.5, 0), Transition::to(0)};
  proto.delta_heard = {Transition::to(1), Transition::to(0)};
  proto.validate();

  auto broken = proto;
  broken.delta_quiet[0] = Transition{{{1, 0.5}, {0, 0.6}}};
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);

  broken = proto;
  broken.delta_heard[1] = Transition{{{7, 1.0}}};
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);

  broken = proto;
  broken.start_state = 5;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}

TEST_CASE("trace jsonl round trip") {
  const auto g = generate("cycle:5");
  const auto trace = run(g, bfw_protocol({}), 21, 60, StopRule::fixed_rounds);

  TraceHeader header;
  header.graph_spec = "cycle:5";
  header.n = g.n;
  header.p = 0.5;
  header.seed = 21;
  std::stringstream buf;
  write_trace_jsonl(buf, header, trace);

  const auto loaded = load_trace_jsonl(buf);
  CHECK(loaded.header.graph_spec == "cycle:5");
  CHECK(loaded.header.seed == 21);
  CHECK(loaded.graph.edges == g.edges);
  CHECK(loaded.trace.snapshots == trace.snapshots);
  CHECK(loaded.trace.beep_rounds == trace.beep_rounds);
  CHECK(loaded.trace.leader_count_history == trace.leader_count_history);
  CHECK(loaded.trace.convergence_round == trace.convergence_round);
}

TEST_CASE("thinned trace files are rejected for auditing") {
  const auto g = generate("path:4");
  TraceOptions opts;
  opts.snapshot_every = 5;
  const auto trace = run(g, bfw_protocol({}), 2, 40, StopRule::fixed_rounds, opts);
  TraceHeader header;
  header.graph_spec = "path:4";
  header.n = g.n;
  header.p = 0.5;
  header.seed = 2;
  header.snapshot_every = 5;
  std::stringstream buf;
  write_trace_jsonl(buf, header, trace);
  CHECK_THROWS_WITH_AS(load_trace_jsonl(buf), doctest::Contains("dense"),
                       std::invalid_argument);
}
