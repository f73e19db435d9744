#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "beepsim/bfw.hpp"
#include "beepsim/flowcheck.hpp"
#include "json.hpp"

using namespace beepsim;
using namespace bfw_state;

namespace {

Configuration cfg_of(std::vector<int> states, std::int64_t round = 0) {
  Configuration cfg;
  cfg.round = round;
  for (int s : states) cfg.state.push_back(static_cast<std::uint8_t>(s));
  return cfg;
}

RunTrace bfw_trace(const Graph& g, std::uint64_t seed, std::int64_t rounds, double p = 0.5) {
  BfwParams params;
  params.p = p;
  return run(g, bfw_protocol(params), seed, rounds, StopRule::fixed_rounds);
}

OrientedPath reversed(const OrientedPath& path) {
  return OrientedPath{{path.vertices.rbegin(), path.vertices.rend()}};
}

}  // namespace

TEST_CASE("edge flow cases") {
  const auto g = generate("path:2");
  CHECK(edge_flow(g, cfg_of({leader_beeping, waiting}), 0, 1) == 1);
  CHECK(edge_flow(g, cfg_of({frozen, leader_waiting}), 0, 1) == 0);
  CHECK(edge_flow(g, cfg_of({waiting, beeping}), 0, 1) == -1);
  CHECK(edge_flow(g, cfg_of({beeping, leader_beeping}), 0, 1) == 0);
  CHECK(edge_flow(g, cfg_of({frozen, leader_frozen}), 0, 1) == 0);
  // orientation matters
  CHECK(edge_flow(g, cfg_of({leader_beeping, waiting}), 1, 0) == -1);

  const auto g3 = generate("path:3");
  CHECK_THROWS_AS(edge_flow(g3, cfg_of({waiting, waiting, waiting}), 0, 2),
                  std::invalid_argument);
}

TEST_CASE("path flow hand cases") {
  const auto g = generate("path:3");
  const auto path = OrientedPath::of({0, 1, 2}, g);
  CHECK(path_flow(cfg_of({waiting, waiting, waiting}), path) == 0);
  CHECK(path_flow(cfg_of({leader_waiting, waiting, waiting}), path) == 0);
  // (B,W,B): +1 then -1
  CHECK(path_flow(cfg_of({beeping, waiting, beeping}), path) == 0);

  const auto g4 = generate("path:4");
  const auto p4 = OrientedPath::of({0, 1, 2, 3}, g4);
  // alternating B,W,B,W: +1 -1 +1
  const auto alternating = cfg_of({beeping, waiting, leader_beeping, waiting});
  CHECK(path_flow(alternating, p4) == 1);
  CHECK(path_flow(alternating, reversed(p4)) == -1);
}

TEST_CASE("path validation") {
  const auto g = generate("cycle:4");
  CHECK_THROWS_AS(OrientedPath::of({0, 2}, g), std::invalid_argument);
  CHECK_THROWS_AS(OrientedPath::of({0}, g), std::invalid_argument);
  // repeats are allowed
  const auto walk = OrientedPath::of({0, 1, 0, 3, 0, 1}, g);
  CHECK(walk.length() == 5);
}

TEST_CASE("flow is bounded by length and antisymmetric") {
  const auto g = generate("gnp:14:0.3:4");
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    Configuration cfg;
    cfg.state.resize(g.n);
    for (auto& s : cfg.state) s = static_cast<std::uint8_t>(rng.below(6));
    std::vector<int> vertices{static_cast<int>(rng.below(g.n))};
    for (int i = 0; i < 9; ++i) {
      const auto& nbrs = g.adj[vertices.back()];
      vertices.push_back(nbrs[rng.below(static_cast<std::uint32_t>(nbrs.size()))]);
    }
    const auto walk = OrientedPath::of(vertices, g);
    const int flow = path_flow(cfg, walk);
    CHECK(std::abs(flow) <= walk.length());
    CHECK(path_flow(cfg, reversed(walk)) == -flow);
  }
}

TEST_CASE("conservation on an all-waiting window") {
  RunTrace trace;
  trace.snapshot_every = 1;
  trace.rounds_executed = 5;
  for (int t = 0; t <= 5; ++t) {
    trace.snapshots.push_back(cfg_of({leader_waiting, waiting, waiting, waiting}, t));
  }
  const auto g = generate("path:4");
  const auto report = audit_conservation(g, trace, OrientedPath::of({0, 1, 2, 3}, g));
  CHECK(report.clean());
  CHECK(report.find("conservation")->checked == 5);
}

TEST_CASE("conservation on a real run and under corruption") {
  const auto g = generate("path:6");
  auto trace = bfw_trace(g, 7, 200);
  const auto full_path = OrientedPath::of({0, 1, 2, 3, 4, 5}, g);

  const auto report = audit_conservation(g, trace, full_path);
  CHECK(report.clean());
  CHECK(report.find("conservation")->checked == 200);

  // Freeze the first vertex in a round where it waited next to a beeping
  // neighbor; that changes the flow without touching the bookkeeping, so
  // the mismatch surfaces exactly at the corrupted round.
  std::int64_t corrupted_round = -1;
  for (auto& cfg : trace.snapshots) {
    if (cfg.round >= 1 && phase_of(cfg.state[0]) == Phase::waiting &&
        phase_of(cfg.state[1]) == Phase::beeping) {
      cfg.state[0] = static_cast<std::uint8_t>(frozen);
      corrupted_round = cfg.round;
      break;
    }
  }
  REQUIRE(corrupted_round >= 1);
  const auto bad = audit_conservation(g, trace, full_path);
  CHECK(!bad.clean());
  REQUIRE(bad.first_violation.has_value());
  CHECK(bad.first_violation->round == corrupted_round);
  CHECK(bad.first_violation->check == "conservation");
}

TEST_CASE("ohm on real runs incl self-intersecting paths") {
  const auto g = generate("cycle:8");
  const auto trace = bfw_trace(g, 3, 500);

  // round 0: no beeps, zero flow
  const auto edge = OrientedPath::of({0, 1}, g);
  CHECK(path_flow(trace.snapshots[0], edge) == 0);
  CHECK(trace.beep_count_at(0, 0) == 0);

  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    std::vector<int> vertices{static_cast<int>(rng.below(g.n))};
    const int len = 1 + static_cast<int>(rng.below(14));  // long walks revisit vertices
    for (int s = 0; s < len; ++s) {
      const auto& nbrs = g.adj[vertices.back()];
      vertices.push_back(nbrs[rng.below(static_cast<std::uint32_t>(nbrs.size()))]);
    }
    const auto report = audit_ohm(g, trace, OrientedPath::of(vertices, g));
    CHECK_MESSAGE(report.clean(), "walk " << i);
    CHECK(report.find("ohm")->checked == 501);
  }
}

TEST_CASE("ohm catches a corrupted beep counter") {
  const auto g = generate("path:5");
  auto trace = bfw_trace(g, 11, 150);
  REQUIRE(!trace.beep_rounds[0].empty());
  const std::int64_t erased = trace.beep_rounds[0].front();
  trace.beep_rounds[0].erase(trace.beep_rounds[0].begin());

  const auto report = audit_ohm(g, trace, OrientedPath::of({0, 1}, g));
  CHECK(!report.clean());
  REQUIRE(report.first_violation.has_value());
  CHECK(report.first_violation->round == erased);
}

TEST_CASE("beep counts are distance-Lipschitz") {
  const auto dists = [](const Graph& g) { return distances(g); };
  SUBCASE("trivial and adjacent") {
    const auto g = generate("path:4");
    const auto trace = bfw_trace(g, 5, 120);
    const auto d = dists(g);
    CHECK(audit_lipschitz(g, trace, d).clean());
    // adjacent pairs stay within one beep of each other
    for (std::int64_t t = 0; t <= trace.rounds_executed; ++t) {
      for (auto [u, v] : g.edges) {
        CHECK(std::abs(trace.beep_count_at(u, t) - trace.beep_count_at(v, t)) <= 1);
      }
    }
  }
  SUBCASE("clique counts cluster within one") {
    const auto g = generate("clique:5");
    const auto trace = bfw_trace(g, 21, 300);
    CHECK(audit_lipschitz(g, trace, dists(g)).clean());
  }
  SUBCASE("violation is reported") {
    const auto g = generate("path:3");
    auto trace = bfw_trace(g, 2, 100);
    // four beeps in four rounds is impossible (every beep is followed by a
    // frozen round), so node 0 must outrun its neighbor
    trace.beep_rounds[0] = {1, 2, 3, 4};
    const auto report = audit_lipschitz(g, trace, dists(g));
    CHECK(!report.clean());
  }
}

TEST_CASE("traveling beep obligations") {
  SUBCASE("no beeps, no obligations") {
    RunTrace trace;
    trace.snapshot_every = 1;
    trace.rounds_executed = 9;
    trace.beep_rounds.assign(3, {});
    const auto g = generate("path:3");
    const auto report = audit_traveling_beep(g, trace, distances(g));
    CHECK(report.clean());
    CHECK(report.find("traveling_beep")->checked == 0);
  }
  SUBCASE("real run satisfies all deadlines") {
    const auto g = generate("path:5");
    const auto trace = bfw_trace(g, 13, 400);
    const auto report = audit_traveling_beep(g, trace, distances(g));
    CHECK(report.clean());
    CHECK(report.find("traveling_beep")->checked > 0);
  }
  SUBCASE("suppressed beeps violate the deadline") {
    const auto g = generate("path:5");
    auto trace = bfw_trace(g, 13, 400);
    REQUIRE(!trace.beep_rounds[4].empty());
    trace.beep_rounds[4].clear();
    const auto report = audit_traveling_beep(g, trace, distances(g));
    CHECK(!report.clean());
    REQUIRE(report.first_violation.has_value());
  }
  SUBCASE("deadlines past the horizon are indeterminate") {
    RunTrace trace;
    trace.snapshot_every = 1;
    trace.rounds_executed = 10;
    trace.beep_rounds = {{10}, {}};
    const auto g = generate("path:2");
    const auto report = audit_traveling_beep(g, trace, distances(g));
    CHECK(report.clean());
    CHECK(report.find("traveling_beep")->indeterminate == 1);
  }
}

TEST_CASE("elimination audit") {
  SUBCASE("no eliminations is a vacuous pass") {
    RunTrace trace;
    trace.snapshot_every = 1;
    trace.rounds_executed = 3;
    trace.beep_rounds.assign(2, {});
    for (int t = 0; t <= 3; ++t) {
      trace.snapshots.push_back(cfg_of({leader_waiting, waiting}, t));
      trace.leader_count_history.push_back(1);
    }
    const auto g = generate("path:2");
    const auto report = audit_elimination(g, trace);
    CHECK(report.clean());
    CHECK(report.find("elimination")->checked == 0);
    CHECK(report.find("leader_floor")->checked == 4);
  }
  SUBCASE("every elimination in a converging run is justified") {
    for (const char* spec : {"path:8", "cycle:10", "grid:3x3"}) {
      const auto g = generate(spec);
      const auto trace = run(g, bfw_protocol({}), 29, 100000, StopRule::single_leader);
      REQUIRE(trace.converged());
      const auto report = audit_elimination(g, trace);
      CHECK_MESSAGE(report.clean(), spec);
      CHECK(report.find("elimination")->checked > 0);
      CHECK(report.find("leader_floor")->violated == 0);
      CHECK(report.find("leader_monotone")->violated == 0);
    }
  }
  SUBCASE("an unjustified non-leader beep is flagged") {
    const auto g = generate("path:4");
    auto trace = bfw_trace(g, 3, 50);
    // nobody has beeped before round 1, so a beeping non-leader there can
    // have no neighbor one beep ahead
    REQUIRE(trace.snapshots[1].round == 1);
    trace.snapshots[1].state[2] = static_cast<std::uint8_t>(beeping);
    const auto report = audit_elimination(g, trace);
    CHECK(!report.clean());
    REQUIRE(report.first_violation.has_value());
    CHECK(report.first_violation->round == 1);
    CHECK(report.first_violation->check == "elimination");
  }
}

TEST_CASE("single-edge ohm agrees with adjacent lipschitz") {
  const auto g = generate("tree:12:4");
  const auto trace = bfw_trace(g, 31, 300);
  const auto d = distances(g);
  for (auto [u, v] : g.edges) {
    CHECK(audit_ohm(g, trace, OrientedPath::of({u, v}, g)).clean());
  }
  CHECK(audit_lipschitz(g, trace, d).clean());
}

TEST_CASE("audits refuse traces without the data they need") {
  const auto g = generate("path:4");
  TraceOptions opts;
  opts.snapshot_every = 4;
  const auto thinned = run(g, bfw_protocol({}), 3, 40, StopRule::fixed_rounds, opts);
  const auto path = OrientedPath::of({0, 1}, g);
  CHECK_THROWS_WITH_AS(audit_conservation(g, thinned, path), doctest::Contains("dense"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(audit_ohm(g, thinned, path), doctest::Contains("dense"),
                       std::invalid_argument);

  TraceOptions no_beeps;
  no_beeps.record_beeps = false;
  const auto bare = run(g, bfw_protocol({}), 3, 40, StopRule::fixed_rounds, no_beeps);
  CHECK_THROWS_WITH_AS(audit_ohm(g, bare, path), doctest::Contains("beep"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(audit_lipschitz(g, bare, distances(g)), doctest::Contains("beep"),
                       std::invalid_argument);
}

TEST_CASE("full audit battery on small graphs") {
  // exhaustive pairs fit easily at n <= 32
  int combos = 0;
  for (const char* spec : {"path:12", "cycle:16", "grid:4x4", "tree:24:6", "gnp:20:0.2:3"}) {
    const auto g = generate(spec);
    const auto d = distances(g);
    for (std::uint64_t seed : {101u, 202u}) {
      for (double p : {0.3, 0.7}) {
        const auto trace = bfw_trace(g, seed, 300, p);
        AuditOptions opts;
        opts.seed = seed;
        const auto report = audit_all(g, d, trace, opts);
        CHECK_MESSAGE(report.clean(), spec << " seed " << seed << " p " << p << ": "
                                           << (report.first_violation
                                                   ? report.first_violation->detail
                                                   : ""));
        ++combos;
      }
    }
  }
  CHECK(combos == 20);
}

TEST_CASE("vacuous audit on a single node") {
  const auto g = generate("clique:1");
  const auto trace = run(g, bfw_protocol({}), 1, 500, StopRule::fixed_rounds);
  const auto report = audit_all(g, distances(g), trace);
  CHECK(report.clean());
}

TEST_CASE("report serializes counts per check") {
  const auto g = generate("path:4");
  const auto trace = bfw_trace(g, 5, 60);
  const auto report = audit_all(g, distances(g), trace);
  const auto j = nlohmann::json::parse(report.to_json());
  CHECK(j["schema"] == "beepsim.flowreport/1");
  CHECK(j["clean"] == true);
  CHECK(j["first_violation"].is_null());
  bool saw_conservation = false;
  for (const auto& c : j["checks"]) {
    CHECK(c["checked"].get<std::int64_t>() ==
          c["passed"].get<std::int64_t>() + c["violated"].get<std::int64_t>() +
              c["indeterminate"].get<std::int64_t>());
    if (c["name"] == "conservation") saw_conservation = true;
  }
  CHECK(saw_conservation);
}
