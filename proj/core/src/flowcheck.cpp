#include "beepsim/flowcheck.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "beepsim/bfw.hpp"
#include "beepsim/rng.hpp"

#include "json.hpp"

namespace beepsim {

namespace {

constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

bool beeps(const Configuration& cfg, int u) {
  return phase_of(cfg.state[u]) == Phase::beeping;
}

bool waits(const Configuration& cfg, int u) {
  return phase_of(cfg.state[u]) == Phase::waiting;
}

std::string path_str(const OrientedPath& path) {
  std::string s = "[";
  for (std::size_t i = 0; i < path.vertices.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(path.vertices[i]);
  }
  return s + "]";
}

void require_dense(const RunTrace& trace, const char* who) {
  if (trace.snapshot_every != 1 || trace.snapshots.empty()) {
    throw std::invalid_argument(std::string(who) + ": trace lacks dense snapshots");
  }
}

void require_beeps(const RunTrace& trace, const char* who) {
  if (!trace.has_beep_counts()) {
    throw std::invalid_argument(std::string(who) + ": trace lacks beep counts");
  }
}

// Walks cumulative beep counts round by round without re-searching.
class BeepCursor {
 public:
  explicit BeepCursor(const RunTrace& trace)
      : trace_(trace), counts_(trace.beep_rounds.size(), 0),
        next_(trace.beep_rounds.size(), 0) {}

  // Advance to round t (t must be non-decreasing across calls).
  void advance(std::int64_t t) {
    for (std::size_t u = 0; u < counts_.size(); ++u) {
      const auto& rounds = trace_.beep_rounds[u];
      while (next_[u] < rounds.size() && rounds[next_[u]] <= t) {
        ++counts_[u];
        ++next_[u];
      }
    }
  }

  std::int64_t count(int u) const { return counts_[u]; }

 private:
  const RunTrace& trace_;
  std::vector<std::int64_t> counts_;
  std::vector<std::size_t> next_;
};

}  // namespace

OrientedPath OrientedPath::of(std::vector<int> vertices, const Graph& g) {
  if (vertices.size() < 2) throw std::invalid_argument("path needs at least one edge");
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    if (!g.has_edge(vertices[i], vertices[i + 1])) {
      throw std::invalid_argument("path step (" + std::to_string(vertices[i]) + "," +
                                  std::to_string(vertices[i + 1]) + ") is not an edge");
    }
  }
  return OrientedPath{std::move(vertices)};
}

int edge_flow(const Graph& g, const Configuration& cfg, int u, int v) {
  if (!g.has_edge(u, v)) {
    throw std::invalid_argument("edge_flow: (" + std::to_string(u) + "," + std::to_string(v) +
                                ") is not an edge");
  }
  if (beeps(cfg, u) && waits(cfg, v)) return 1;
  if (waits(cfg, u) && beeps(cfg, v)) return -1;
  return 0;
}

int path_flow(const Configuration& cfg, const OrientedPath& path) {
  int flow = 0;
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
    const int a = path.vertices[i];
    const int b = path.vertices[i + 1];
    if (beeps(cfg, a) && waits(cfg, b)) {
      ++flow;
    } else if (waits(cfg, a) && beeps(cfg, b)) {
      --flow;
    }
  }
  return flow;
}

bool FlowReport::clean() const {
  for (const auto& c : checks) {
    if (c.violated) return false;
  }
  return true;
}

CheckCounts& FlowReport::section(const std::string& name) {
  for (auto& c : checks) {
    if (c.name == name) return c;
  }
  checks.push_back(CheckCounts{name});
  return checks.back();
}

const CheckCounts* FlowReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void FlowReport::record_pass(const std::string& name) {
  auto& s = section(name);
  ++s.checked;
  ++s.passed;
}

void FlowReport::record_violation(const std::string& name, std::int64_t round,
                                  std::string detail) {
  auto& s = section(name);
  ++s.checked;
  ++s.violated;
  if (!first_violation) first_violation = Violation{name, round, std::move(detail)};
}

void FlowReport::record_indeterminate(const std::string& name) {
  auto& s = section(name);
  ++s.checked;
  ++s.indeterminate;
}

void FlowReport::merge(const FlowReport& other) {
  for (const auto& c : other.checks) {
    auto& mine = section(c.name);
    mine.checked += c.checked;
    mine.passed += c.passed;
    mine.violated += c.violated;
    mine.indeterminate += c.indeterminate;
  }
  if (!first_violation && other.first_violation) first_violation = other.first_violation;
}

std::string FlowReport::to_json() const {
  nlohmann::json j;
  j["schema"] = "beepsim.flowreport/1";
  j["clean"] = clean();
  auto& arr = j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"checked", c.checked},
                   {"passed", c.passed},
                   {"violated", c.violated},
                   {"indeterminate", c.indeterminate}});
  }
  if (first_violation) {
    j["first_violation"] = {{"check", first_violation->check},
                            {"round", first_violation->round},
                            {"detail", first_violation->detail}};
  } else {
    j["first_violation"] = nullptr;
  }
  return j.dump();
}

FlowReport audit_conservation(const Graph& g, const RunTrace& trace,
                              const OrientedPath& path) {
  require_dense(trace, "conservation");
  (void)g;
  FlowReport report;
  report.section("conservation");
  for (std::size_t i = 1; i < trace.snapshots.size(); ++i) {
    const Configuration& prev = trace.snapshots[i - 1];
    const Configuration& cur = trace.snapshots[i];
    if (cur.round != prev.round + 1) continue;  // gap in a loaded file
    const int predicted = path_flow(prev, path) + (beeps(cur, path.first()) ? 1 : 0) -
                          (beeps(cur, path.last()) ? 1 : 0);
    const int actual = path_flow(cur, path);
    if (actual == predicted) {
      report.record_pass("conservation");
    } else {
      std::ostringstream msg;
      msg << "path " << path_str(path) << ": flow " << actual << " at round " << cur.round
          << ", expected " << predicted << " from round " << prev.round;
      report.record_violation("conservation", cur.round, msg.str());
    }
  }
  if (report.section("conservation").checked == 0) {
    throw std::invalid_argument("conservation: no consecutive snapshot pairs in trace");
  }
  return report;
}

FlowReport audit_ohm(const Graph& g, const RunTrace& trace, const OrientedPath& path) {
  require_dense(trace, "ohm");
  require_beeps(trace, "ohm");
  (void)g;
  FlowReport report;
  report.section("ohm");
  BeepCursor counts(trace);
  for (const Configuration& cfg : trace.snapshots) {
    counts.advance(cfg.round);
    const int flow = path_flow(cfg, path);
    const std::int64_t diff = counts.count(path.first()) - counts.count(path.last());
    if (flow == diff) {
      report.record_pass("ohm");
    } else {
      std::ostringstream msg;
      msg << "path " << path_str(path) << ": flow " << flow << " but endpoint beep counts differ by "
          << diff;
      report.record_violation("ohm", cfg.round, msg.str());
    }
  }
  return report;
}

FlowReport audit_lipschitz(const Graph& g, const RunTrace& trace,
                           const DistanceTable& dist) {
  require_beeps(trace, "lipschitz");
  FlowReport report;
  auto& sec = report.section("lipschitz");  // sole section; reference stays valid
  BeepCursor counts(trace);
  const int n = g.n;
  for (std::int64_t t = 0; t <= trace.rounds_executed; ++t) {
    counts.advance(t);
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        const std::int64_t gap = counts.count(u) - counts.count(v);
        if (gap <= dist(u, v) && -gap <= dist(u, v)) {
          ++sec.checked;
          ++sec.passed;
        } else {
          std::ostringstream msg;
          msg << "nodes " << u << "," << v << ": beep counts " << counts.count(u) << " vs "
              << counts.count(v) << " but distance " << dist(u, v);
          report.record_violation("lipschitz", t, msg.str());
        }
      }
    }
  }
  return report;
}

FlowReport audit_traveling_beep(const Graph& g, const RunTrace& trace,
                                const DistanceTable& dist) {
  require_beeps(trace, "traveling_beep");
  FlowReport report;
  report.section("traveling_beep");
  const int n = g.n;
  std::vector<std::int64_t> first_beep(n, kNever);
  for (int u = 0; u < n; ++u) {
    if (!trace.beep_rounds[u].empty()) first_beep[u] = trace.beep_rounds[u].front();
  }
  const std::int64_t horizon = trace.rounds_executed;
  for (int u = 0; u < n; ++u) {
    if (first_beep[u] == kNever) continue;
    for (int v = 0; v < n; ++v) {
      if (v == u || first_beep[v] <= first_beep[u]) continue;
      // From round first_beep[u] on, u is ahead of v until v's first beep;
      // the tightest deadline comes from the earliest such round.
      const std::int64_t deadline = first_beep[u] + dist(u, v);
      if (first_beep[v] <= deadline) {
        report.record_pass("traveling_beep");
      } else if (deadline > horizon) {
        report.record_indeterminate("traveling_beep");
      } else {
        std::ostringstream msg;
        msg << "node " << u << " first beeped at " << first_beep[u] << " but node " << v
            << (first_beep[v] == kNever ? " never beeped"
                                        : " first beeped at " + std::to_string(first_beep[v]))
            << "; deadline was " << deadline;
        report.record_violation("traveling_beep", deadline, msg.str());
      }
    }
  }
  return report;
}

FlowReport audit_elimination(const Graph& g, const RunTrace& trace) {
  require_dense(trace, "elimination");
  require_beeps(trace, "elimination");
  FlowReport report;
  report.section("elimination");
  report.section("leader_floor");
  report.section("leader_monotone");

  BeepCursor counts(trace);
  for (std::size_t i = 1; i < trace.snapshots.size(); ++i) {
    const Configuration& cur = trace.snapshots[i];
    const std::int64_t t = cur.round;
    // Counts as of t-1.
    counts.advance(t - 1);
    for (int u = 0; u < g.n; ++u) {
      if (cur.state[u] != bfw_state::beeping) continue;  // non-leader beeping only
      bool found = false;
      for (int v : g.adj[u]) {
        if (counts.count(v) == counts.count(u) + 1) {
          found = true;
          break;
        }
      }
      if (found) {
        report.record_pass("elimination");
      } else {
        std::ostringstream msg;
        msg << "node " << u << " beeps as a non-leader at round " << t
            << " but no neighbor had one more beep at round " << t - 1;
        report.record_violation("elimination", t, msg.str());
      }
    }
  }

  int prev = -1;
  for (std::size_t t = 0; t < trace.leader_count_history.size(); ++t) {
    const int leaders = trace.leader_count_history[t];
    if (leaders >= 1) {
      report.record_pass("leader_floor");
    } else {
      report.record_violation("leader_floor", static_cast<std::int64_t>(t),
                              "leader count dropped to " + std::to_string(leaders));
    }
    if (prev >= 0) {
      if (leaders <= prev) {
        report.record_pass("leader_monotone");
      } else {
        report.record_violation("leader_monotone", static_cast<std::int64_t>(t),
                                "leader count rose from " + std::to_string(prev) + " to " +
                                    std::to_string(leaders));
      }
    }
    prev = leaders;
  }
  return report;
}

FlowReport audit_all(const Graph& g, const DistanceTable& dist, const RunTrace& trace,
                     const AuditOptions& opts) {
  FlowReport report;
  Rng rng(opts.seed);

  std::vector<OrientedPath> paths;
  for (auto [u, v] : g.edges) paths.push_back(OrientedPath{{u, v}});
  // One BFS shortest path per sampled pair.
  if (g.n >= 2) {
    for (int i = 0; i < opts.shortest_path_pairs; ++i) {
      int a = static_cast<int>(rng.below(static_cast<std::uint32_t>(g.n)));
      int b = static_cast<int>(rng.below(static_cast<std::uint32_t>(g.n)));
      if (a == b) continue;
      std::vector<int> parent(g.n, -1);
      std::vector<int> queue{a};
      parent[a] = a;
      for (std::size_t head = 0; head < queue.size() && parent[b] == -1; ++head) {
        for (int w : g.adj[queue[head]]) {
          if (parent[w] == -1) {
            parent[w] = queue[head];
            queue.push_back(w);
          }
        }
      }
      std::vector<int> vertices{b};
      for (int w = b; w != a; w = parent[w]) vertices.push_back(parent[w]);
      std::reverse(vertices.begin(), vertices.end());
      paths.push_back(OrientedPath{std::move(vertices)});
    }
    // Random walks; vertices may repeat, which the path definition allows.
    const int walk_len = std::max(1, 2 * dist.diameter);
    for (int i = 0; i < opts.random_walks; ++i) {
      std::vector<int> vertices{static_cast<int>(rng.below(static_cast<std::uint32_t>(g.n)))};
      for (int s = 0; s < walk_len; ++s) {
        const auto& nbrs = g.adj[vertices.back()];
        vertices.push_back(nbrs[rng.below(static_cast<std::uint32_t>(nbrs.size()))]);
      }
      paths.push_back(OrientedPath{std::move(vertices)});
    }
  }

  if (opts.conservation) {
    for (const auto& path : paths) report.merge(audit_conservation(g, trace, path));
  }
  if (opts.ohm) {
    for (const auto& path : paths) report.merge(audit_ohm(g, trace, path));
  }
  if (opts.lipschitz) report.merge(audit_lipschitz(g, trace, dist));
  if (opts.traveling) report.merge(audit_traveling_beep(g, trace, dist));
  if (opts.elimination) report.merge(audit_elimination(g, trace));
  return report;
}

}  // namespace beepsim
