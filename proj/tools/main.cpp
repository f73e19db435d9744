#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "beepsim/bfw.hpp"
#include "beepsim/engine.hpp"
#include "beepsim/flowcheck.hpp"
#include "beepsim/graph.hpp"
#include "beepsim/harness.hpp"
#include "beepsim/markov.hpp"
#include "beepsim/parallel.hpp"
#include "beepsim/trace_io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

namespace {

namespace exit_code {
constexpr int ok = 0;
constexpr int usage = 1;
constexpr int cap = 2;
constexpr int violation = 3;
}  // namespace exit_code

struct GraphArg {
  beepsim::Graph graph;
  std::string spec;       // descriptor, or "edgelist"
  std::string edge_list;  // for file-loaded graphs
};

GraphArg resolve_graph(const std::string& arg) {
  GraphArg out;
  if (std::filesystem::exists(arg)) {
    std::ifstream in(arg);
    std::stringstream buf;
    buf << in.rdbuf();
    out.edge_list = buf.str();
    out.graph = beepsim::load_edge_list(out.edge_list);
    out.spec = "edgelist";
  } else {
    out.graph = beepsim::generate(arg);
    out.spec = arg;
  }
  return out;
}

beepsim::BfwParams resolve_params(const std::string& p_arg, const beepsim::Graph& graph) {
  beepsim::BfwParams params;
  if (p_arg == "diam") {
    params.mode = beepsim::BfwParams::Mode::diameter_tuned;
    params.diameter = beepsim::distances(graph).diameter;
  } else {
    params.p = std::stod(p_arg);
  }
  params.validate();
  return params;
}

int ceil_log2(int n) {
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  return bits;
}

std::int64_t default_cap(const beepsim::BfwParams& params, int n, int diameter) {
  const double d = diameter;
  const double base = params.mode == beepsim::BfwParams::Mode::diameter_tuned ? d : d * d;
  return static_cast<std::int64_t>(std::ceil(50.0 * base * ceil_log2(n)));
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string timestamp_line() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  return std::string("# generated_at: ") + buf + "\n";
}

void print_audit_summary(const beepsim::FlowReport& report) {
  for (const auto& c : report.checks) {
    std::printf("  %-16s checked=%lld passed=%lld violated=%lld indeterminate=%lld\n",
                c.name.c_str(), static_cast<long long>(c.checked),
                static_cast<long long>(c.passed), static_cast<long long>(c.violated),
                static_cast<long long>(c.indeterminate));
  }
  if (report.first_violation) {
    std::printf("  first violation: %s at round %lld: %s\n",
                report.first_violation->check.c_str(),
                static_cast<long long>(report.first_violation->round),
                report.first_violation->detail.c_str());
  }
}

int find_leader(const beepsim::Configuration& cfg) {
  for (std::size_t u = 0; u < cfg.state.size(); ++u) {
    if (beepsim::is_leader(cfg.state[u])) return static_cast<int>(u);
  }
  return -1;
}

// ---------------------------------------------------------------- run

struct RunArgs {
  std::string graph;
  std::string p = "0.5";
  std::uint64_t seed = 1;
  std::int64_t max_rounds = -1;
  int snapshot_every = 1;
  bool audit = false;
  std::string trace_path;
};

int cmd_run(const RunArgs& args) {
  const GraphArg g = resolve_graph(args.graph);
  const auto params = resolve_params(args.p, g.graph);
  const auto proto = beepsim::bfw_protocol(params);
  const auto dist = beepsim::distances(g.graph);
  const std::int64_t max_rounds =
      args.max_rounds >= 0 ? args.max_rounds : default_cap(params, g.graph.n, dist.diameter);

  beepsim::TraceOptions opts;
  opts.snapshot_every = args.snapshot_every;
  const bool need_full = args.audit || !args.trace_path.empty();
  opts.record_snapshots = need_full;
  opts.record_beeps = need_full;
  if (args.audit) opts.snapshot_every = 1;

  const auto trace = beepsim::run(g.graph, proto, args.seed, max_rounds,
                                  beepsim::StopRule::single_leader, opts);

  if (!args.trace_path.empty()) {
    beepsim::TraceHeader header;
    header.graph_spec = g.spec;
    header.edge_list = g.edge_list;
    header.n = g.graph.n;
    header.p = params.effective_p();
    header.p_mode =
        params.mode == beepsim::BfwParams::Mode::diameter_tuned ? "diameter_tuned" : "uniform";
    header.seed = args.seed;
    header.snapshot_every = opts.snapshot_every;
    std::ofstream out(args.trace_path);
    if (!out) throw std::runtime_error("cannot write " + args.trace_path);
    beepsim::write_trace_jsonl(out, header, trace);
  }

  if (args.audit) {
    const auto report = beepsim::audit_all(g.graph, dist, trace);
    print_audit_summary(report);
    if (!report.clean()) {
      std::printf("audit violations found\n");
      return exit_code::violation;
    }
  }

  if (trace.converged()) {
    std::printf("converged t=%lld leader=%d\n",
                static_cast<long long>(*trace.convergence_round),
                find_leader(trace.final_snapshot()));
    return exit_code::ok;
  }
  std::printf("no convergence within %lld rounds\n", static_cast<long long>(max_rounds));
  return exit_code::cap;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  beepsim::SweepSpec spec;
  std::string p = "0.5";
  std::string sizes;
  std::string audit = "sampled";
  std::string out = "sweep.csv";
  std::string summary;
};

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

int cmd_sweep(SweepArgs& args) {
  args.spec.sizes = parse_int_list(args.sizes);
  if (args.p == "diam") {
    args.spec.params.mode = beepsim::BfwParams::Mode::diameter_tuned;
  } else {
    args.spec.params.p = std::stod(args.p);
  }
  if (args.audit == "none") {
    args.spec.audit = beepsim::AuditPolicy::none;
  } else if (args.audit == "sampled") {
    args.spec.audit = beepsim::AuditPolicy::sampled;
  } else if (args.audit == "all") {
    args.spec.audit = beepsim::AuditPolicy::all;
  } else {
    throw CLI::ValidationError("--audit must be none|sampled|all");
  }

  const auto result = beepsim::sweep(args.spec);

  write_file(args.out, timestamp_line() + result.csv());
  if (!args.summary.empty()) write_file(args.summary, result.summary_json() + "\n");

  for (const auto& s : result.sizes) {
    std::printf("n=%d D=%d p=%g cap=%lld median=%g mean=%g p95=%g nonconverged=%d\n", s.n,
                s.diameter, s.p, static_cast<long long>(s.cap), s.median, s.mean, s.p95,
                s.nonconverged);
  }
  if (result.fit) {
    std::printf("loglog fit: slope=%.4f intercept=%.4f\n", result.fit->slope,
                result.fit->intercept);
  }
  if (!result.audits.clean()) {
    std::printf("audit violations found\n");
    print_audit_summary(result.audits);
    return exit_code::violation;
  }
  if (result.nonconverged_total > 0) {
    std::printf("%d trials hit the round cap\n", result.nonconverged_total);
    return exit_code::cap;
  }
  return exit_code::ok;
}

// ---------------------------------------------------------------- probe

struct ProbeArgs {
  std::string diameters = "8,16,32,64";
  int trials = 100;
  std::uint64_t seed = 1;
  double p = 0.5;
  double cap_multiplier = 50.0;
  int threads = 0;
  std::string out;
};

int cmd_probe(const ProbeArgs& args) {
  const auto result = beepsim::two_leader_probe(parse_int_list(args.diameters), args.trials,
                                                args.seed, args.p, args.cap_multiplier,
                                                args.threads);
  for (const auto& s : result.per_diameter) {
    std::printf("D=%d median=%g mean=%g nonconverged=%d\n", s.diameter, s.median, s.mean,
                s.nonconverged);
  }
  if (result.fit) std::printf("loglog fit: slope=%.4f\n", result.fit->slope);
  if (!args.out.empty()) write_file(args.out, result.summary_json() + "\n");
  for (const auto& s : result.per_diameter) {
    if (s.nonconverged > 0) return exit_code::cap;
  }
  return exit_code::ok;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string trace_path;
  std::string graph;
  std::string p = "0.5";
  std::uint64_t seed = 1;
  std::int64_t rounds = 500;
  bool all = false;
  bool conservation = false, ohm = false, lipschitz = false, traveling = false,
       elimination = false;
  int pairs = 16;
  int walks = 8;
  std::string out;
};

int cmd_verify(const VerifyArgs& args) {
  beepsim::Graph graph;
  beepsim::RunTrace trace;
  if (!args.trace_path.empty()) {
    std::ifstream in(args.trace_path);
    if (!in) throw std::runtime_error("cannot read " + args.trace_path);
    auto loaded = beepsim::load_trace_jsonl(in);
    graph = std::move(loaded.graph);
    trace = std::move(loaded.trace);
  } else if (!args.graph.empty()) {
    const GraphArg g = resolve_graph(args.graph);
    graph = g.graph;
    const auto params = resolve_params(args.p, graph);
    trace = beepsim::run(graph, beepsim::bfw_protocol(params), args.seed, args.rounds,
                         beepsim::StopRule::fixed_rounds, {});
  } else {
    throw CLI::ValidationError("verify needs --trace or --graph");
  }

  beepsim::AuditOptions opts;
  opts.seed = args.seed;
  opts.shortest_path_pairs = args.pairs;
  opts.random_walks = args.walks;
  const bool any = args.conservation || args.ohm || args.lipschitz || args.traveling ||
                   args.elimination;
  if (!args.all && any) {
    opts.conservation = args.conservation;
    opts.ohm = args.ohm;
    opts.lipschitz = args.lipschitz;
    opts.traveling = args.traveling;
    opts.elimination = args.elimination;
  }

  const auto dist = beepsim::distances(graph);
  const auto report = beepsim::audit_all(graph, dist, trace, opts);
  print_audit_summary(report);
  if (!args.out.empty()) write_file(args.out, report.to_json() + "\n");
  if (!report.clean()) {
    std::cout << report.to_json() << "\n";
    return exit_code::violation;
  }
  std::printf("all audits clean over %lld rounds\n",
              static_cast<long long>(trace.rounds_executed));
  return exit_code::ok;
}

// ---------------------------------------------------------------- markov

void emit(const nlohmann::json& j, const std::string& out_path) {
  std::cout << j.dump() << "\n";
  if (!out_path.empty()) write_file(out_path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------- graph

int cmd_graph_info(const std::string& graph_arg) {
  const GraphArg g = resolve_graph(graph_arg);
  const auto dist = beepsim::distances(g.graph);
  nlohmann::json j;
  j["schema"] = "beepsim.graph/1";
  j["n"] = g.graph.n;
  j["edges"] = g.graph.edge_count();
  j["diameter"] = dist.diameter;
  std::cout << j.dump() << "\n";
  return exit_code::ok;
}

int cmd_graph_export(const std::string& graph_arg, const std::string& out_path) {
  const GraphArg g = resolve_graph(graph_arg);
  write_file(out_path, beepsim::serialize_edge_list(g.graph));
  std::printf("wrote %zu edges to %s\n", g.graph.edge_count(), out_path.c_str());
  return exit_code::ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Six-state beep-wave leader election: simulator, auditors, experiments"};
  app.require_subcommand(1);

  // run
  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run one leader election to convergence");
  run_cmd->add_option("--graph", run_args.graph, "Generator descriptor or edge-list file")
      ->required();
  run_cmd->add_option("--p", run_args.p, "Beep probability, or 'diam' for 1/(D+1)");
  run_cmd->add_option("--seed", run_args.seed, "Run seed");
  run_cmd->add_option("--max-rounds", run_args.max_rounds,
                      "Round cap (default 50*D^2*ceil(log2 n), or 50*D*ceil(log2 n) tuned)");
  run_cmd->add_option("--snapshot-every", run_args.snapshot_every, "Trace thinning stride");
  run_cmd->add_flag("--audit", run_args.audit, "Run the full audit suite on the trace");
  run_cmd->add_option("--trace", run_args.trace_path, "Write JSONL trace here");

  // sweep
  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Convergence-time sweep over graph sizes");
  sweep_cmd->add_option("--family", sweep_args.spec.family,
                        "path|cycle|clique|grid|tree|gnp")->required();
  sweep_cmd->add_option("--sizes", sweep_args.sizes, "Comma-separated node counts")->required();
  sweep_cmd->add_option("--p", sweep_args.p, "Beep probability, or 'diam'");
  sweep_cmd->add_option("--trials", sweep_args.spec.trials, "Trials per size");
  sweep_cmd->add_option("--seed", sweep_args.spec.master_seed, "Master seed");
  sweep_cmd->add_option("--cap-multiplier", sweep_args.spec.cap_multiplier, "Round cap factor");
  sweep_cmd->add_option("--threads", sweep_args.spec.threads, "Worker threads (0 = auto)");
  sweep_cmd->add_option("--audit", sweep_args.audit, "none|sampled|all");
  sweep_cmd->add_option("--out", sweep_args.out, "CSV output path");
  sweep_cmd->add_option("--summary", sweep_args.summary, "Summary JSON path");

  // probe
  ProbeArgs probe_args;
  auto* probe_cmd =
      app.add_subcommand("probe", "Two endpoint leaders on a path: elimination-time scaling");
  probe_cmd->add_option("--diameters", probe_args.diameters, "Comma-separated path lengths");
  probe_cmd->add_option("--trials", probe_args.trials, "Trials per diameter");
  probe_cmd->add_option("--seed", probe_args.seed, "Master seed");
  probe_cmd->add_option("--p", probe_args.p, "Beep probability");
  probe_cmd->add_option("--cap-multiplier", probe_args.cap_multiplier, "Round cap factor");
  probe_cmd->add_option("--threads", probe_args.threads, "Worker threads (0 = auto)");
  probe_cmd->add_option("--out", probe_args.out, "Summary JSON path");

  // verify
  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Audit a trace against the flow checks");
  verify_cmd->add_option("--trace", verify_args.trace_path, "JSONL trace to audit");
  verify_cmd->add_option("--graph", verify_args.graph, "Run inline: graph descriptor or file");
  verify_cmd->add_option("--p", verify_args.p, "Inline run beep probability, or 'diam'");
  verify_cmd->add_option("--seed", verify_args.seed, "Inline run seed / audit sampling seed");
  verify_cmd->add_option("--rounds", verify_args.rounds, "Inline run length");
  verify_cmd->add_flag("--all", verify_args.all, "Run every audit (default)");
  verify_cmd->add_flag("--conservation", verify_args.conservation, "Flow conservation audit");
  verify_cmd->add_flag("--ohm", verify_args.ohm, "Endpoint beep-count audit");
  verify_cmd->add_flag("--lipschitz", verify_args.lipschitz, "Beep-count distance audit");
  verify_cmd->add_flag("--traveling", verify_args.traveling, "Beep propagation audit");
  verify_cmd->add_flag("--elimination", verify_args.elimination, "Elimination audit");
  verify_cmd->add_option("--pairs", verify_args.pairs, "Sampled shortest-path pairs");
  verify_cmd->add_option("--walks", verify_args.walks, "Random walks");
  verify_cmd->add_option("--out", verify_args.out, "Report JSON path");

  // markov
  auto* markov_cmd = app.add_subcommand("markov", "Single-node chain experiments");
  markov_cmd->require_subcommand(1);

  double m_p = 0.5;
  std::int64_t m_t = 10000, m_trials = 10000, m_cap = 1000000;
  std::uint64_t m_seed = 1;
  int m_threads = 0, m_barrier = 10, m_n = 1, m_k = 1;
  std::string m_width = "sqrt", m_start = "w", m_out;

  auto* stationary_cmd = markov_cmd->add_subcommand("stationary", "Stationary distribution");
  stationary_cmd->add_option("--p", m_p, "Chain probability")->required();
  stationary_cmd->add_option("--out", m_out, "JSON path");

  auto* simulate_cmd = markov_cmd->add_subcommand("simulate", "Visit-count statistics");
  simulate_cmd->add_option("--p", m_p)->required();
  simulate_cmd->add_option("--t", m_t, "Horizon");
  simulate_cmd->add_option("--trials", m_trials);
  simulate_cmd->add_option("--seed", m_seed);
  simulate_cmd->add_option("--start", m_start, "w (waiting) or pi (stationary)");
  simulate_cmd->add_option("--threads", m_threads);
  simulate_cmd->add_option("--out", m_out, "JSON path");

  auto* anticonc_cmd = markov_cmd->add_subcommand("anticonc", "Sliding-window mass of visits");
  anticonc_cmd->add_option("--p", m_p)->required();
  anticonc_cmd->add_option("--t", m_t, "Horizon");
  anticonc_cmd->add_option("--trials", m_trials);
  anticonc_cmd->add_option("--width", m_width, "Window half-width, or 'sqrt' for ceil(sqrt t)");
  anticonc_cmd->add_option("--seed", m_seed);
  anticonc_cmd->add_option("--start", m_start, "w or pi");
  anticonc_cmd->add_option("--threads", m_threads);
  anticonc_cmd->add_option("--out", m_out, "JSON path");

  auto* sigma_cmd = markov_cmd->add_subcommand("sigma", "Beep-count divergence hitting times");
  sigma_cmd->add_option("--p", m_p)->required();
  sigma_cmd->add_option("--D,--barrier", m_barrier, "Divergence barrier");
  sigma_cmd->add_option("--trials", m_trials);
  sigma_cmd->add_option("--cap", m_cap, "Round cap per trial");
  sigma_cmd->add_option("--seed", m_seed);
  sigma_cmd->add_option("--threads", m_threads);
  sigma_cmd->add_option("--out", m_out, "JSON path");

  auto* identity_cmd =
      markov_cmd->add_subcommand("identity", "Geometric-sum tail vs binomial tail");
  identity_cmd->add_option("--n", m_n, "Number of geometric summands")->required();
  identity_cmd->add_option("--k", m_k, "Tail threshold")->required();
  identity_cmd->add_option("--p", m_p)->required();
  identity_cmd->add_option("--out", m_out, "JSON path");

  // graph
  auto* graph_cmd = app.add_subcommand("graph", "Graph utilities");
  graph_cmd->require_subcommand(1);
  std::string g_arg, g_out;
  auto* info_cmd = graph_cmd->add_subcommand("info", "Node count, edges, diameter");
  info_cmd->add_option("--graph", g_arg, "Descriptor or edge-list file")->required();
  auto* export_cmd = graph_cmd->add_subcommand("export", "Write edge list");
  export_cmd->add_option("--graph", g_arg, "Descriptor or edge-list file")->required();
  export_cmd->add_option("--out", g_out, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_code::ok : exit_code::usage;
  }

  try {
    if (*run_cmd) return cmd_run(run_args);
    if (*sweep_cmd) return cmd_sweep(sweep_args);
    if (*probe_cmd) return cmd_probe(probe_args);
    if (*verify_cmd) return cmd_verify(verify_args);
    if (*stationary_cmd) {
      const auto pi = beepsim::stationary({m_p});
      emit({{"schema", "beepsim.markov/1"}, {"p", m_p}, {"pi", pi}}, m_out);
      return exit_code::ok;
    }
    if (*simulate_cmd) {
      const auto start = m_start == "pi" ? beepsim::ChainStart::stationary_law
                                         : beepsim::ChainStart::waiting;
      const auto stats = beepsim::simulate_chain({m_p}, m_t, m_seed, m_trials, start, m_threads);
      const auto pi = beepsim::stationary({m_p});
      emit({{"schema", "beepsim.markov/1"},
            {"p", m_p},
            {"t", m_t},
            {"trials", m_trials},
            {"start", m_start == "pi" ? "stationary" : "waiting"},
            {"pi", pi},
            {"visit_mean", stats.mean_visits},
            {"visit_fraction", stats.visit_fraction},
            {"visit_var", stats.visits_beeping_variance}},
           m_out);
      return exit_code::ok;
    }
    if (*anticonc_cmd) {
      const std::int64_t width =
          m_width == "sqrt"
              ? static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(m_t))))
              : std::stoll(m_width);
      const auto start = m_start == "pi" ? beepsim::ChainStart::stationary_law
                                         : beepsim::ChainStart::waiting;
      const double estimate =
          beepsim::anticoncentration_sup({m_p}, m_t, m_seed, m_trials, width, start, m_threads);
      emit({{"schema", "beepsim.markov/1"},
            {"p", m_p},
            {"t", m_t},
            {"trials", m_trials},
            {"width", width},
            {"anticonc_sup", estimate}},
           m_out);
      return exit_code::ok;
    }
    if (*sigma_cmd) {
      const auto samples = beepsim::sigma_hitting({m_p}, m_barrier, m_seed, m_trials, m_cap,
                                                  m_threads);
      nlohmann::json surv = nlohmann::json::array();
      const double dd = static_cast<double>(m_barrier) * m_barrier;
      for (int k = 1; dd * k <= static_cast<double>(samples.cap); ++k) {
        const double s = samples.survival(dd * k);
        surv.push_back({{"k", k}, {"survival", s}});
        if (s == 0.0) break;
      }
      emit({{"schema", "beepsim.markov/1"},
            {"p", m_p},
            {"D", m_barrier},
            {"trials", m_trials},
            {"cap", samples.cap},
            {"capped", samples.capped},
            {"median", samples.samples.empty() ? -1.0 : samples.median()},
            {"survival", surv}},
           m_out);
      return exit_code::ok;
    }
    if (*identity_cmd) {
      const auto r = beepsim::geom_binom_identity(m_n, m_k, m_p);
      emit({{"schema", "beepsim.markov/1"},
            {"n", m_n},
            {"k", m_k},
            {"p", m_p},
            {"lhs", r.lhs},
            {"rhs", r.rhs},
            {"equal", r.equal},
            {"rhs_unshifted", r.rhs_unshifted},
            {"equal_unshifted", r.equal_unshifted}},
           m_out);
      return exit_code::ok;
    }
    if (*info_cmd) return cmd_graph_info(g_arg);
    if (*export_cmd) return cmd_graph_export(g_arg, g_out);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code::usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::usage;
  }
  return exit_code::usage;
}
