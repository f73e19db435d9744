#include "beepsim/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "beepsim/parallel.hpp"

#include "json.hpp"

namespace beepsim {

namespace {

constexpr std::uint64_t kGraphSeedSalt = 0x677261706873ull;  // graph-construction stream

int ceil_log2(int n) {
  return n <= 1 ? 0 : std::bit_width(static_cast<unsigned>(n - 1));
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double quantile(std::vector<std::int64_t> values, double q) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  if (q >= 1.0) return static_cast<double>(values.back());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return static_cast<double>(values[lo]);
  return static_cast<double>(values[lo]) * (1 - frac) +
         static_cast<double>(values[lo + 1]) * frac;
}

double median_of(const std::vector<std::int64_t>& values) { return quantile(values, 0.5); }

std::string graph_spec_for(const SweepSpec& spec, int n, int size_index) {
  const auto graph_seed = derive_seed(spec.master_seed ^ kGraphSeedSalt,
                                      static_cast<std::uint64_t>(size_index));
  if (spec.family == "path" || spec.family == "cycle" || spec.family == "clique") {
    return spec.family + ":" + std::to_string(n);
  }
  if (spec.family == "grid") {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (side * side != n) {
      throw std::invalid_argument("grid family needs square sizes, got " + std::to_string(n));
    }
    return "grid:" + std::to_string(side) + "x" + std::to_string(side);
  }
  if (spec.family == "tree") {
    return "tree:" + std::to_string(n) + ":" + std::to_string(graph_seed % 1000000);
  }
  if (spec.family == "gnp") {
    const double edge_p = n <= 2 ? 1.0 : std::min(1.0, 2.0 * std::log(n) / n);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", edge_p);
    return "gnp:" + std::to_string(n) + ":" + buf + ":" + std::to_string(graph_seed % 1000000);
  }
  throw std::invalid_argument("unknown sweep family '" + spec.family + "'");
}

std::optional<LogLogFit> fit_medians(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) return std::nullopt;
  for (const auto& [x, y] : points) {
    if (!(x > 0) || !(y > 0)) return std::nullopt;
  }
  return fit_loglog(points);
}

nlohmann::json fit_json(const std::optional<LogLogFit>& fit) {
  if (!fit) return nullptr;
  return {{"slope", fit->slope}, {"intercept", fit->intercept}};
}

}  // namespace

LogLogFit fit_loglog(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("fit needs at least 3 points");
  std::vector<double> lx, ly;
  for (const auto& [x, y] : points) {
    if (!(x > 0) || !(y > 0)) throw std::invalid_argument("fit needs positive coordinates");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  const double n = static_cast<double>(points.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0) throw std::invalid_argument("fit x values are degenerate");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    fit.residuals.push_back(ly[i] - (fit.intercept + fit.slope * lx[i]));
  }
  return fit;
}

void SweepSpec::validate() const {
  if (family != "path" && family != "cycle" && family != "clique" && family != "grid" &&
      family != "tree" && family != "gnp") {
    throw std::invalid_argument("unknown sweep family '" + family + "'");
  }
  if (sizes.empty()) throw std::invalid_argument("sweep needs at least one size");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) throw std::invalid_argument("sweep sizes must be >= 1");
    if (i > 0 && sizes[i] <= sizes[i - 1]) {
      throw std::invalid_argument("sweep sizes must be strictly ascending");
    }
  }
  if (trials < 1) throw std::invalid_argument("sweep needs trials >= 1");
  if (cap_multiplier < 1) throw std::invalid_argument("cap multiplier must be >= 1");
  if (params.mode == BfwParams::Mode::uniform) params.validate();
}

std::int64_t round_cap(const SweepSpec& spec, int n, int diameter) {
  const double d = static_cast<double>(diameter);
  const double base = spec.params.mode == BfwParams::Mode::diameter_tuned ? d : d * d;
  return static_cast<std::int64_t>(std::ceil(spec.cap_multiplier * base * ceil_log2(n)));
}

SweepResult sweep(const SweepSpec& spec) {
  spec.validate();
  const int n_sizes = static_cast<int>(spec.sizes.size());

  struct SizeContext {
    Graph graph;
    DistanceTable dist;
    BfwParams params;
    ProtocolDefinition proto;
    std::int64_t cap = 0;
  };
  std::vector<SizeContext> contexts(n_sizes);
  for (int i = 0; i < n_sizes; ++i) {
    auto& ctx = contexts[i];
    ctx.graph = generate(graph_spec_for(spec, spec.sizes[i], i));
    ctx.dist = distances(ctx.graph);
    ctx.params = spec.params;
    if (ctx.params.mode == BfwParams::Mode::diameter_tuned) {
      ctx.params.diameter = ctx.dist.diameter;
    }
    ctx.proto = bfw_protocol(ctx.params);
    ctx.cap = round_cap(spec, spec.sizes[i], ctx.dist.diameter);
  }

  const std::int64_t total = static_cast<std::int64_t>(n_sizes) * spec.trials;
  std::vector<TrialOutcome> outcomes(total);
  std::vector<FlowReport> audit_reports(total);
  std::vector<char> audited(total, 0);
  for (std::int64_t g = 0; g < total; ++g) {
    const int trial = static_cast<int>(g % spec.trials);
    audited[g] = spec.audit == AuditPolicy::all ||
                 (spec.audit == AuditPolicy::sampled && trial == 0);
  }

  parallel_for(total, spec.threads, [&](std::int64_t g) {
    const int size_index = static_cast<int>(g / spec.trials);
    const int trial = static_cast<int>(g % spec.trials);
    const auto& ctx = contexts[size_index];
    const std::uint64_t seed = derive_seed(spec.master_seed, static_cast<std::uint64_t>(g));

    TraceOptions opts;
    opts.record_snapshots = audited[g];
    opts.record_beeps = audited[g];
    const RunTrace trace =
        run(ctx.graph, ctx.proto, seed, ctx.cap, StopRule::single_leader, opts);

    auto& out = outcomes[g];
    out.n = spec.sizes[size_index];
    out.trial = trial;
    out.seed = seed;
    out.converged = trace.converged();
    out.convergence_round = trace.convergence_round.value_or(-1);
    out.rounds_executed = trace.rounds_executed;

    if (audited[g]) {
      AuditOptions audit_opts;
      audit_opts.seed = derive_seed(seed, 0xa0d17);
      audit_reports[g] = audit_all(ctx.graph, ctx.dist, trace, audit_opts);
    } else {
      // Leader-count sanity is cheap enough to keep on for every trial.
      FlowReport rep;
      int prev = -1;
      for (std::size_t t = 0; t < trace.leader_count_history.size(); ++t) {
        const int leaders = trace.leader_count_history[t];
        if (leaders >= 1) {
          rep.record_pass("leader_floor");
        } else {
          rep.record_violation("leader_floor", static_cast<std::int64_t>(t),
                               "leader count dropped to " + std::to_string(leaders));
        }
        if (prev >= 0 && leaders > prev) {
          rep.record_violation("leader_monotone", static_cast<std::int64_t>(t),
                               "leader count rose");
        } else if (prev >= 0) {
          rep.record_pass("leader_monotone");
        }
        prev = leaders;
      }
      audit_reports[g] = std::move(rep);
    }
  });

  SweepResult result;
  result.spec = spec;
  result.trials = std::move(outcomes);
  for (std::int64_t g = 0; g < total; ++g) result.audits.merge(audit_reports[g]);

  std::vector<std::pair<double, double>> fit_points;
  for (int i = 0; i < n_sizes; ++i) {
    const auto& ctx = contexts[i];
    SizeStats stats;
    stats.n = spec.sizes[i];
    stats.diameter = ctx.dist.diameter;
    stats.p = ctx.params.effective_p();
    stats.cap = ctx.cap;
    std::vector<std::int64_t> rounds;
    for (int trial = 0; trial < spec.trials; ++trial) {
      const auto& out = result.trials[static_cast<std::size_t>(i) * spec.trials + trial];
      if (out.converged) {
        rounds.push_back(out.convergence_round);
      } else {
        ++stats.nonconverged;
      }
    }
    if (!rounds.empty()) {
      stats.median = median_of(rounds);
      stats.mean = std::accumulate(rounds.begin(), rounds.end(), 0.0) /
                   static_cast<double>(rounds.size());
      stats.p95 = quantile(rounds, 0.95);
    }
    result.nonconverged_total += stats.nonconverged;
    result.sizes.push_back(stats);
    if (stats.median > 0) {
      fit_points.emplace_back(static_cast<double>(stats.n), stats.median);
    }
  }
  result.fit = fit_medians(fit_points);
  return result;
}

std::string SweepResult::csv() const {
  std::string out;
  out += "# schema: beepsim.sweep.csv/1\n";
  out += "# spec: family=" + spec.family + " trials=" + std::to_string(spec.trials) +
         " seed=" + std::to_string(spec.master_seed) +
         " cap_multiplier=" + format_double(spec.cap_multiplier) + "\n";
  out += "family,n,D,p_mode,p,trial,seed,converged,convergence_round,rounds_executed\n";
  const char* mode =
      spec.params.mode == BfwParams::Mode::diameter_tuned ? "diameter_tuned" : "uniform";
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    const auto& stats = sizes[i / spec.trials];
    out += spec.family;
    out += ',' + std::to_string(t.n);
    out += ',' + std::to_string(stats.diameter);
    out += ',';
    out += mode;
    out += ',' + format_double(stats.p);
    out += ',' + std::to_string(t.trial);
    out += ',' + std::to_string(t.seed);
    out += ',' + std::to_string(t.converged ? 1 : 0);
    out += ',' + std::to_string(t.convergence_round);
    out += ',' + std::to_string(t.rounds_executed);
    out += '\n';
  }
  return out;
}

std::string SweepResult::summary_json() const {
  nlohmann::json j;
  j["schema"] = "beepsim.sweep/1";
  j["spec"] = {
      {"family", spec.family},
      {"sizes", spec.sizes},
      {"p_mode",
       spec.params.mode == BfwParams::Mode::diameter_tuned ? "diameter_tuned" : "uniform"},
      {"p", spec.params.p},
      {"trials", spec.trials},
      {"master_seed", spec.master_seed},
      {"cap_multiplier", spec.cap_multiplier},
  };
  auto& arr = j["sizes"] = nlohmann::json::array();
  for (const auto& s : sizes) {
    arr.push_back({{"n", s.n},
                   {"D", s.diameter},
                   {"p", s.p},
                   {"cap", s.cap},
                   {"median", s.median},
                   {"mean", s.mean},
                   {"p95", s.p95},
                   {"nonconverged", s.nonconverged}});
  }
  j["fit"] = fit_json(fit);
  j["nonconverged_total"] = nonconverged_total;
  j["audits"] = nlohmann::json::parse(audits.to_json());
  return j.dump(2);
}

ProbeResult two_leader_probe(const std::vector<int>& diameters, int trials,
                             std::uint64_t master_seed, double p, double cap_multiplier,
                             int threads) {
  if (diameters.empty()) throw std::invalid_argument("probe needs at least one diameter");
  for (int d : diameters) {
    if (d < 1) throw std::invalid_argument("probe diameters must be >= 1");
  }
  if (trials < 1) throw std::invalid_argument("probe needs trials >= 1");

  BfwParams params;
  params.p = p;
  const ProtocolDefinition proto = bfw_protocol(params);

  ProbeResult result;
  result.p = p;
  std::vector<std::pair<double, double>> fit_points;
  for (std::size_t di = 0; di < diameters.size(); ++di) {
    const int d = diameters[di];
    const int n = d + 1;
    const Graph graph = generate("path:" + std::to_string(n));
    const std::int64_t cap = static_cast<std::int64_t>(
        std::ceil(cap_multiplier * static_cast<double>(d) * d * ceil_log2(n)));

    // Both endpoints start as waiting leaders, everyone else as a waiting
    // non-leader; this keeps the all-waiting, at-least-one-leader start.
    Configuration start;
    start.state.assign(n, static_cast<std::uint8_t>(bfw_state::waiting));
    start.state.front() = static_cast<std::uint8_t>(bfw_state::leader_waiting);
    start.state.back() = static_cast<std::uint8_t>(bfw_state::leader_waiting);

    auto endpoint_eliminated = [](const Configuration& c) {
      return !is_leader(c.state.front()) || !is_leader(c.state.back());
    };

    std::vector<std::int64_t> elim(trials, -1);
    parallel_for(trials, threads, [&](std::int64_t trial) {
      const std::uint64_t seed = derive_seed(
          master_seed, di * static_cast<std::uint64_t>(trials) + static_cast<std::uint64_t>(trial));
      TraceOptions opts;
      opts.record_snapshots = false;
      opts.record_beeps = false;
      const RunTrace trace = run_from(graph, proto, start, seed, cap, StopRule::fixed_rounds,
                                      opts, endpoint_eliminated);
      if (endpoint_eliminated(trace.final_snapshot())) elim[trial] = trace.rounds_executed;
    });

    ProbeStats stats;
    stats.diameter = d;
    for (auto e : elim) {
      if (e < 0) {
        ++stats.nonconverged;
      } else {
        stats.samples.push_back(e);
      }
    }
    if (!stats.samples.empty()) {
      stats.median = median_of(stats.samples);
      stats.mean = std::accumulate(stats.samples.begin(), stats.samples.end(), 0.0) /
                   static_cast<double>(stats.samples.size());
    }
    if (stats.median > 0) fit_points.emplace_back(static_cast<double>(d), stats.median);
    result.per_diameter.push_back(std::move(stats));
  }
  result.fit = fit_medians(fit_points);
  return result;
}

std::string ProbeResult::summary_json() const {
  nlohmann::json j;
  j["schema"] = "beepsim.probe/1";
  j["p"] = p;
  auto& arr = j["per_diameter"] = nlohmann::json::array();
  for (const auto& s : per_diameter) {
    arr.push_back({{"D", s.diameter},
                   {"median", s.median},
                   {"mean", s.mean},
                   {"trials", static_cast<std::int64_t>(s.samples.size()) + s.nonconverged},
                   {"nonconverged", s.nonconverged}});
  }
  j["fit"] = fit_json(fit);
  return j.dump(2);
}

}  // namespace beepsim
