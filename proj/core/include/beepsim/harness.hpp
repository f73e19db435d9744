#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "beepsim/bfw.hpp"
#include "beepsim/engine.hpp"
#include "beepsim/flowcheck.hpp"

namespace beepsim {

struct LogLogFit {
  double slope = 0;
  double intercept = 0;
  std::vector<double> residuals;
};

// Ordinary least squares on (log x, log y). Requires >= 3 points with
// positive coordinates and non-degenerate x values; throws otherwise.
LogLogFit fit_loglog(const std::vector<std::pair<double, double>>& points);

enum class AuditPolicy { none, sampled, all };

struct SweepSpec {
  std::string family;        // path | cycle | clique | grid | tree | gnp
  std::vector<int> sizes;    // ascending
  BfwParams params;          // diameter_tuned mode fills D per size
  int trials = 100;
  std::uint64_t master_seed = 1;
  double cap_multiplier = 50.0;
  int threads = 0;           // 0 = hardware parallelism
  AuditPolicy audit = AuditPolicy::sampled;

  void validate() const;
};

// Round cap for one run: multiplier * D^2 * ceil(log2 n) in uniform mode,
// multiplier * D * ceil(log2 n) in diameter-tuned mode.
std::int64_t round_cap(const SweepSpec& spec, int n, int diameter);

struct TrialOutcome {
  int n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  bool converged = false;
  std::int64_t convergence_round = -1;  // -1 when not converged
  std::int64_t rounds_executed = 0;
};

struct SizeStats {
  int n = 0;
  int diameter = 0;
  double p = 0;
  std::int64_t cap = 0;
  double median = 0;
  double mean = 0;
  double p95 = 0;
  int nonconverged = 0;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<TrialOutcome> trials;  // ordered by (size, trial)
  std::vector<SizeStats> sizes;
  // log median convergence round vs log n; needs >= 3 sizes with positive
  // medians.
  std::optional<LogLogFit> fit;
  int nonconverged_total = 0;
  FlowReport audits;                 // merged over audited trials

  // Deterministic CSV body (no timestamp); columns:
  // family,n,D,p_mode,p,trial,seed,converged,convergence_round,rounds_executed
  std::string csv() const;
  std::string summary_json() const;
};

// Runs trials for every size concurrently with per-trial derived seeds.
// Trials that hit the round cap are recorded as non-convergent; the sweep
// still completes. Reproducible from (spec, master_seed) at any thread
// count.
SweepResult sweep(const SweepSpec& spec);

struct ProbeStats {
  int diameter = 0;
  double median = 0;
  double mean = 0;
  int nonconverged = 0;
  std::vector<std::int64_t> samples;  // elimination rounds
};

struct ProbeResult {
  double p = 0.5;
  std::vector<ProbeStats> per_diameter;
  std::optional<LogLogFit> fit;  // log median elimination round vs log D
  std::string summary_json() const;
};

// Path of length D with leaders injected at both endpoints (all other
// nodes start as waiting non-leaders); measures rounds until one endpoint
// is eliminated.
ProbeResult two_leader_probe(const std::vector<int>& diameters, int trials,
                             std::uint64_t master_seed, double p = 0.5,
                             double cap_multiplier = 50.0, int threads = 0);

}  // namespace beepsim
