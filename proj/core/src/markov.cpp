#include "beepsim/markov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beepsim/parallel.hpp"
#include "beepsim/rng.hpp"

namespace beepsim {

namespace {

// One chain round; draws are consumed only in the waiting state, the other
// two transitions are deterministic.
inline int chain_step(int state, double p, Rng& rng) {
  switch (state) {
    case chain_waiting:
      return rng.u01() < p ? chain_beeping : chain_waiting;
    case chain_beeping:
      return chain_frozen;
    default:
      return chain_waiting;
  }
}

int sample_start(ChainStart start, double p, Rng& rng) {
  if (start == ChainStart::waiting) return chain_waiting;
  const double denom = 2 * p + 1;
  const double draw = rng.u01();
  if (draw < 1.0 / denom) return chain_waiting;
  if (draw < (1.0 + p) / denom) return chain_beeping;
  return chain_frozen;
}

struct TrialVisits {
  std::int32_t w = 0, b = 0, f = 0;
};

// Visit counts over rounds 1..horizon with X_1 drawn per `start`.
TrialVisits run_trial(double p, std::int64_t horizon, std::uint64_t seed, ChainStart start) {
  Rng rng(seed);
  TrialVisits v;
  int state = sample_start(start, p, rng);
  for (std::int64_t s = 1; s <= horizon; ++s) {
    if (s > 1) state = chain_step(state, p, rng);
    switch (state) {
      case chain_waiting: ++v.w; break;
      case chain_beeping: ++v.b; break;
      default: ++v.f; break;
    }
  }
  return v;
}

std::vector<TrialVisits> run_trials(const ChainSpec& spec, std::int64_t horizon,
                                    std::uint64_t seed, std::int64_t trials,
                                    ChainStart start, int threads) {
  std::vector<TrialVisits> all(trials);
  parallel_for(trials, resolve_threads(threads), [&](std::int64_t i) {
    all[i] = run_trial(spec.p, horizon, derive_seed(seed, static_cast<std::uint64_t>(i)), start);
  });
  return all;
}

double log_binom_pmf(std::int64_t m, std::int64_t j, double p) {
  double log_choose = std::lgamma(static_cast<double>(m) + 1) -
                      std::lgamma(static_cast<double>(j) + 1) -
                      std::lgamma(static_cast<double>(m - j) + 1);
  double log_p_part = j == 0 ? 0.0 : j * std::log(p);
  double log_q_part = m == j ? 0.0 : (m - j) * std::log1p(-p);
  return log_choose + log_p_part + log_q_part;
}

// P(Bin(m, p) <= j), direct summation.
double binom_cdf(std::int64_t m, std::int64_t j, double p) {
  if (j < 0) return 0.0;
  if (j >= m) return 1.0;
  double sum = 0;
  for (std::int64_t i = 0; i <= j; ++i) sum += std::exp(log_binom_pmf(m, i, p));
  return std::min(sum, 1.0);
}

}  // namespace

void ChainSpec::validate() const {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("chain probability must be in (0,1)");
  }
}

std::array<std::array<double, 3>, 3> transition_matrix(const ChainSpec& spec) {
  spec.validate();
  return {{{1 - spec.p, spec.p, 0.0}, {0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}}};
}

std::array<double, 3> stationary(const ChainSpec& spec) {
  spec.validate();
  const double denom = 2 * spec.p + 1;
  const std::array<double, 3> pi = {1 / denom, spec.p / denom, spec.p / denom};
  const auto P = transition_matrix(spec);
  for (int j = 0; j < 3; ++j) {
    double out = 0;
    for (int i = 0; i < 3; ++i) out += pi[i] * P[i][j];
    if (std::abs(out - pi[j]) > 1e-12) {
      throw std::logic_error("stationary distribution check failed");
    }
  }
  return pi;
}

ChainStats simulate_chain(const ChainSpec& spec, std::int64_t horizon, std::uint64_t seed,
                          std::int64_t trials, ChainStart start, int threads) {
  spec.validate();
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");

  const auto visits = run_trials(spec, horizon, seed, trials, start, threads);

  ChainStats stats;
  stats.p = spec.p;
  stats.horizon = horizon;
  stats.trials = trials;
  stats.start = start;
  std::int64_t max_b = 0;
  for (const auto& v : visits) max_b = std::max<std::int64_t>(max_b, v.b);
  stats.histogram_beeping.assign(max_b + 1, 0);
  double sw = 0, sb = 0, sf = 0;
  for (const auto& v : visits) {
    if (v.w + v.b + v.f != horizon) throw std::logic_error("visit counts do not sum to horizon");
    sw += v.w;
    sb += v.b;
    sf += v.f;
    ++stats.histogram_beeping[v.b];
  }
  stats.mean_visits = {sw / trials, sb / trials, sf / trials};
  for (int i = 0; i < 3; ++i) stats.visit_fraction[i] = stats.mean_visits[i] / horizon;
  // Variance from the histogram: exact and independent of summation order.
  const double mean_b = stats.mean_visits[1];
  double ss = 0;
  for (std::size_t value = 0; value < stats.histogram_beeping.size(); ++value) {
    const double d = static_cast<double>(value) - mean_b;
    ss += d * d * stats.histogram_beeping[value];
  }
  stats.visits_beeping_variance = trials > 1 ? ss / (trials - 1) : 0.0;
  return stats;
}

double anticoncentration_sup(const ChainSpec& spec, std::int64_t horizon, std::uint64_t seed,
                             std::int64_t trials, std::int64_t width, ChainStart start,
                             int threads) {
  if (horizon < 1000) throw std::invalid_argument("anticoncentration needs horizon >= 1000");
  if (trials < 100) {
    throw std::invalid_argument("anticoncentration needs >= 100 trials; got " +
                                std::to_string(trials));
  }
  if (width < 0) throw std::invalid_argument("width must be >= 0");
  const auto stats = simulate_chain(spec, horizon, seed, trials, start, threads);
  const auto& hist = stats.histogram_beeping;
  // Max mass of any window [m-width, m+width] over integer centers m.
  std::vector<std::int64_t> prefix(hist.size() + 1, 0);
  for (std::size_t i = 0; i < hist.size(); ++i) prefix[i + 1] = prefix[i] + hist[i];
  std::int64_t best = 0;
  const std::int64_t size = static_cast<std::int64_t>(hist.size());
  for (std::int64_t m = 0; m < size; ++m) {
    const std::int64_t lo = std::max<std::int64_t>(0, m - width);
    const std::int64_t hi = std::min<std::int64_t>(size, m + width + 1);
    best = std::max(best, prefix[hi] - prefix[lo]);
  }
  return static_cast<double>(best) / static_cast<double>(trials);
}

double SigmaSamples::median() const {
  if (samples.empty()) throw std::logic_error("no uncapped sigma samples");
  std::vector<std::int64_t> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  return m % 2 ? static_cast<double>(sorted[m / 2])
               : (static_cast<double>(sorted[m / 2 - 1]) + static_cast<double>(sorted[m / 2])) / 2;
}

double SigmaSamples::survival(double threshold) const {
  if (threshold > static_cast<double>(cap)) {
    throw std::invalid_argument("survival threshold beyond cap");
  }
  std::int64_t above = capped;
  for (auto s : samples) above += s > threshold;
  return static_cast<double>(above) / static_cast<double>(samples.size() + capped);
}

SigmaSamples sigma_hitting(const ChainSpec& spec, int barrier, std::uint64_t seed,
                           std::int64_t trials, std::int64_t cap, int threads) {
  spec.validate();
  if (barrier < 0) throw std::invalid_argument("barrier must be >= 0");
  if (trials < 1 || cap < 1) throw std::invalid_argument("trials and cap must be >= 1");

  std::vector<std::int64_t> raw(trials, -1);
  parallel_for(trials, resolve_threads(threads), [&](std::int64_t i) {
    Rng rng_u(derive_seed(seed, static_cast<std::uint64_t>(2 * i)));
    Rng rng_v(derive_seed(seed, static_cast<std::uint64_t>(2 * i + 1)));
    int su = chain_waiting, sv = chain_waiting;
    std::int64_t diff = 0;
    for (std::int64_t t = 1; t <= cap; ++t) {
      if (t > 1) {
        su = chain_step(su, spec.p, rng_u);
        sv = chain_step(sv, spec.p, rng_v);
      }
      diff += (su == chain_beeping) - (sv == chain_beeping);
      if (diff > barrier || -diff > barrier) {
        raw[i] = t;
        break;
      }
    }
  });

  SigmaSamples out;
  out.barrier = barrier;
  out.cap = cap;
  for (auto s : raw) {
    if (s < 0) {
      ++out.capped;
    } else {
      out.samples.push_back(s);
    }
  }
  return out;
}

GeomBinomIdentity geom_binom_identity(int n, int k, double p) {
  if (n < 1 || k < 1) throw std::invalid_argument("n and k must be >= 1");
  if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("p must be in (0,1)");

  GeomBinomIdentity result;

  // P(sum <= k-1) by DP over the exact mass of partial sums; each geometric
  // contributes at least 1, so sums below n are impossible.
  const double q = 1 - p;
  std::vector<double> mass(static_cast<std::size_t>(k), 0.0);  // mass[s] = P(sum_i = s)
  mass[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    std::vector<double> next(mass.size(), 0.0);
    for (int s = i; s < k; ++s) {
      double geom = p;  // P(W = j) = p q^{j-1}
      for (int j = 1; j <= s - (i - 1); ++j) {
        next[s] += mass[s - j] * geom;
        geom *= q;
      }
    }
    mass.swap(next);
  }
  double below = 0;
  for (double m : mass) below += m;
  result.lhs = 1.0 - below;

  result.rhs = binom_cdf(k - 1, n - 1, p);
  result.rhs_unshifted = binom_cdf(k, n, p);
  result.equal = std::abs(result.lhs - result.rhs) <= 1e-10;
  result.equal_unshifted = std::abs(result.lhs - result.rhs_unshifted) <= 1e-10;
  return result;
}

}  // namespace beepsim
