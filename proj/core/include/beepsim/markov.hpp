#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace beepsim {

// Single-node chain over {waiting, beeping, frozen}: from waiting, beep
// with probability p, otherwise keep waiting; a beep is followed by one
// frozen round, then waiting again.
struct ChainSpec {
  double p = 0.5;
  void validate() const;  // requires 0 < p < 1
};

inline constexpr int chain_waiting = 0;
inline constexpr int chain_beeping = 1;
inline constexpr int chain_frozen = 2;

std::array<std::array<double, 3>, 3> transition_matrix(const ChainSpec& spec);

// (1/(2p+1), p/(2p+1), p/(2p+1)); checked against the transition matrix to
// 1e-12 before returning.
std::array<double, 3> stationary(const ChainSpec& spec);

enum class ChainStart { waiting, stationary_law };

struct ChainStats {
  double p = 0;
  std::int64_t horizon = 0;  // t; visits are counted over rounds 1..t
  std::int64_t trials = 0;
  ChainStart start = ChainStart::waiting;
  std::array<double, 3> mean_visits{};
  std::array<double, 3> visit_fraction{};
  double visits_beeping_variance = 0;  // sample variance of N_t(beeping)
  std::vector<std::int64_t> histogram_beeping;  // index = N_t(beeping)
};

// Deterministic in (spec, horizon, seed, trials, start); the thread count
// does not affect results (per-trial seeds, aggregation in trial order).
ChainStats simulate_chain(const ChainSpec& spec, std::int64_t horizon,
                          std::uint64_t seed, std::int64_t trials,
                          ChainStart start = ChainStart::waiting, int threads = 1);

// Estimates sup over integers m of P(|N_t(beeping) - m| <= width) from the
// histogram of N_t(beeping) over trials, via a sliding window of size
// 2*width+1. Requires horizon >= 1000 and trials >= 100; throws otherwise.
double anticoncentration_sup(const ChainSpec& spec, std::int64_t horizon,
                             std::uint64_t seed, std::int64_t trials,
                             std::int64_t width,
                             ChainStart start = ChainStart::waiting,
                             int threads = 1);

struct SigmaSamples {
  int barrier = 0;  // D
  std::int64_t cap = 0;
  std::int64_t capped = 0;               // trials that never hit within cap
  std::vector<std::int64_t> samples;     // hitting rounds of uncapped trials

  double median() const;                 // over uncapped samples
  // P(sigma > threshold); capped trials count as exceeding any threshold
  // within the cap.
  double survival(double threshold) const;
};

// Per trial, runs two independent chains (both started waiting) and records
// the first round where their cumulative beep counts differ by more than
// `barrier`.
SigmaSamples sigma_hitting(const ChainSpec& spec, int barrier, std::uint64_t seed,
                           std::int64_t trials, std::int64_t cap, int threads = 1);

// P(W_1+...+W_n >= k) for i.i.d. geometric W_i on {1,2,...} with success
// probability p, computed exactly by dynamic programming, against two
// binomial-tail forms. The shifted form P(Bin(k-1,p) <= n-1) is the one the
// sum tail actually equals ("the n-th success happens at trial >= k"); the
// unshifted form P(Bin(k,p) <= n) is kept for comparison and already fails
// at n = 1, k = 2.
struct GeomBinomIdentity {
  double lhs = 0;              // P(sum >= k), exact DP
  double rhs = 0;              // P(Bin(k-1, p) <= n-1)
  double rhs_unshifted = 0;    // P(Bin(k, p) <= n)
  bool equal = false;          // |lhs - rhs| <= 1e-10
  bool equal_unshifted = false;
};

GeomBinomIdentity geom_binom_identity(int n, int k, double p);

}  // namespace beepsim
