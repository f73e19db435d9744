#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace beepsim {

// Discrete distribution over successor states. Outcomes keep construction
// order and sampling walks the cumulative sum in that order, so a two-point
// transition built as {target w.p. p, fallback w.p. 1-p} takes the target
// exactly when draw < p.
struct Transition {
  struct Outcome {
    int state;
    double prob;
  };
  std::vector<Outcome> outcomes;

  bool deterministic() const { return outcomes.size() == 1; }
  int sample(double draw) const;

  static Transition to(int state) { return {{{state, 1.0}}}; }
  // Degenerate coins (p exactly 0 or 1) collapse to a deterministic
  // transition so they consume no draw.
  static Transition coin(int target, double p, int fallback) {
    if (p == 1.0) return to(target);
    if (p == 0.0) return to(fallback);
    return {{{target, p}, {fallback, 1.0 - p}}};
  }
};

// Probabilistic state machine of the synchronous beeping model. States are
// dense indices; `beeping` marks the beeping set, its complement is the
// listening set. A node in a beeping state always transitions via
// delta_heard; a listening node uses delta_heard exactly when some neighbor
// beeps, and delta_quiet otherwise.
struct ProtocolDefinition {
  std::vector<std::string> state_names;
  std::vector<bool> beeping;
  std::vector<bool> leader;
  int start_state = 0;
  std::vector<Transition> delta_quiet;
  std::vector<Transition> delta_heard;

  int state_count() const { return static_cast<int>(state_names.size()); }

  // Throws std::invalid_argument on malformed definitions (size mismatches,
  // out-of-range targets, probabilities outside [0,1] or not summing to 1
  // within 1e-12).
  void validate() const;
};

// Network snapshot: per-node state at a given round.
struct Configuration {
  std::int64_t round = 0;
  std::vector<std::uint8_t> state;

  bool operator==(const Configuration&) const = default;
};

}  // namespace beepsim
