#pragma once

#include <array>
#include <string_view>

#include "beepsim/protocol.hpp"

namespace beepsim {

// State indices of the six-state protocol. Leader states occupy 0..2,
// non-leader states 3..5; within each half the order is waiting, beeping,
// frozen, so `index % 3` is the behavioural phase.
namespace bfw_state {
inline constexpr int leader_waiting = 0;
inline constexpr int leader_beeping = 1;
inline constexpr int leader_frozen = 2;
inline constexpr int waiting = 3;
inline constexpr int beeping = 4;
inline constexpr int frozen = 5;
inline constexpr int count = 6;
}  // namespace bfw_state

enum class Phase : int { waiting = 0, beeping = 1, frozen = 2 };

constexpr Phase phase_of(int state) { return static_cast<Phase>(state % 3); }
constexpr bool is_leader(int state) { return state < 3; }

// Trace tokens, indexed by state.
inline constexpr std::array<std::string_view, 6> bfw_tokens = {
    "LW", "LB", "LF", "NW", "NB", "NF"};

// -1 if the token is not one of the six.
int bfw_state_from_token(std::string_view token);

struct BfwParams {
  enum class Mode { uniform, diameter_tuned };

  double p = 0.5;
  Mode mode = Mode::uniform;
  int diameter = 0;  // required in diameter_tuned mode

  // Uniform mode returns p; diameter-tuned mode returns exactly 1/(D+1).
  double effective_p() const;
  // Throws std::invalid_argument on out-of-range p or missing diameter.
  // p = 1 is accepted as a degenerate test value: it makes the one
  // probabilistic transition deterministic and the protocol symmetric.
  void validate() const;
};

// The six-state protocol: a waiting leader beeps in the next round with
// probability p unless it hears a beep, in which case it is eliminated
// (becomes a beeping non-leader); waiting non-leaders relay heard beeps;
// every beep is followed by exactly one frozen round in which the node
// ignores its environment.
ProtocolDefinition bfw_protocol(const BfwParams& params);

}  // namespace beepsim
