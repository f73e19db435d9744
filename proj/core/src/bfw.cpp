#include "beepsim/bfw.hpp"

#include <stdexcept>
#include <string>

namespace beepsim {

int bfw_state_from_token(std::string_view token) {
  for (int s = 0; s < bfw_state::count; ++s) {
    if (bfw_tokens[s] == token) return s;
  }
  return -1;
}

double BfwParams::effective_p() const {
  return mode == Mode::diameter_tuned ? 1.0 / (diameter + 1) : p;
}

void BfwParams::validate() const {
  if (mode == Mode::diameter_tuned) {
    if (diameter < 1) {
      throw std::invalid_argument("diameter-tuned mode needs a positive diameter");
    }
    return;
  }
  if (!(p > 0.0) || p > 1.0) {
    throw std::invalid_argument("beep probability must be in (0,1], got " + std::to_string(p));
  }
}

ProtocolDefinition bfw_protocol(const BfwParams& params) {
  params.validate();
  const double p = params.effective_p();
  using namespace bfw_state;

  ProtocolDefinition proto;
  proto.state_names.assign(bfw_tokens.begin(), bfw_tokens.end());
  proto.beeping = {false, true, false, false, true, false};
  proto.leader = {true, true, true, false, false, false};
  proto.start_state = leader_waiting;
  proto.delta_quiet.resize(count);
  proto.delta_heard.resize(count);

  // The single probabilistic transition: a quiet waiting leader beeps next
  // round with probability p.
  proto.delta_quiet[leader_waiting] = Transition::coin(leader_beeping, p, leader_waiting);
  // A waiting leader that hears a beep is eliminated and relays the beep.
  proto.delta_heard[leader_waiting] = Transition::to(beeping);
  proto.delta_heard[leader_beeping] = Transition::to(leader_frozen);
  proto.delta_quiet[leader_beeping] = proto.delta_heard[leader_beeping];
  // Frozen nodes ignore their environment for one round.
  proto.delta_quiet[leader_frozen] = Transition::to(leader_waiting);
  proto.delta_heard[leader_frozen] = Transition::to(leader_waiting);

  proto.delta_quiet[waiting] = Transition::to(waiting);
  proto.delta_heard[waiting] = Transition::to(beeping);
  proto.delta_heard[beeping] = Transition::to(frozen);
  proto.delta_quiet[beeping] = proto.delta_heard[beeping];
  proto.delta_quiet[frozen] = Transition::to(waiting);
  proto.delta_heard[frozen] = Transition::to(waiting);

  proto.validate();
  return proto;
}

}  // namespace beepsim
