#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "coopsim/model.hpp"
#include "coopsim/rng.hpp"

namespace coopsim {

struct Transmission {
  NodeId transmitter;
  Packet packet;
};

/// Transmitters active in one slot, at most one entry per node.
using TransmissionSet = std::vector<Transmission>;

/// Resolution of one slot. Entries are indices into the TransmissionSet
/// that was resolved, so dummy packets (which share id 0) stay distinct.
struct SlotOutcome {
  /// Transmissions decoded by the destination (users and relays).
  std::vector<std::size_t> delivered_to_dest;
  /// User transmissions decoded by relay j that the destination missed.
  std::array<std::vector<std::size_t>, kNumRelays> decoded_by_relay;
  /// At least one transmission was lost to a collision (collision channel).
  bool collided = false;

  [[nodiscard]] bool empty() const {
    return delivered_to_dest.empty() && decoded_by_relay[0].empty() &&
           decoded_by_relay[1].empty();
  }
};

/// Success probability of an isolated link under Rayleigh fading:
/// exp(-gamma * noise * distance^pathloss / tx_power).
/// Throws std::invalid_argument for non-positive power or distance.
double collision_link_success(double gamma, double noise, double distance, double pathloss,
                              double tx_power);

/// Average probability that `rx` decodes `tx` when the nodes in `active`
/// transmit simultaneously. `rx` must be a relay or the destination and must
/// not be transmitting; `tx` must be in `active`.
double mpr_success_closed_form(NodeId tx, NodeId rx, std::span<const NodeId> active,
                               const MprParams& params);

/// Resolves one collision-channel slot. Always consumes exactly three
/// uniforms from `rng` (destination draw, then one per relay) so coupled
/// runs stay aligned. Clustered rules apply iff `strategy` is
/// TwoRelayClustered; relays absent under `strategy` decode nothing.
SlotOutcome resolve_slot_collision(const TransmissionSet& tx_set, const CollisionParams& params,
                                   Strategy strategy, Rng& rng);

/// Raw SINR decisions before acknowledgement suppression.
struct MprReception {
  /// listening[r]: receiver r exists under the strategy and is silent.
  std::array<bool, kNumReceivers> listening{};
  /// decoded[r][k]: receiver r decoded transmission k of the set.
  std::array<std::vector<char>, kNumReceivers> decoded;
};

/// Draws independent exponential fading for every (transmitter, listening
/// receiver) pair and applies the SINR threshold test.
MprReception receive_mpr(const TransmissionSet& tx_set, const MprParams& params, Strategy strategy,
                         Rng& rng);

/// receive_mpr followed by acknowledgement suppression: user packets the
/// destination decoded are removed from the relay decode sets, and relay
/// packets never enter them.
SlotOutcome resolve_slot_mpr(const TransmissionSet& tx_set, const MprParams& params,
                             Strategy strategy, Rng& rng);

}  // namespace coopsim
