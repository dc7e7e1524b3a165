#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace coopsim {

/// Relays are indexed 0 (R1) and 1 (R2) throughout the library.
inline constexpr int kNumRelays = 2;

enum class NodeKind : std::uint8_t { User, Relay, Destination };

/// A node of the network. User indices are 0-based (`0..N-1`), relay indices
/// are 0 or 1. The destination carries index 0.
struct NodeId {
  NodeKind kind = NodeKind::Destination;
  int index = 0;

  static constexpr NodeId user(int i) { return {NodeKind::User, i}; }
  static constexpr NodeId relay(int j) { return {NodeKind::Relay, j}; }
  static constexpr NodeId destination() { return {NodeKind::Destination, 0}; }

  friend constexpr bool operator==(NodeId, NodeId) = default;
  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

std::string to_string(NodeId id);

/// Reception endpoints of the MPR model. Users never receive.
enum class Receiver : std::uint8_t { Relay1 = 0, Relay2 = 1, Destination = 2 };
inline constexpr int kNumReceivers = 3;

/// Parameters of the collision-channel model. Per-user vectors have length
/// `n_users`; `cluster_of[i]` is 0 (served by R1) or 1 (served by R2).
struct CollisionParams {
  int n_users = 0;
  std::vector<double> q_user;
  std::array<double, kNumRelays> q_relay{};
  std::vector<double> p_user_dest;
  std::vector<std::array<double, kNumRelays>> p_user_relay;
  std::array<double, kNumRelays> p_relay_dest{};
  std::optional<std::vector<int>> cluster_of;

  /// Product of (1 - q_i) over all users.
  [[nodiscard]] double all_users_silent() const;
  /// Product of (1 - q_j) over all users j != skip.
  [[nodiscard]] double others_silent(int skip) const;

  friend bool operator==(const CollisionParams&, const CollisionParams&) = default;
};

/// Parameters of the SINR-threshold (MPR) model.
///
/// Transmitters are indexed by `transmitter_index`: users `0..N-1`, then R1
/// at `N` and R2 at `N+1`. Link tables are `[transmitter][receiver]` with
/// receivers ordered as `Receiver`. Self links (relay j -> relay j) are unused.
struct MprParams {
  int n_users = 0;
  std::vector<double> q_user;
  std::array<double, kNumRelays> q_relay{};
  std::vector<std::array<double, kNumReceivers>> distance;
  std::vector<std::array<double, kNumReceivers>> pathloss;
  std::vector<double> tx_power;
  std::array<double, kNumReceivers> noise{};
  std::array<double, kNumReceivers> sinr_threshold{};
  std::vector<std::array<double, kNumReceivers>> fading_param;
  std::optional<std::vector<int>> cluster_of;

  [[nodiscard]] int n_transmitters() const { return n_users + kNumRelays; }
  [[nodiscard]] int transmitter_index(NodeId id) const;
  /// Mean received power factor g = P_tx * r^-alpha.
  [[nodiscard]] double gain(int tx, Receiver rx) const;

  friend bool operator==(const MprParams&, const MprParams&) = default;
};

/// Receiver noise power used when a scenario does not specify one (watts).
inline constexpr double kDefaultNoiseWatts = 1e-11;
/// Mean of the exponential fading power when unspecified.
inline constexpr double kDefaultFadingParam = 1.0;

enum class Strategy : std::uint8_t {
  NoRelay,
  OneRelay,
  TwoRelaySimple,
  TwoRelayClustered,
  TwoRelaySmallerQueue,
  DominantS1,
  DominantS2,
};

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

/// Whether relay `j` takes part in the protocol under `s`.
constexpr bool relay_present(Strategy s, int j) {
  switch (s) {
    case Strategy::NoRelay:
      return false;
    case Strategy::OneRelay:
      return j == 0;
    default:
      return true;
  }
}

/// Index of the relay that sends dummy packets, or -1.
constexpr int dummy_relay(Strategy s) {
  if (s == Strategy::DominantS1) return 0;
  if (s == Strategy::DominantS2) return 1;
  return -1;
}

enum class ChannelKind : std::uint8_t { Collision, Mpr };
std::string_view to_string(ChannelKind c);

struct ScenarioConfig {
  std::variant<CollisionParams, MprParams> channel;
  Strategy strategy = Strategy::TwoRelaySimple;
  std::int64_t horizon_slots = 1'000'000;
  std::int64_t warmup_slots = 100'000;
  std::uint64_t seed = 1;
  int replications = 10;

  [[nodiscard]] ChannelKind channel_kind() const {
    return std::holds_alternative<CollisionParams>(channel) ? ChannelKind::Collision
                                                            : ChannelKind::Mpr;
  }
  [[nodiscard]] int n_users() const;
  [[nodiscard]] const std::vector<double>& q_user() const;
  [[nodiscard]] const std::array<double, kNumRelays>& q_relay() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Packet ids start at 1; id 0 marks a dummy packet.
inline constexpr std::uint64_t kDummyPacketId = 0;

struct Packet {
  std::uint64_t id = kDummyPacketId;
  NodeId source;
  std::int64_t created_slot = 0;
  std::optional<std::int64_t> first_tx_slot;

  [[nodiscard]] bool is_dummy() const { return id == kDummyPacketId; }
};

struct Violation {
  std::string path;
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;

  [[nodiscard]] bool ok() const { return violations.empty(); }
  [[nodiscard]] std::string describe() const;
};

ValidationResult validate(const CollisionParams& p);
ValidationResult validate(const MprParams& p);
ValidationResult validate(const ScenarioConfig& config);

/// Reference collision-channel parameters for `n_users` homogeneous users.
/// In clustered mode the first half of the users is served by R1 and the
/// second half by R2; cross-cluster user->relay probabilities are 0.
CollisionParams table1_params(int n_users, bool clustered);

/// Reference MPR geometry. Throws std::invalid_argument on n_users < 1 or an
/// odd user count in clustered mode.
MprParams table2_topology(int n_users, bool clustered);

/// Returns a copy of `p` with every receiver threshold set to `gamma`.
MprParams with_threshold(MprParams p, double gamma);

}  // namespace coopsim
