#include "coopsim/model.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace coopsim {

std::string to_string(NodeId id) {
  switch (id.kind) {
    case NodeKind::User:
      return fmt::format("user{}", id.index + 1);
    case NodeKind::Relay:
      return fmt::format("R{}", id.index + 1);
    case NodeKind::Destination:
      break;
  }
  return "d";
}

double CollisionParams::all_users_silent() const {
  double prod = 1.0;
  for (double q : q_user) prod *= 1.0 - q;
  return prod;
}

double CollisionParams::others_silent(int skip) const {
  double prod = 1.0;
  for (int j = 0; j < n_users; ++j)
    if (j != skip) prod *= 1.0 - q_user[j];
  return prod;
}

int MprParams::transmitter_index(NodeId id) const {
  switch (id.kind) {
    case NodeKind::User:
      return id.index;
    case NodeKind::Relay:
      return n_users + id.index;
    case NodeKind::Destination:
      break;
  }
  throw std::invalid_argument("the destination never transmits");
}

double MprParams::gain(int tx, Receiver rx) const {
  const auto r = static_cast<int>(rx);
  return tx_power[tx] * std::pow(distance[tx][r], -pathloss[tx][r]);
}

namespace {

constexpr std::array<std::string_view, 7> kStrategyNames = {
    "no_relay",          "one_relay",    "two_relay_simple", "two_relay_clustered",
    "two_relay_smaller_queue", "dominant_s1", "dominant_s2",
};

}  // namespace

std::string_view to_string(Strategy s) { return kStrategyNames[static_cast<std::size_t>(s)]; }

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (std::size_t i = 0; i < kStrategyNames.size(); ++i)
    if (kStrategyNames[i] == name) return static_cast<Strategy>(i);
  return std::nullopt;
}

std::string_view to_string(ChannelKind c) {
  return c == ChannelKind::Collision ? "collision" : "mpr";
}

int ScenarioConfig::n_users() const {
  return std::visit([](const auto& p) { return p.n_users; }, channel);
}

const std::vector<double>& ScenarioConfig::q_user() const {
  return std::visit([](const auto& p) -> const std::vector<double>& { return p.q_user; }, channel);
}

const std::array<double, kNumRelays>& ScenarioConfig::q_relay() const {
  return std::visit(
      [](const auto& p) -> const std::array<double, kNumRelays>& { return p.q_relay; }, channel);
}

std::string ValidationResult::describe() const {
  std::string out;
  for (const auto& v : violations) out += fmt::format("{}: {}\n", v.path, v.message);
  return out;
}

namespace {

class Checker {
 public:
  explicit Checker(std::string prefix) : prefix_(std::move(prefix)) {}

  void fail(const std::string& field, std::string message) {
    result_.violations.push_back({prefix_ + field, std::move(message)});
  }

  void probability(const std::string& field, double p) {
    if (!(p >= 0.0 && p <= 1.0)) fail(field, "probability out of [0,1]");
  }

  bool length(const std::string& field, std::size_t got, int want) {
    if (got == static_cast<std::size_t>(want)) return true;
    fail(field, fmt::format("expected {} entries, got {}", want, got));
    return false;
  }

  void clusters(const std::optional<std::vector<int>>& cluster_of, int n_users) {
    if (!cluster_of) return;
    if (!length("cluster_of", cluster_of->size(), n_users)) return;
    std::array<int, kNumRelays> sizes{};
    for (int i = 0; i < n_users; ++i) {
      const int k = (*cluster_of)[i];
      if (k < 0 || k >= kNumRelays) {
        fail(fmt::format("cluster_of[{}]", i), "cluster index must be 1 or 2");
        continue;
      }
      ++sizes[k];
    }
    for (int k = 0; k < kNumRelays; ++k)
      if (sizes[k] == 0) fail("cluster_of", fmt::format("cluster {} is empty", k + 1));
  }

  ValidationResult take() { return std::move(result_); }

 private:
  std::string prefix_;
  ValidationResult result_;
};

void append(ValidationResult& into, ValidationResult from) {
  for (auto& v : from.violations) into.violations.push_back(std::move(v));
}

}  // namespace

ValidationResult validate(const CollisionParams& p) {
  Checker c("collision.");
  if (p.n_users < 1) {
    c.fail("n_users", "at least one user required");
    return c.take();
  }
  if (c.length("q_user", p.q_user.size(), p.n_users))
    for (int i = 0; i < p.n_users; ++i) c.probability(fmt::format("q_user[{}]", i), p.q_user[i]);
  if (c.length("p_user_dest", p.p_user_dest.size(), p.n_users))
    for (int i = 0; i < p.n_users; ++i)
      c.probability(fmt::format("p_user_dest[{}]", i), p.p_user_dest[i]);
  if (c.length("p_user_relay", p.p_user_relay.size(), p.n_users))
    for (int i = 0; i < p.n_users; ++i)
      for (int j = 0; j < kNumRelays; ++j)
        c.probability(fmt::format("p_user_relay[{}][{}]", i, j), p.p_user_relay[i][j]);
  for (int j = 0; j < kNumRelays; ++j) {
    c.probability(fmt::format("q_relay[{}]", j), p.q_relay[j]);
    c.probability(fmt::format("p_relay_dest[{}]", j), p.p_relay_dest[j]);
  }
  c.clusters(p.cluster_of, p.n_users);
  return c.take();
}

ValidationResult validate(const MprParams& p) {
  Checker c("mpr.");
  if (p.n_users < 1) {
    c.fail("n_users", "at least one user required");
    return c.take();
  }
  const int n_tx = p.n_transmitters();
  if (c.length("q_user", p.q_user.size(), p.n_users))
    for (int i = 0; i < p.n_users; ++i) c.probability(fmt::format("q_user[{}]", i), p.q_user[i]);
  for (int j = 0; j < kNumRelays; ++j) c.probability(fmt::format("q_relay[{}]", j), p.q_relay[j]);

  const bool tables_ok = c.length("distance", p.distance.size(), n_tx) &
                         c.length("pathloss", p.pathloss.size(), n_tx) &
                         c.length("fading_param", p.fading_param.size(), n_tx);
  if (tables_ok) {
    for (int t = 0; t < n_tx; ++t) {
      for (int r = 0; r < kNumReceivers; ++r) {
        if (t == p.n_users + r) continue;  // relay's own receiver
        if (!(p.distance[t][r] > 0.0))
          c.fail(fmt::format("distance[{}][{}]", t, r), "distance must be positive");
        if (!(p.pathloss[t][r] >= 2.0 && p.pathloss[t][r] <= 4.0))
          c.fail(fmt::format("pathloss[{}][{}]", t, r), "path-loss exponent out of [2,4]");
        if (!(p.fading_param[t][r] > 0.0))
          c.fail(fmt::format("fading_param[{}][{}]", t, r), "fading parameter must be positive");
      }
    }
  }
  if (c.length("tx_power", p.tx_power.size(), n_tx))
    for (int t = 0; t < n_tx; ++t)
      if (!(p.tx_power[t] > 0.0))
        c.fail(fmt::format("tx_power[{}]", t), "transmit power must be positive");
  for (int r = 0; r < kNumReceivers; ++r) {
    if (!(p.noise[r] > 0.0)) c.fail(fmt::format("noise[{}]", r), "noise power must be positive");
    if (!(p.sinr_threshold[r] > 0.0))
      c.fail(fmt::format("sinr_threshold[{}]", r), "SINR threshold must be positive");
  }
  c.clusters(p.cluster_of, p.n_users);
  return c.take();
}

ValidationResult validate(const ScenarioConfig& config) {
  ValidationResult out = std::visit([](const auto& p) { return validate(p); }, config.channel);
  Checker c("");
  const bool collision = config.channel_kind() == ChannelKind::Collision;
  const Strategy s = config.strategy;
  if (collision && s == Strategy::TwoRelaySmallerQueue)
    c.fail("strategy", "strategy/channel mismatch: two_relay_smaller_queue requires the MPR channel");
  if (!collision && dummy_relay(s) >= 0)
    c.fail("strategy", "strategy/channel mismatch: dominant systems require the collision channel");
  if (collision && s == Strategy::TwoRelayClustered &&
      !std::get<CollisionParams>(config.channel).cluster_of)
    c.fail("collision.cluster_of", "clustered strategy requires a cluster assignment");
  if (config.horizon_slots < 1) c.fail("horizon_slots", "horizon must be positive");
  if (config.warmup_slots < 0 || config.warmup_slots >= config.horizon_slots)
    c.fail("warmup_slots", "warmup must satisfy 0 <= warmup_slots < horizon_slots");
  if (config.replications < 1) c.fail("replications", "at least one replication required");
  append(out, c.take());
  return out;
}

CollisionParams table1_params(int n_users, bool clustered) {
  if (n_users < 1) throw std::invalid_argument("n_users must be >= 1");
  if (clustered && n_users % 2 != 0)
    throw std::invalid_argument("clustered mode needs an even number of users");
  CollisionParams p;
  p.n_users = n_users;
  p.q_user.assign(n_users, 0.25);
  p.q_relay = {0.85, 0.85};
  p.p_user_dest.assign(n_users, 0.25);
  p.p_user_relay.assign(n_users, {0.9, 0.9});
  p.p_relay_dest = {0.9, 0.9};
  if (clustered) {
    std::vector<int> clusters(n_users);
    for (int i = 0; i < n_users; ++i) {
      clusters[i] = i < n_users / 2 ? 0 : 1;
      p.p_user_relay[i][1 - clusters[i]] = 0.0;
    }
    p.cluster_of = std::move(clusters);
  }
  return p;
}

MprParams table2_topology(int n_users, bool clustered) {
  if (n_users < 1) throw std::invalid_argument("n_users must be >= 1");
  if (clustered && n_users % 2 != 0)
    throw std::invalid_argument("clustered mode needs an even number of users");

  constexpr double kUserDest = 100.0, kUserRelay = 59.0, kUserOtherRelay = 88.0;
  constexpr double kRelayDest = 59.0, kRelayRelay = 60.0;
  constexpr double kUserPower = 1e-3, kRelayPower = 5e-3;
  constexpr auto kDest = static_cast<int>(Receiver::Destination);

  MprParams p;
  p.n_users = n_users;
  p.q_user.assign(n_users, 0.25);
  p.q_relay = {0.85, 0.85};
  const int n_tx = p.n_transmitters();
  p.distance.assign(n_tx, {});
  p.pathloss.assign(n_tx, {});
  p.fading_param.assign(n_tx, {kDefaultFadingParam, kDefaultFadingParam, kDefaultFadingParam});
  p.tx_power.assign(n_tx, kUserPower);
  p.noise = {kDefaultNoiseWatts, kDefaultNoiseWatts, kDefaultNoiseWatts};
  p.sinr_threshold = {1.2, 1.2, 1.2};

  if (clustered) p.cluster_of = std::vector<int>(n_users);
  for (int i = 0; i < n_users; ++i) {
    p.distance[i][kDest] = kUserDest;
    p.pathloss[i][kDest] = 4.0;
    const int serving = clustered ? (i < n_users / 2 ? 0 : 1) : -1;
    if (clustered) (*p.cluster_of)[i] = serving;
    for (int j = 0; j < kNumRelays; ++j) {
      const bool far = clustered && j != serving;
      p.distance[i][j] = far ? kUserOtherRelay : kUserRelay;
      p.pathloss[i][j] = far ? 4.0 : 2.0;
    }
  }
  for (int j = 0; j < kNumRelays; ++j) {
    const int t = n_users + j;
    p.tx_power[t] = kRelayPower;
    p.distance[t][kDest] = kRelayDest;
    p.pathloss[t][kDest] = 2.0;
    p.distance[t][1 - j] = kRelayRelay;
    p.pathloss[t][1 - j] = 4.0;
    p.fading_param[t][j] = 0.0;  // self link
  }
  return p;
}

MprParams with_threshold(MprParams p, double gamma) {
  p.sinr_threshold.fill(gamma);
  return p;
}

}  // namespace coopsim
