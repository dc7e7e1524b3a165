#include "coopsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coopsim {

double collision_link_success(double gamma, double noise, double distance, double pathloss,
                              double tx_power) {
  if (!(tx_power > 0.0)) throw std::invalid_argument("transmit power must be positive");
  if (!(distance > 0.0)) throw std::invalid_argument("distance must be positive");
  if (gamma < 0.0 || noise < 0.0) throw std::invalid_argument("gamma and noise must be >= 0");
  return std::exp(-gamma * noise * std::pow(distance, pathloss) / tx_power);
}

namespace {

Receiver as_receiver(NodeId rx) {
  switch (rx.kind) {
    case NodeKind::Relay:
      return static_cast<Receiver>(rx.index);
    case NodeKind::Destination:
      return Receiver::Destination;
    case NodeKind::User:
      break;
  }
  throw std::invalid_argument("users do not receive");
}

}  // namespace

double mpr_success_closed_form(NodeId tx, NodeId rx, std::span<const NodeId> active,
                               const MprParams& params) {
  const Receiver r = as_receiver(rx);
  if (std::find(active.begin(), active.end(), tx) == active.end())
    throw std::invalid_argument("transmitter is not in the active set");
  if (std::find(active.begin(), active.end(), rx) != active.end())
    throw std::invalid_argument("receiver is transmitting");

  const auto ri = static_cast<int>(r);
  const int t = params.transmitter_index(tx);
  const double gamma = params.sinr_threshold[ri];
  const double signal = params.fading_param[t][ri] * params.gain(t, r);
  double p = std::exp(-gamma * params.noise[ri] / signal);
  for (NodeId k : active) {
    if (k == tx) continue;
    const int ki = params.transmitter_index(k);
    p /= 1.0 + gamma * params.fading_param[ki][ri] * params.gain(ki, r) / signal;
  }
  return p;
}

SlotOutcome resolve_slot_collision(const TransmissionSet& tx_set, const CollisionParams& params,
                                   Strategy strategy, Rng& rng) {
  if (strategy == Strategy::TwoRelaySmallerQueue)
    throw std::invalid_argument("strategy/channel mismatch");

  const double u_dest = rng.uniform();
  const std::array<double, kNumRelays> u_relay = {rng.uniform(), rng.uniform()};

  SlotOutcome out;
  if (tx_set.empty()) return out;

  if (strategy != Strategy::TwoRelayClustered) {
    if (tx_set.size() >= 2) {
      out.collided = true;
      return out;
    }
    const NodeId who = tx_set.front().transmitter;
    if (who.kind == NodeKind::Relay) {
      if (u_dest < params.p_relay_dest[who.index]) out.delivered_to_dest.push_back(0);
      return out;
    }
    if (u_dest < params.p_user_dest[who.index]) {
      out.delivered_to_dest.push_back(0);
      return out;
    }
    for (int j = 0; j < kNumRelays; ++j)
      if (relay_present(strategy, j) && u_relay[j] < params.p_user_relay[who.index][j])
        out.decoded_by_relay[j].push_back(0);
    return out;
  }

  // Clustered: relays reach the destination through user traffic, users
  // reach their own relay through the other cluster's traffic.
  const auto& cluster = *params.cluster_of;
  std::array<bool, kNumRelays> relay_tx{};
  std::array<int, kNumRelays> cluster_tx_count{};
  std::array<std::size_t, kNumRelays> cluster_tx_last{};
  std::array<std::size_t, kNumRelays> relay_tx_index{};
  int n_users_tx = 0;
  for (std::size_t k = 0; k < tx_set.size(); ++k) {
    const NodeId who = tx_set[k].transmitter;
    if (who.kind == NodeKind::Relay) {
      relay_tx[who.index] = true;
      relay_tx_index[who.index] = k;
    } else {
      ++n_users_tx;
      const int c = cluster[who.index];
      ++cluster_tx_count[c];
      cluster_tx_last[c] = k;
    }
  }
  const int n_relays_tx = int(relay_tx[0]) + int(relay_tx[1]);

  std::size_t user_at_dest = tx_set.size();
  if (n_relays_tx == 1) {
    const int j = relay_tx[0] ? 0 : 1;
    if (u_dest < params.p_relay_dest[j]) out.delivered_to_dest.push_back(relay_tx_index[j]);
    out.collided = n_users_tx > 0;
  } else if (n_relays_tx == 2) {
    out.collided = true;
  } else if (n_users_tx == 1) {
    const std::size_t k = cluster_tx_count[0] == 1 ? cluster_tx_last[0] : cluster_tx_last[1];
    if (u_dest < params.p_user_dest[tx_set[k].transmitter.index]) {
      out.delivered_to_dest.push_back(k);
      user_at_dest = k;
    }
  } else {
    out.collided = n_users_tx > 1;
  }

  for (int j = 0; j < kNumRelays; ++j) {
    if (relay_tx[j] || cluster_tx_count[j] != 1) continue;
    const std::size_t k = cluster_tx_last[j];
    if (k == user_at_dest) continue;
    if (u_relay[j] < params.p_user_relay[tx_set[k].transmitter.index][j])
      out.decoded_by_relay[j].push_back(k);
  }
  return out;
}

MprReception receive_mpr(const TransmissionSet& tx_set, const MprParams& params, Strategy strategy,
                         Rng& rng) {
  MprReception rec;
  const std::size_t n = tx_set.size();
  std::vector<int> tx_index(n);
  for (std::size_t k = 0; k < n; ++k) tx_index[k] = params.transmitter_index(tx_set[k].transmitter);

  std::array<bool, kNumRelays> relay_tx{};
  for (const auto& t : tx_set)
    if (t.transmitter.kind == NodeKind::Relay) relay_tx[t.transmitter.index] = true;

  std::vector<double> received(n);
  for (int r = 0; r < kNumReceivers; ++r) {
    rec.decoded[r].assign(n, 0);
    const bool is_relay = r < kNumRelays;
    rec.listening[r] = !is_relay || (relay_present(strategy, r) && !relay_tx[r]);
    if (!rec.listening[r] || n == 0) continue;

    const auto rx = static_cast<Receiver>(r);
    for (std::size_t k = 0; k < n; ++k) {
      const int t = tx_index[k];
      received[k] = rng.exponential(params.fading_param[t][r]) * params.gain(t, rx);
    }
    const double gamma = params.sinr_threshold[r];
    for (std::size_t k = 0; k < n; ++k) {
      double interference = params.noise[r];
      for (std::size_t m = 0; m < n; ++m)
        if (m != k) interference += received[m];
      rec.decoded[r][k] = received[k] >= gamma * interference;
    }
  }
  return rec;
}

SlotOutcome resolve_slot_mpr(const TransmissionSet& tx_set, const MprParams& params,
                             Strategy strategy, Rng& rng) {
  const MprReception rec = receive_mpr(tx_set, params, strategy, rng);
  constexpr auto kDest = static_cast<int>(Receiver::Destination);
  SlotOutcome out;
  for (std::size_t k = 0; k < tx_set.size(); ++k) {
    if (rec.decoded[kDest][k]) {
      out.delivered_to_dest.push_back(k);
      continue;
    }
    if (tx_set[k].transmitter.kind != NodeKind::User) continue;
    for (int j = 0; j < kNumRelays; ++j)
      if (rec.decoded[j][k]) out.decoded_by_relay[j].push_back(k);
  }
  return out;
}

}  // namespace coopsim
