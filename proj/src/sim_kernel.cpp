// Single-replication slot loop. Everything here is strictly serial; the
// parallel drivers only ever run independent copies of it.

#include <algorithm>
#include <unordered_set>

#include "coopsim/rng.hpp"
#include "coopsim/sim.hpp"

namespace coopsim {

namespace {

struct SlotDelivery {
  std::uint64_t id;
  unsigned popped_mask;  // relays whose copy left the queue this slot
};

class Engine {
 public:
  Engine(const ScenarioConfig& config, std::uint64_t seed, SimTrace* trace)
      : config_(config),
        collision_(config.channel_kind() == ChannelKind::Collision),
        strategy_(config.strategy),
        dummy_(dummy_relay(config.strategy)),
        n_users_(config.n_users()),
        q_user_(config.q_user()),
        q_relay_(config.q_relay()),
        rng_(seed),
        trace_(trace) {
    for (int j = 0; j < kNumRelays; ++j) present_[j] = relay_present(strategy_, j);
    hol_.reserve(n_users_);
    for (int i = 0; i < n_users_; ++i) hol_.push_back(fresh_packet(i, 0));
    user_done_.assign(n_users_, 0);

    result_.measured_slots = config.horizon_slots - config.warmup_slots;
    result_.delivered_per_user.assign(n_users_, 0);
    blocks_ = static_cast<int>(std::min<std::int64_t>(kTrendBlocks, result_.measured_slots));
    for (auto& b : block_sum_) b.assign(blocks_, 0.0);
    block_count_.assign(blocks_, 0);
  }

  ReplicationResult run() {
    for (std::int64_t t = 0; t < config_.horizon_slots; ++t) step(t);
    finish();
    return std::move(result_);
  }

 private:
  Packet fresh_packet(int user, std::int64_t slot) {
    ++result_.packets_issued;
    return Packet{next_id_++, NodeId::user(user), slot, std::nullopt};
  }

  void drop_stale_heads(RelayState& relay) {
    while (relay.stale > 0 && !relay.queue.empty()) {
      auto it = purged_.find(relay.queue.front().id);
      if (it == purged_.end()) break;
      purged_.erase(it);
      relay.queue.pop_front();
      --relay.stale;
    }
  }

  double coin() { return collision_ ? slot_coin_ : rng_.uniform(); }

  void step(std::int64_t t) {
    const bool measured = t >= config_.warmup_slots;
    std::array<std::int64_t, kNumRelays> len{};
    for (int j = 0; j < kNumRelays; ++j) {
      drop_stale_heads(relays_[j]);
      len[j] = relays_[j].length();
    }

    tx_.clear();
    for (int i = 0; i < n_users_; ++i) {
      if (rng_.uniform() >= q_user_[i]) continue;
      Packet& p = hol_[i];
      if (!p.first_tx_slot) p.first_tx_slot = t;
      tx_.push_back({NodeId::user(i), p});
    }
    for (int j = 0; j < kNumRelays; ++j) {
      RelayState& relay = relays_[j];
      const double u = rng_.uniform();
      relay.attempts_this_slot = false;
      if (!present_[j] || u >= q_relay_[j]) continue;
      if (len[j] > 0) {
        tx_.push_back({NodeId::relay(j), relay.queue.front()});
        relay.attempts_this_slot = true;
      } else if (dummy_ == j) {
        tx_.push_back({NodeId::relay(j), Packet{}});
        relay.attempts_this_slot = true;
      }
    }

    SlotOutcome outcome;
    if (collision_) {
      outcome = resolve_slot_collision(tx_, std::get<CollisionParams>(config_.channel), strategy_,
                                       rng_);
      slot_coin_ = rng_.uniform();
    } else {
      outcome = resolve_slot_mpr(tx_, std::get<MprParams>(config_.channel), strategy_, rng_);
    }

    SlotRecord* rec = nullptr;
    if (trace_) {
      rec = &trace_->slots.emplace_back();
      rec->slot = t;
      rec->transmissions = tx_;
      rec->queue_length = len;
    }

    // Destination side: first copy of a packet counts, every relay copy that
    // reached the destination leaves its queue.
    std::fill(user_done_.begin(), user_done_.end(), 0);
    delivered_.clear();
    for (std::size_t k : outcome.delivered_to_dest) {
      const Transmission& tr = tx_[k];
      unsigned popped = 0;
      if (tr.transmitter.kind == NodeKind::Relay) {
        const int j = tr.transmitter.index;
        if (measured) ++result_.relay_successes[j];
        if (tr.packet.is_dummy()) continue;
        relays_[j].queue.pop_front();
        popped = 1u << j;
        if (rec) ++rec->departures[j];
      }
      auto seen = std::find_if(delivered_.begin(), delivered_.end(),
                               [&](const SlotDelivery& d) { return d.id == tr.packet.id; });
      if (seen != delivered_.end()) {
        seen->popped_mask |= popped;
        continue;
      }
      delivered_.push_back({tr.packet.id, popped});
      ++result_.packets_delivered;
      if (tr.transmitter.kind == NodeKind::User) user_done_[tr.transmitter.index] = 1;
      const std::int64_t delay = t - *tr.packet.first_tx_slot + 1;
      if (measured) {
        ++result_.delivered_per_user[tr.packet.source.index];
        result_.delay_sum += static_cast<double>(delay);
        ++result_.delay_count;
      }
      if (rec) rec->deliveries.push_back({tr.packet.id, tr.packet.source, tr.transmitter, delay});
    }
    // Acknowledgement purges any copy still held by the other relay.
    for (const SlotDelivery& d : delivered_) {
      if (shared_.erase(d.id) == 0) continue;
      for (int j = 0; j < kNumRelays; ++j) {
        if (d.popped_mask & (1u << j)) continue;
        purged_.insert(d.id);
        ++relays_[j].stale;
      }
    }

    // Relay side: user packets that missed the destination.
    for (std::size_t k = 0; k < tx_.size(); ++k) {
      const Transmission& tr = tx_[k];
      if (tr.transmitter.kind != NodeKind::User) continue;
      unsigned mask = 0;
      for (int j = 0; j < kNumRelays; ++j)
        if (std::find(outcome.decoded_by_relay[j].begin(), outcome.decoded_by_relay[j].end(), k) !=
            outcome.decoded_by_relay[j].end())
          mask |= 1u << j;
      if (mask == 0) continue;
      if (mask == 3u) mask = resolve_duplicate(len, tr.packet.id);
      for (int j = 0; j < kNumRelays; ++j) {
        if (!(mask & (1u << j))) continue;
        relays_[j].queue.push_back(tr.packet);
        if (measured) ++result_.arrivals[j];
        if (rec) ++rec->arrivals[j];
      }
      user_done_[tr.transmitter.index] = 1;
    }

    for (int i = 0; i < n_users_; ++i)
      if (user_done_[i]) hol_[i] = fresh_packet(i, t + 1);

    if (rec) rec->outcome = std::move(outcome);
    if (measured) account(t, len);
  }

  // Both relays decoded the same packet; returns the set that stores it.
  unsigned resolve_duplicate(const std::array<std::int64_t, kNumRelays>& len, std::uint64_t id) {
    if (!collision_ && strategy_ == Strategy::TwoRelaySimple) {
      shared_.insert(id);
      return 3u;
    }
    if (!collision_ && strategy_ == Strategy::TwoRelaySmallerQueue && len[0] != len[1])
      return len[0] < len[1] ? 1u : 2u;
    return coin() < 0.5 ? 1u : 2u;
  }

  void account(std::int64_t t, const std::array<std::int64_t, kNumRelays>& len) {
    const std::int64_t offset = t - config_.warmup_slots;
    const auto block = static_cast<int>(offset * blocks_ / result_.measured_slots);
    ++block_count_[block];
    for (int j = 0; j < kNumRelays; ++j) {
      const auto l = static_cast<double>(len[j]);
      result_.queue_length_sum[j] += l;
      block_sum_[j][block] += l;
      if (len[j] == 0) ++result_.empty_slots[j];
      if (present_[j] && (len[j] > 0 || dummy_ == j)) ++result_.service_slots[j];
    }
  }

  void finish() {
    for (int j = 0; j < kNumRelays; ++j) {
      auto& out = result_.queue_blocks[j];
      out.resize(blocks_);
      for (int b = 0; b < blocks_; ++b)
        out[b] = block_count_[b] > 0 ? block_sum_[j][b] / static_cast<double>(block_count_[b]) : 0.0;
    }
    std::int64_t held = 0;
    for (const auto& r : relays_) held += r.length();
    result_.packets_in_relays = static_cast<std::uint64_t>(held) - shared_.size();
  }

  const ScenarioConfig& config_;
  const bool collision_;
  const Strategy strategy_;
  const int dummy_;
  const int n_users_;
  const std::vector<double>& q_user_;
  const std::array<double, kNumRelays>& q_relay_;
  std::array<bool, kNumRelays> present_{};

  Rng rng_;
  SimTrace* trace_;
  double slot_coin_ = 0.0;

  std::uint64_t next_id_ = 1;
  std::vector<Packet> hol_;
  std::vector<char> user_done_;
  std::array<RelayState, kNumRelays> relays_;
  std::unordered_set<std::uint64_t> shared_;  // ids stored by both relays
  std::unordered_set<std::uint64_t> purged_;  // delivered ids with a stale copy queued
  TransmissionSet tx_;
  std::vector<SlotDelivery> delivered_;

  ReplicationResult result_;
  int blocks_ = 0;
  std::array<std::vector<double>, kNumRelays> block_sum_;
  std::vector<std::int64_t> block_count_;
};

}  // namespace

ReplicationResult simulate_replication(const ScenarioConfig& config, std::uint64_t seed,
                                       SimTrace* trace) {
  return Engine(config, seed, trace).run();
}

std::uint64_t replication_seed(std::uint64_t seed, int rep) {
  return derive_seed(seed, {0x7265706cULL, static_cast<std::uint64_t>(rep)});
}

}  // namespace coopsim
