#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "coopsim/channel.hpp"
#include "coopsim/model.hpp"

namespace coopsim {

/// Relay queue with lazy removal of copies that were delivered by the
/// other relay (only the MPR Simple strategy stores a packet twice).
struct RelayState {
  std::deque<Packet> queue;  // FIFO, unbounded
  std::int64_t stale = 0;    // purged copies still physically queued
  bool attempts_this_slot = false;

  [[nodiscard]] std::int64_t length() const {
    return static_cast<std::int64_t>(queue.size()) - stale;
  }
};

struct Delivery {
  std::uint64_t packet_id = 0;
  NodeId source;
  NodeId via;  // transmitter that reached the destination
  std::int64_t delay = 0;
};

struct SlotRecord {
  std::int64_t slot = 0;
  TransmissionSet transmissions;
  SlotOutcome outcome;
  std::array<std::int64_t, kNumRelays> queue_length{};  // at slot start
  std::array<int, kNumRelays> arrivals{};
  std::array<int, kNumRelays> departures{};
  std::vector<Delivery> deliveries;  // first deliveries only
};

struct SimTrace {
  std::vector<SlotRecord> slots;
};

enum class StabilityVerdict : std::uint8_t { Stable, Unstable, Inconclusive };
std::string_view to_string(StabilityVerdict v);

/// Raw counters of one replication over the measured (post-warmup) window.
struct ReplicationResult {
  std::int64_t measured_slots = 0;
  std::vector<std::int64_t> delivered_per_user;
  std::array<std::int64_t, kNumRelays> arrivals{};
  std::array<std::int64_t, kNumRelays> relay_successes{};  // includes dummy packets
  std::array<std::int64_t, kNumRelays> service_slots{};    // slots holding a packet or a dummy
  std::array<std::int64_t, kNumRelays> empty_slots{};
  std::array<double, kNumRelays> queue_length_sum{};
  double delay_sum = 0.0;
  std::int64_t delay_count = 0;
  /// Mean queue length per relay over consecutive equal blocks of the window.
  std::array<std::vector<double>, kNumRelays> queue_blocks;

  // Whole-run packet accounting (warmup included).
  std::uint64_t packets_issued = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t packets_in_relays = 0;  // unique packets held by relays at the end

  friend bool operator==(const ReplicationResult&, const ReplicationResult&) = default;
};

/// Number of blocks used by the queue-trend test.
inline constexpr int kTrendBlocks = 32;

/// Runs one replication with its own random stream. Deterministic in
/// (config, seed). Records every slot into `trace` when non-null.
ReplicationResult simulate_replication(const ScenarioConfig& config, std::uint64_t seed,
                                       SimTrace* trace = nullptr);

/// Seed of replication `rep` of a run whose base seed is `seed`.
std::uint64_t replication_seed(std::uint64_t seed, int rep);

struct Estimate {
  double mean = 0.0;
  double ci_halfwidth = 0.0;  // 95%, normal approximation across replications
};

struct MetricsReport {
  ChannelKind channel = ChannelKind::Collision;
  Strategy strategy = Strategy::TwoRelaySimple;
  int n_users = 0;
  std::optional<double> gamma;  // MPR only
  std::uint64_t seed = 0;
  std::int64_t slots = 0;
  int reps = 0;

  std::vector<Estimate> throughput_per_user;
  Estimate aggregate_throughput;
  std::array<Estimate, kNumRelays> mean_queue;
  Estimate mean_delay;
  /// Too few deliveries for a meaningful delay average.
  bool delay_low_confidence = false;
  std::int64_t delay_samples = 0;
  std::array<Estimate, kNumRelays> empirical_lambda;
  std::array<Estimate, kNumRelays> empirical_mu;
  std::array<Estimate, kNumRelays> empirical_p_empty;
  std::array<StabilityVerdict, kNumRelays> stability_verdict{};

  /// Mean per-user throughput across users.
  [[nodiscard]] Estimate throughput_user_mean() const;
};

/// Fewest delivered packets (all replications) for a trusted delay mean.
inline constexpr std::int64_t kMinDelaySamples = 1000;

/// Combines per-replication results in replication order.
MetricsReport summarize(const ScenarioConfig& config, std::span<const ReplicationResult> reps);

/// Reference implementation: replications one after another.
/// Throws std::invalid_argument if the config does not validate.
MetricsReport run_serial(const ScenarioConfig& config);

/// Replications in parallel; bitwise identical to run_serial.
MetricsReport run(const ScenarioConfig& config);

struct TrendEstimate {
  double slope = 0.0;  // packets per slot
  double ci_halfwidth = 0.0;
  double first_half_mean = 0.0;
  double second_half_mean = 0.0;
};

/// Pools the block means of each replication into a queue-growth estimate.
TrendEstimate queue_trend(std::span<const ReplicationResult> reps, int relay);

/// stable: slope CI contains 0 and the second-half mean stays within
/// 2 * first-half mean + 1; unstable: slope CI strictly positive.
StabilityVerdict classify_trend(const TrendEstimate& trend);

struct StabilityProbe {
  std::array<StabilityVerdict, kNumRelays> verdict{};
  std::array<TrendEstimate, kNumRelays> trend{};
};

/// Runs `horizon_factor` times the configured horizon and classifies the
/// queue-length trend of every relay.
StabilityProbe stability_probe(const ScenarioConfig& config, int horizon_factor = 4);

/// Copy of `base` with `n_users` homogeneous users (rows copied from the
/// first user of the same cluster) and, for MPR, every threshold set to
/// `gamma`.
ScenarioConfig derive_point(const ScenarioConfig& base, int n_users, std::optional<double> gamma);

/// Seed of a sweep point: hash of (base seed, N, gamma, strategy).
std::uint64_t point_seed(std::uint64_t base_seed, int n_users, std::optional<double> gamma,
                         Strategy strategy);

/// One report per (N, gamma) grid point, N-major. An empty gamma list means
/// the channel's own threshold (or none, for the collision channel).
std::vector<MetricsReport> sweep(const ScenarioConfig& base, std::span<const int> n_values,
                                 std::span<const double> gamma_values = {});
std::vector<MetricsReport> sweep_serial(const ScenarioConfig& base, std::span<const int> n_values,
                                        std::span<const double> gamma_values = {});

/// Worker threads for parallel runs; COOPSIM_WORKERS overrides the default.
int worker_count();

}  // namespace coopsim
