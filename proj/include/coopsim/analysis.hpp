#pragma once

#include <array>
#include <iosfwd>
#include <utility>
#include <vector>

#include "coopsim/model.hpp"

namespace coopsim::analysis {

struct RatePair {
  double lambda = 0.0;
  double mu = 0.0;
};

/// Queue statistics of the relay that is *not* sending dummy packets in a
/// dominant system, plus the arrival/service pair of the dummy-sending relay.
struct DominantRates {
  double lambda_0 = 0.0;  ///< arrival probability while the queue is empty
  double lambda_1 = 0.0;  ///< arrival probability while the queue is busy
  double p_empty = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  /// lambda_1 < mu. When false the queue never empties: p_empty is 0 and
  /// lambda is lambda_1.
  bool stable = true;
  /// The dummy-sending relay's arrival and service rates in the same system.
  RatePair dummy_relay;
};

/// Service rates of both relays given the probability each queue is busy.
std::pair<double, double> service_rates(const CollisionParams& params, double p_busy_r1,
                                        double p_busy_r2);

/// Sum over users of the probability that, with both relays silent, relay
/// `relay` stores a packet from a lone transmitting user after the coin flip.
double relay_arrival_weight(const CollisionParams& params, int relay);

/// Dominant system in which `dummy` (0 or 1) transmits dummy packets; the
/// returned statistics describe the other relay.
DominantRates dominant_rates(const CollisionParams& params, int dummy);
inline DominantRates dominant_rates_s1(const CollisionParams& p) { return dominant_rates(p, 0); }
inline DominantRates dominant_rates_s2(const CollisionParams& p) { return dominant_rates(p, 1); }

/// Arrival rate of the non-dummy relay in closed form; independent of that
/// relay's own attempt probability.
double dominant_lambda_closed_form(const CollisionParams& params, int dummy);

/// Smallest attempt probability of relay `relay` keeping its queue stable.
double q_min(const CollisionParams& params, int relay);

struct Point {
  double lambda_r1 = 0.0;
  double lambda_r2 = 0.0;
};

class StabilityRegion {
 public:
  StabilityRegion(const CollisionParams& params, int resolution);

  /// Closed polylines ordered from the lambda_r1 axis to the lambda_r2 axis.
  [[nodiscard]] const std::vector<Point>& boundary_s1() const { return boundary_[0]; }
  [[nodiscard]] const std::vector<Point>& boundary_s2() const { return boundary_[1]; }
  [[nodiscard]] double q_r1_min() const { return q_min_[0]; }
  [[nodiscard]] double q_r2_min() const { return q_min_[1]; }

  /// Strict membership in the region of dominant system `dummy`.
  [[nodiscard]] bool in_dominant_region(int dummy, Point p) const;
  [[nodiscard]] bool contains(Point p) const {
    return in_dominant_region(0, p) || in_dominant_region(1, p);
  }

  /// Rows `lambda_r1,lambda_r2,region_id` with region_id 1 or 2.
  void write_csv(std::ostream& out, bool header = true) const;

 private:
  double silent_;
  std::array<double, kNumRelays> q_relay_;
  std::array<double, kNumRelays> p_relay_dest_;
  std::array<std::vector<Point>, kNumRelays> boundary_;
  std::array<double, kNumRelays> q_min_;
};

inline StabilityRegion stability_region(const CollisionParams& params, int resolution) {
  return StabilityRegion(params, resolution);
}

struct ThroughputBounds {
  double per_user_upper = 0.0;
  double per_user_lower = 0.0;
  bool clustered = false;
};

/// Throughput bounds for the unclustered two-relay system.
/// Throws std::invalid_argument for clustered parameters.
ThroughputBounds throughput_bounds(const CollisionParams& params, int user);

/// Throughput bounds for the clustered two-relay system. The relay term
/// requires only the user's same-cluster peers to be silent.
/// Throws std::invalid_argument when no cluster assignment is present.
ThroughputBounds clustered_throughput_bounds(const CollisionParams& params, int user);

/// Per-user throughput of the system without relays.
double no_relay_throughput(const CollisionParams& params, int user);

}  // namespace coopsim::analysis
