#include "coopsim/analysis.hpp"

#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace coopsim::analysis {

std::pair<double, double> service_rates(const CollisionParams& params, double p_busy_r1,
                                        double p_busy_r2) {
  const double silent = params.all_users_silent();
  const auto& q = params.q_relay;
  const auto& p = params.p_relay_dest;
  return {q[0] * p[0] * (1.0 - q[1] * p_busy_r2) * silent,
          q[1] * p[1] * (1.0 - q[0] * p_busy_r1) * silent};
}

double relay_arrival_weight(const CollisionParams& params, int relay) {
  const int other = 1 - relay;
  double sum = 0.0;
  for (int i = 0; i < params.n_users; ++i) {
    const auto& pr = params.p_user_relay[i];
    // If both relays decode, the coin flip hands the packet to `relay` half the time.
    const double keep = (1.0 - pr[other]) + 0.5 * pr[other];
    sum += params.q_user[i] * pr[relay] * (1.0 - params.p_user_dest[i]) * keep *
           params.others_silent(i);
  }
  return sum;
}

DominantRates dominant_rates(const CollisionParams& params, int dummy) {
  if (dummy != 0 && dummy != 1) throw std::invalid_argument("dummy relay must be 0 or 1");
  const int other = 1 - dummy;
  const double silent = params.all_users_silent();
  const double q_d = params.q_relay[dummy];
  const double q_o = params.q_relay[other];

  DominantRates r;
  r.lambda_0 = (1.0 - q_d) * relay_arrival_weight(params, other);
  r.lambda_1 = (1.0 - q_o) * r.lambda_0;
  r.mu = q_o * params.p_relay_dest[other] * (1.0 - q_d) * silent;

  if (r.lambda_0 == 0.0) {
    r.stable = true;
    r.p_empty = 1.0;
    r.lambda = 0.0;
  } else if (r.lambda_1 < r.mu) {
    const double denom = r.mu - r.lambda_1 + r.lambda_0;
    r.stable = true;
    r.p_empty = (r.mu - r.lambda_1) / denom;
    r.lambda = r.mu * r.lambda_0 / denom;
  } else {
    r.stable = false;
    r.p_empty = 0.0;
    r.lambda = r.lambda_1;
  }

  const double other_active = 1.0 - q_o * (1.0 - r.p_empty);
  r.dummy_relay.lambda = (1.0 - q_d) * other_active * relay_arrival_weight(params, dummy);
  r.dummy_relay.mu = q_d * params.p_relay_dest[dummy] * other_active * silent;
  return r;
}

double dominant_lambda_closed_form(const CollisionParams& params, int dummy) {
  const int other = 1 - dummy;
  const double served = params.p_relay_dest[other] * params.all_users_silent();
  const double weight = relay_arrival_weight(params, other);
  if (served + weight == 0.0) return 0.0;
  return served * (1.0 - params.q_relay[dummy]) * weight / (served + weight);
}

double q_min(const CollisionParams& params, int relay) {
  const double weight = relay_arrival_weight(params, relay);
  const double served = params.p_relay_dest[relay] * params.all_users_silent();
  if (weight == 0.0) return 0.0;
  return weight / (weight + served);
}

StabilityRegion::StabilityRegion(const CollisionParams& params, int resolution)
    : silent_(params.all_users_silent()),
      q_relay_(params.q_relay),
      p_relay_dest_(params.p_relay_dest),
      q_min_{q_min(params, 0), q_min(params, 1)} {
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  for (int d = 0; d < kNumRelays; ++d) {
    const int o = 1 - d;
    const double cap_other = q_relay_[o] * p_relay_dest_[o] * (1.0 - q_relay_[d]) * silent_;
    const double cap_dummy = q_relay_[d] * p_relay_dest_[d] * silent_;
    auto& line = boundary_[d];
    line.reserve(resolution + 1);
    for (int k = 0; k < resolution; ++k) {
      const double t = cap_other * k / (resolution - 1);
      const double frac = cap_other > 0.0 ? t / cap_other : 0.0;
      const double s = cap_dummy * (1.0 - q_relay_[o] * frac);
      line.push_back(d == 0 ? Point{s, t} : Point{t, s});
    }
    line.push_back(d == 0 ? Point{0.0, cap_other} : Point{cap_other, 0.0});
  }
}

bool StabilityRegion::in_dominant_region(int dummy, Point p) const {
  if (p.lambda_r1 < 0.0 || p.lambda_r2 < 0.0) return false;
  const int o = 1 - dummy;
  const double lam_d = dummy == 0 ? p.lambda_r1 : p.lambda_r2;
  const double lam_o = dummy == 0 ? p.lambda_r2 : p.lambda_r1;
  const double mu_o = q_relay_[o] * p_relay_dest_[o] * (1.0 - q_relay_[dummy]) * silent_;
  if (!(lam_o < mu_o)) return false;
  // Little's law gives Pr(Q_other > 0) = lam_o / mu_o inside the region.
  const double mu_d =
      q_relay_[dummy] * p_relay_dest_[dummy] * (1.0 - q_relay_[o] * lam_o / mu_o) * silent_;
  return lam_d < mu_d;
}

void StabilityRegion::write_csv(std::ostream& out, bool header) const {
  if (header) out << "lambda_r1,lambda_r2,region_id\n";
  for (int d = 0; d < kNumRelays; ++d)
    for (const Point& p : boundary_[d])
      out << fmt::format("{:.17g},{:.17g},{}\n", p.lambda_r1, p.lambda_r2, d + 1);
}

ThroughputBounds throughput_bounds(const CollisionParams& params, int user) {
  if (params.cluster_of)
    throw std::invalid_argument("clustered parameters: use clustered_throughput_bounds");
  const double p_d = params.p_user_dest[user];
  const auto& pr = params.p_user_relay[user];
  const double reach = p_d + (1.0 - p_d) * (pr[0] + pr[1] - pr[0] * pr[1]);
  ThroughputBounds b;
  b.per_user_upper = params.q_user[user] * reach * params.others_silent(user);
  b.per_user_lower = b.per_user_upper * (1.0 - params.q_relay[0]) * (1.0 - params.q_relay[1]);
  return b;
}

ThroughputBounds clustered_throughput_bounds(const CollisionParams& params, int user) {
  if (!params.cluster_of) throw std::invalid_argument("missing cluster assignment");
  const auto& cluster = *params.cluster_of;
  const int k = cluster[user];
  double peers_silent = 1.0;
  for (int j = 0; j < params.n_users; ++j)
    if (j != user && cluster[j] == k) peers_silent *= 1.0 - params.q_user[j];

  const double q = params.q_user[user];
  const double p_d = params.p_user_dest[user];
  ThroughputBounds b;
  b.clustered = true;
  b.per_user_upper = q * p_d * params.others_silent(user) +
                     q * (1.0 - p_d) * params.p_user_relay[user][k] * peers_silent;
  b.per_user_lower = b.per_user_upper * (1.0 - params.q_relay[0]) * (1.0 - params.q_relay[1]);
  return b;
}

double no_relay_throughput(const CollisionParams& params, int user) {
  return params.q_user[user] * params.p_user_dest[user] * params.others_silent(user);
}

}  // namespace coopsim::analysis
