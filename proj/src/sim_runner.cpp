#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "coopsim/rng.hpp"
#include "coopsim/sim.hpp"

namespace coopsim {

std::string_view to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::Stable:
      return "stable";
    case StabilityVerdict::Unstable:
      return "unstable";
    case StabilityVerdict::Inconclusive:
      break;
  }
  return "inconclusive";
}

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Mean and 95% normal half-width over the finite samples.
Estimate estimate(const std::vector<double>& samples) {
  double sum = 0.0;
  int n = 0;
  for (double x : samples)
    if (std::isfinite(x)) sum += x, ++n;
  if (n == 0) return {kNaN, kNaN};
  const double mean = sum / n;
  if (n == 1) return {mean, kNaN};
  double ss = 0.0;
  for (double x : samples)
    if (std::isfinite(x)) ss += (x - mean) * (x - mean);
  return {mean, kZ95 * std::sqrt(ss / (n - 1) / n)};
}

double ratio(std::int64_t num, std::int64_t den) {
  return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : kNaN;
}

void require_valid(const ScenarioConfig& config) {
  const ValidationResult v = validate(config);
  if (!v.ok()) throw std::invalid_argument(v.describe());
}

template <typename Fn>
void parallel_for(std::int64_t n, Fn&& fn) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(coopsim_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

Estimate MetricsReport::throughput_user_mean() const {
  if (throughput_per_user.empty()) return {};
  Estimate out;
  for (const auto& e : throughput_per_user) {
    out.mean += e.mean;
    out.ci_halfwidth += e.ci_halfwidth;
  }
  const auto n = static_cast<double>(throughput_per_user.size());
  out.mean /= n;
  out.ci_halfwidth /= n;
  return out;
}

MetricsReport summarize(const ScenarioConfig& config, std::span<const ReplicationResult> reps) {
  MetricsReport r;
  r.channel = config.channel_kind();
  r.strategy = config.strategy;
  r.n_users = config.n_users();
  if (const auto* mpr = std::get_if<MprParams>(&config.channel))
    r.gamma = mpr->sinr_threshold[static_cast<int>(Receiver::Destination)];
  r.seed = config.seed;
  r.slots = config.horizon_slots;
  r.reps = static_cast<int>(reps.size());

  const std::size_t n_reps = reps.size();
  std::vector<double> xs(n_reps);
  auto collect = [&](auto&& per_rep) {
    for (std::size_t k = 0; k < n_reps; ++k) xs[k] = per_rep(reps[k]);
    return estimate(xs);
  };

  for (int i = 0; i < r.n_users; ++i)
    r.throughput_per_user.push_back(collect([&](const ReplicationResult& x) {
      return ratio(x.delivered_per_user[i], x.measured_slots);
    }));
  r.aggregate_throughput = collect([](const ReplicationResult& x) {
    std::int64_t total = 0;
    for (auto d : x.delivered_per_user) total += d;
    return ratio(total, x.measured_slots);
  });

  double delay_sum = 0.0;
  for (const auto& x : reps) {
    delay_sum += x.delay_sum;
    r.delay_samples += x.delay_count;
  }
  r.mean_delay = collect([](const ReplicationResult& x) {
    return x.delay_count > 0 ? x.delay_sum / static_cast<double>(x.delay_count) : kNaN;
  });
  r.mean_delay.mean = r.delay_samples > 0 ? delay_sum / static_cast<double>(r.delay_samples) : kNaN;
  r.delay_low_confidence = r.delay_samples < kMinDelaySamples;

  for (int j = 0; j < kNumRelays; ++j) {
    r.mean_queue[j] = collect([&](const ReplicationResult& x) {
      return x.queue_length_sum[j] / static_cast<double>(x.measured_slots);
    });
    r.empirical_lambda[j] =
        collect([&](const ReplicationResult& x) { return ratio(x.arrivals[j], x.measured_slots); });
    r.empirical_mu[j] = collect(
        [&](const ReplicationResult& x) { return ratio(x.relay_successes[j], x.service_slots[j]); });
    r.empirical_p_empty[j] = collect(
        [&](const ReplicationResult& x) { return ratio(x.empty_slots[j], x.measured_slots); });
    r.stability_verdict[j] = relay_present(config.strategy, j)
                                 ? classify_trend(queue_trend(reps, j))
                                 : StabilityVerdict::Stable;
  }
  return r;
}

TrendEstimate queue_trend(std::span<const ReplicationResult> reps, int relay) {
  TrendEstimate out;
  std::vector<double> slopes;
  double ols_se = 0.0;
  int ols_dof = 0;
  for (const auto& rep : reps) {
    const auto& y = rep.queue_blocks[relay];
    const auto b = static_cast<int>(y.size());
    if (b < 3) continue;
    const double block_len = static_cast<double>(rep.measured_slots) / b;
    const double xbar = (b - 1) / 2.0;
    double ybar = 0.0;
    for (double v : y) ybar += v;
    ybar /= b;
    double sxx = 0.0, sxy = 0.0;
    for (int k = 0; k < b; ++k) {
      sxx += (k - xbar) * (k - xbar);
      sxy += (k - xbar) * (y[k] - ybar);
    }
    const double slope = sxy / sxx;
    double ssr = 0.0;
    for (int k = 0; k < b; ++k) {
      const double e = y[k] - ybar - slope * (k - xbar);
      ssr += e * e;
    }
    ols_se = std::sqrt(ssr / (b - 2) / sxx) / block_len;
    ols_dof = b - 2;
    slopes.push_back(slope / block_len);

    double first = 0.0, second = 0.0;
    for (int k = 0; k < b / 2; ++k) first += y[k];
    for (int k = b / 2; k < b; ++k) second += y[k];
    out.first_half_mean += first / (b / 2);
    out.second_half_mean += second / (b - b / 2);
  }
  const auto n = static_cast<int>(slopes.size());
  if (n == 0) return out;
  out.first_half_mean /= n;
  out.second_half_mean /= n;
  for (double s : slopes) out.slope += s;
  out.slope /= n;
  if (n == 1) {
    const boost::math::students_t dist(ols_dof);
    out.ci_halfwidth = boost::math::quantile(dist, 0.975) * ols_se;
  } else {
    double ss = 0.0;
    for (double s : slopes) ss += (s - out.slope) * (s - out.slope);
    const boost::math::students_t dist(n - 1);
    out.ci_halfwidth = boost::math::quantile(dist, 0.975) * std::sqrt(ss / (n - 1) / n);
  }
  return out;
}

StabilityVerdict classify_trend(const TrendEstimate& trend) {
  const double lo = trend.slope - trend.ci_halfwidth;
  const double hi = trend.slope + trend.ci_halfwidth;
  if (lo > 0.0) return StabilityVerdict::Unstable;
  const bool bounded = trend.second_half_mean <= 2.0 * trend.first_half_mean + 1.0;
  if (lo <= 0.0 && hi >= 0.0 && bounded) return StabilityVerdict::Stable;
  return StabilityVerdict::Inconclusive;
}

int worker_count() {
  if (const char* env = std::getenv("COOPSIM_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

MetricsReport run_serial(const ScenarioConfig& config) {
  require_valid(config);
  std::vector<ReplicationResult> reps;
  reps.reserve(config.replications);
  for (int k = 0; k < config.replications; ++k)
    reps.push_back(simulate_replication(config, replication_seed(config.seed, k)));
  return summarize(config, reps);
}

MetricsReport run(const ScenarioConfig& config) {
  require_valid(config);
  std::vector<ReplicationResult> reps(config.replications);
  parallel_for(config.replications, [&](std::int64_t k) {
    reps[k] = simulate_replication(config, replication_seed(config.seed, static_cast<int>(k)));
  });
  return summarize(config, reps);
}

StabilityProbe stability_probe(const ScenarioConfig& config, int horizon_factor) {
  ScenarioConfig extended = config;
  extended.horizon_slots = config.horizon_slots * horizon_factor;
  extended.warmup_slots = config.warmup_slots * horizon_factor;
  require_valid(extended);
  std::vector<ReplicationResult> reps(extended.replications);
  parallel_for(extended.replications, [&](std::int64_t k) {
    reps[k] = simulate_replication(extended, replication_seed(extended.seed, static_cast<int>(k)));
  });
  StabilityProbe probe;
  for (int j = 0; j < kNumRelays; ++j) {
    if (!relay_present(config.strategy, j)) {
      probe.verdict[j] = StabilityVerdict::Stable;
      continue;
    }
    probe.trend[j] = queue_trend(reps, j);
    probe.verdict[j] = classify_trend(probe.trend[j]);
  }
  return probe;
}

namespace {

template <typename T>
std::vector<T> resize_rows(const std::vector<T>& rows, const std::vector<int>& templates) {
  std::vector<T> out;
  out.reserve(templates.size());
  for (int t : templates) out.push_back(rows[t]);
  return out;
}

// Template source user for each new user index.
std::vector<int> user_templates(const std::optional<std::vector<int>>& base_clusters, int n_users,
                                std::optional<std::vector<int>>& new_clusters) {
  std::vector<int> templates(n_users, 0);
  if (!base_clusters) return templates;
  if (n_users % 2 != 0) throw std::invalid_argument("clustered sweep points need an even N");
  std::array<int, kNumRelays> first{-1, -1};
  for (int i = static_cast<int>(base_clusters->size()) - 1; i >= 0; --i)
    first[(*base_clusters)[i]] = i;
  if (first[0] < 0 || first[1] < 0) throw std::invalid_argument("base scenario has an empty cluster");
  new_clusters = std::vector<int>(n_users);
  for (int i = 0; i < n_users; ++i) {
    const int c = i < n_users / 2 ? 0 : 1;
    (*new_clusters)[i] = c;
    templates[i] = first[c];
  }
  return templates;
}

}  // namespace

ScenarioConfig derive_point(const ScenarioConfig& base, int n_users, std::optional<double> gamma) {
  if (n_users < 1) throw std::invalid_argument("n_users must be >= 1");
  ScenarioConfig out = base;
  if (const auto* p = std::get_if<CollisionParams>(&base.channel)) {
    CollisionParams c = *p;
    const auto templates = user_templates(p->cluster_of, n_users, c.cluster_of);
    c.n_users = n_users;
    c.q_user = resize_rows(p->q_user, templates);
    c.p_user_dest = resize_rows(p->p_user_dest, templates);
    c.p_user_relay = resize_rows(p->p_user_relay, templates);
    out.channel = std::move(c);
  } else {
    const auto& b = std::get<MprParams>(base.channel);
    MprParams m = b;
    auto templates = user_templates(b.cluster_of, n_users, m.cluster_of);
    m.n_users = n_users;
    m.q_user = resize_rows(b.q_user, templates);
    for (int j = 0; j < kNumRelays; ++j) templates.push_back(b.n_users + j);
    m.distance = resize_rows(b.distance, templates);
    m.pathloss = resize_rows(b.pathloss, templates);
    m.fading_param = resize_rows(b.fading_param, templates);
    m.tx_power = resize_rows(b.tx_power, templates);
    if (gamma) m.sinr_threshold.fill(*gamma);
    out.channel = std::move(m);
  }
  return out;
}

std::uint64_t point_seed(std::uint64_t base_seed, int n_users, std::optional<double> gamma,
                         Strategy strategy) {
  return derive_seed(base_seed, {static_cast<std::uint64_t>(n_users),
                                 gamma ? seed_word(*gamma) : 0ULL,
                                 static_cast<std::uint64_t>(strategy)});
}

namespace {

std::vector<ScenarioConfig> sweep_points(const ScenarioConfig& base, std::span<const int> n_values,
                                         std::span<const double> gamma_values) {
  std::vector<std::optional<double>> gammas;
  if (gamma_values.empty() || base.channel_kind() == ChannelKind::Collision)
    gammas.emplace_back(std::nullopt);
  else
    gammas.assign(gamma_values.begin(), gamma_values.end());

  std::vector<ScenarioConfig> points;
  std::string errors;
  for (int n : n_values) {
    for (const auto& g : gammas) {
      ScenarioConfig point;
      try {
        point = derive_point(base, n, g);
      } catch (const std::invalid_argument& e) {
        errors += "N=" + std::to_string(n) + ": " + e.what() + "\n";
        continue;
      }
      std::optional<double> seed_gamma = g;
      if (!seed_gamma && point.channel_kind() == ChannelKind::Mpr)
        seed_gamma = std::get<MprParams>(point.channel).sinr_threshold[2];
      point.seed = point_seed(base.seed, n, seed_gamma, base.strategy);
      const ValidationResult v = validate(point);
      if (!v.ok()) errors += "N=" + std::to_string(n) + ":\n" + v.describe();
      points.push_back(std::move(point));
    }
  }
  if (!errors.empty()) throw std::invalid_argument(errors);
  return points;
}

}  // namespace

std::vector<MetricsReport> sweep_serial(const ScenarioConfig& base, std::span<const int> n_values,
                                        std::span<const double> gamma_values) {
  std::vector<MetricsReport> out;
  for (const auto& point : sweep_points(base, n_values, gamma_values)) out.push_back(run_serial(point));
  return out;
}

std::vector<MetricsReport> sweep(const ScenarioConfig& base, std::span<const int> n_values,
                                 std::span<const double> gamma_values) {
  const auto points = sweep_points(base, n_values, gamma_values);
  std::vector<std::vector<ReplicationResult>> results(points.size());
  std::vector<std::pair<std::size_t, int>> tasks;
  for (std::size_t p = 0; p < points.size(); ++p) {
    results[p].resize(points[p].replications);
    for (int k = 0; k < points[p].replications; ++k) tasks.emplace_back(p, k);
  }
  parallel_for(static_cast<std::int64_t>(tasks.size()), [&](std::int64_t t) {
    const auto [p, k] = tasks[t];
    results[p][k] = simulate_replication(points[p], replication_seed(points[p].seed, k));
  });
  std::vector<MetricsReport> out;
  out.reserve(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) out.push_back(summarize(points[p], results[p]));
  return out;
}

}  // namespace coopsim
