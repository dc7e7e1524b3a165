#include "coopsim/report_csv.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace coopsim {

namespace {

std::optional<double> finite(double x) {
  if (std::isfinite(x)) return x;
  return std::nullopt;
}

std::string number(const std::optional<double>& x) {
  return x ? fmt::format("{:.10g}", *x) : std::string("NA");
}

}  // namespace

std::vector<CsvRow> report_rows(const MetricsReport& r) {
  std::vector<CsvRow> rows;
  auto add = [&](std::string metric, std::optional<double> value, std::optional<double> ci) {
    rows.push_back({r.channel, r.strategy, r.n_users, r.gamma, std::move(metric), value, ci, r.seed,
                    r.slots, r.reps});
  };
  auto add_estimate = [&](std::string metric, const Estimate& e) {
    add(std::move(metric), finite(e.mean), finite(e.ci_halfwidth));
  };

  add_estimate("aggregate_throughput", r.aggregate_throughput);
  add_estimate("throughput_per_user", r.throughput_user_mean());
  for (std::size_t i = 0; i < r.throughput_per_user.size(); ++i)
    add_estimate(fmt::format("throughput_user_{}", i + 1), r.throughput_per_user[i]);
  if (r.delay_low_confidence)
    add("mean_delay", std::nullopt, std::nullopt);
  else
    add_estimate("mean_delay", r.mean_delay);
  add("delay_samples", static_cast<double>(r.delay_samples), std::nullopt);

  for (int j = 0; j < kNumRelays; ++j) {
    if (!relay_present(r.strategy, j)) continue;
    const std::string suffix = fmt::format("_r{}", j + 1);
    add_estimate("mean_queue" + suffix, r.mean_queue[j]);
    add_estimate("lambda" + suffix, r.empirical_lambda[j]);
    add_estimate("mu" + suffix, r.empirical_mu[j]);
    add_estimate("p_empty" + suffix, r.empirical_p_empty[j]);
    add("stability" + suffix, static_cast<double>(r.stability_verdict[j]), std::nullopt);
  }
  return rows;
}

std::string format_row(const CsvRow& row) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{}", to_string(row.channel),
                     to_string(row.strategy), row.n_users, number(row.gamma), row.metric,
                     number(row.value), number(row.ci_halfwidth), row.seed, row.slots, row.reps);
}

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& row : rows) out << format_row(row) << '\n';
}

}  // namespace coopsim
