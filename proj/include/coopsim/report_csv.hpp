#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coopsim/sim.hpp"

namespace coopsim {

/// One row of the tidy results schema:
/// channel,strategy,n_users,gamma,metric,value,ci_halfwidth,seed,slots,reps
///
/// Units: packets/slot for throughput and rates, slots for delay, packets for
/// queue sizes. Missing values (no gamma, unavailable CI, low-confidence
/// delay) are written as NA.
struct CsvRow {
  ChannelKind channel = ChannelKind::Collision;
  Strategy strategy = Strategy::TwoRelaySimple;
  int n_users = 0;
  std::optional<double> gamma;
  std::string metric;
  std::optional<double> value;
  std::optional<double> ci_halfwidth;
  std::uint64_t seed = 0;
  std::int64_t slots = 0;
  int reps = 0;
};

inline constexpr const char* kCsvHeader =
    "channel,strategy,n_users,gamma,metric,value,ci_halfwidth,seed,slots,reps";

/// Metric rows of a report. Relay metrics are emitted only for relays the
/// strategy uses; stability verdicts are encoded 0 stable, 1 unstable,
/// 2 inconclusive.
std::vector<CsvRow> report_rows(const MetricsReport& report);

std::string format_row(const CsvRow& row);
void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);

}  // namespace coopsim
