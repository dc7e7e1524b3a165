#include "coopsim/figures.hpp"

#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "coopsim/analysis.hpp"
#include "coopsim/sim.hpp"

namespace coopsim {

namespace {

constexpr std::array<std::string_view, 9> kFigureNames = {
    "stability_region",   "simple_bounds",           "cluster_bounds",
    "throughput_compare", "delay_compare_collision", "mpr_aggregate",
    "mpr_per_user",       "mpr_queue",               "mpr_delay",
};

std::vector<int> range(int first, int last, int step) {
  std::vector<int> out;
  for (int n = first; n <= last; n += step) out.push_back(n);
  return out;
}

bool is_clustered(Strategy s) { return s == Strategy::TwoRelayClustered; }

}  // namespace

std::string_view to_string(FigureId id) { return kFigureNames[static_cast<std::size_t>(id)]; }

std::optional<FigureId> parse_figure_id(std::string_view name) {
  for (std::size_t i = 0; i < kFigureNames.size(); ++i)
    if (kFigureNames[i] == name) return static_cast<FigureId>(i);
  return std::nullopt;
}

FigureGrid figure_grid(FigureId id, const FigureOptions& options) {
  FigureGrid g;
  const std::vector<Strategy> collision_compare = {Strategy::NoRelay, Strategy::OneRelay,
                                                   Strategy::TwoRelaySimple,
                                                   Strategy::TwoRelayClustered};
  const std::vector<Strategy> mpr_all = {Strategy::NoRelay, Strategy::OneRelay,
                                         Strategy::TwoRelaySimple, Strategy::TwoRelaySmallerQueue,
                                         Strategy::TwoRelayClustered};
  switch (id) {
    case FigureId::StabilityRegion:
      g.n_values = {2, 4, 8};
      break;
    case FigureId::SimpleBounds:
      g.n_values = range(2, 14, 2);
      g.strategies = {Strategy::TwoRelaySimple};
      break;
    case FigureId::ClusterBounds:
      g.n_values = range(2, 14, 2);
      g.strategies = {Strategy::TwoRelayClustered};
      break;
    case FigureId::ThroughputCompare:
    case FigureId::DelayCompareCollision:
      g.n_values = range(2, 14, 2);
      g.strategies = collision_compare;
      break;
    case FigureId::MprAggregate:
    case FigureId::MprPerUser:
      g.channel = ChannelKind::Mpr;
      g.n_values = range(2, options.full ? 50 : 38, 4);
      g.strategies = mpr_all;
      break;
    case FigureId::MprQueue:
      g.channel = ChannelKind::Mpr;
      g.n_values = range(2, options.full ? 50 : 38, 4);
      g.strategies = {Strategy::OneRelay, Strategy::TwoRelaySimple, Strategy::TwoRelaySmallerQueue,
                      Strategy::TwoRelayClustered};
      break;
    case FigureId::MprDelay:
      g.channel = ChannelKind::Mpr;
      g.n_values = range(2, options.full ? 50 : 30, 4);
      g.strategies = mpr_all;
      break;
  }
  if (g.channel == ChannelKind::Mpr) {
    g.gammas = {0.2, 1.2, 2.5};
    g.slots = 200'000;
    g.reps = 4;
  } else {
    g.slots = 1'000'000;
    g.reps = 10;
  }
  if (options.slots) g.slots = *options.slots;
  if (options.reps) g.reps = *options.reps;
  return g;
}

ScenarioConfig figure_base(const FigureGrid& grid, Strategy strategy, std::uint64_t seed) {
  const int n = grid.n_values.empty() ? 2 : grid.n_values.front();
  ScenarioConfig c;
  if (grid.channel == ChannelKind::Collision)
    c.channel = table1_params(n, is_clustered(strategy));
  else
    c.channel = table2_topology(n, is_clustered(strategy));
  c.strategy = strategy;
  c.horizon_slots = grid.slots;
  c.warmup_slots = grid.slots / 10;
  c.seed = seed;
  c.replications = grid.reps;
  return c;
}

std::vector<CsvRow> figure_rows(FigureId id, const FigureOptions& options) {
  if (id == FigureId::StabilityRegion)
    throw std::invalid_argument("stability_region is analytical; use write_figure");
  const FigureGrid grid = figure_grid(id, options);
  std::vector<CsvRow> rows;
  for (Strategy s : grid.strategies) {
    const ScenarioConfig base = figure_base(grid, s, options.seed);
    for (const MetricsReport& r : sweep(base, grid.n_values, grid.gammas)) {
      auto point_rows = report_rows(r);
      rows.insert(rows.end(), point_rows.begin(), point_rows.end());
      if (id != FigureId::SimpleBounds && id != FigureId::ClusterBounds) continue;
      const CollisionParams p = table1_params(r.n_users, is_clustered(s));
      const auto b = is_clustered(s) ? analysis::clustered_throughput_bounds(p, 0)
                                     : analysis::throughput_bounds(p, 0);
      for (auto [metric, value] : {std::pair{"throughput_upper", b.per_user_upper},
                                   std::pair{"throughput_lower", b.per_user_lower}})
        rows.push_back({r.channel, s, r.n_users, std::nullopt, metric, value, 0.0, r.seed, r.slots,
                        r.reps});
    }
  }
  return rows;
}

std::vector<std::filesystem::path> write_figure(FigureId id, const std::filesystem::path& out_dir,
                                                const FigureOptions& options) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  auto open = [&](const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    written.push_back(path);
    return out;
  };

  if (id == FigureId::StabilityRegion) {
    for (int n : figure_grid(id, options).n_values) {
      auto out = open(out_dir / fmt::format("stability_region_n{}.csv", n));
      analysis::stability_region(table1_params(n, false), 64).write_csv(out);
    }
    return written;
  }
  const auto rows = figure_rows(id, options);
  auto out = open(out_dir / fmt::format("{}.csv", to_string(id)));
  write_csv(out, rows);
  return written;
}

}  // namespace coopsim
