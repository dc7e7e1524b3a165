#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "coopsim/model.hpp"
#include "coopsim/report_csv.hpp"

namespace coopsim {

enum class FigureId : std::uint8_t {
  StabilityRegion,
  SimpleBounds,
  ClusterBounds,
  ThroughputCompare,
  DelayCompareCollision,
  MprAggregate,
  MprPerUser,
  MprQueue,
  MprDelay,
};

inline constexpr std::array kAllFigures = {
    FigureId::StabilityRegion,   FigureId::SimpleBounds,          FigureId::ClusterBounds,
    FigureId::ThroughputCompare, FigureId::DelayCompareCollision, FigureId::MprAggregate,
    FigureId::MprPerUser,        FigureId::MprQueue,              FigureId::MprDelay,
};

std::string_view to_string(FigureId id);
std::optional<FigureId> parse_figure_id(std::string_view name);

/// Overrides applied on top of a figure's default grid.
struct FigureOptions {
  std::optional<std::int64_t> slots;
  std::optional<int> reps;
  std::uint64_t seed = 1;
  /// Use the full user range instead of the desk-scale one.
  bool full = false;
};

/// Parameter grid behind a figure.
struct FigureGrid {
  ChannelKind channel = ChannelKind::Collision;
  std::vector<int> n_values;
  std::vector<double> gammas;  // MPR only
  std::vector<Strategy> strategies;
  std::int64_t slots = 0;
  int reps = 0;
};

FigureGrid figure_grid(FigureId id, const FigureOptions& options);

/// Base scenario of a figure for one strategy, using the reference parameters.
ScenarioConfig figure_base(const FigureGrid& grid, Strategy strategy, std::uint64_t seed);

/// Tidy rows for a simulation-backed figure; bound figures append
/// throughput_upper / throughput_lower rows per user count.
std::vector<CsvRow> figure_rows(FigureId id, const FigureOptions& options);

/// Writes the figure's CSV file(s) into `out_dir` and returns their paths.
/// StabilityRegion writes one `lambda_r1,lambda_r2,region_id` file per N.
std::vector<std::filesystem::path> write_figure(FigureId id, const std::filesystem::path& out_dir,
                                                const FigureOptions& options);

}  // namespace coopsim
