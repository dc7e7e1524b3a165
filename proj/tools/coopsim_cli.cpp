// coopsim: command-line front end.
//
//   coopsim analyze  <scenario.json> [--csv out.csv]
//   coopsim simulate <scenario.json> [--slots N] [--reps R] [--seed S] [--out out.csv]
//   coopsim figure   <figure_id> --out <dir> [--slots N] [--reps R] [--seed S] [--full]
//
// Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 unknown figure id.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "coopsim/analysis.hpp"
#include "coopsim/figures.hpp"
#include "coopsim/report_csv.hpp"
#include "coopsim/scenario_io.hpp"
#include "coopsim/sim.hpp"

namespace {

using namespace coopsim;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;
constexpr int kExitUnknownFigure = 4;

struct CliError {
  int code;
  std::string message;
};

ScenarioConfig load_checked(const std::string& path) {
  ScenarioConfig config;
  try {
    config = load_scenario(path);
  } catch (const ScenarioIoError& e) {
    throw CliError{kExitIo, e.what()};
  } catch (const ScenarioFormatError& e) {
    throw CliError{kExitInvalid, e.what()};
  }
  return config;
}

void require_valid(const ScenarioConfig& config) {
  const ValidationResult v = validate(config);
  if (!v.ok()) throw CliError{kExitInvalid, "invalid scenario:\n" + v.describe()};
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CliError{kExitIo, fmt::format("cannot write {}", path)};
  return out;
}

int cmd_analyze(const std::string& scenario_path, const std::string& csv_path) {
  const ScenarioConfig config = load_checked(scenario_path);
  require_valid(config);
  const auto* params = std::get_if<CollisionParams>(&config.channel);
  if (!params)
    throw CliError{kExitInvalid, "analyze: closed forms exist only for the collision channel"};

  std::vector<CsvRow> rows;
  auto row = [&](std::string metric, double value) {
    rows.push_back({config.channel_kind(), config.strategy, params->n_users, std::nullopt,
                    std::move(metric), value, std::nullopt, config.seed, config.horizon_slots,
                    config.replications});
  };

  fmt::print("collision channel, N = {}\n", params->n_users);
  for (int dummy = 0; dummy < kNumRelays; ++dummy) {
    const int other = 1 - dummy;
    const auto r = analysis::dominant_rates(*params, dummy);
    const auto s = fmt::format("s{}", dummy + 1);
    fmt::print("\ndominant system S{} (R{} sends dummy packets)\n", dummy + 1, dummy + 1);
    fmt::print("  lambda_R{},0      {:.10g}\n", other + 1, r.lambda_0);
    fmt::print("  lambda_R{},1      {:.10g}\n", other + 1, r.lambda_1);
    fmt::print("  Pr(Q_R{} = 0)     {:.10g}\n", other + 1, r.p_empty);
    fmt::print("  lambda_R{}        {:.10g}\n", other + 1, r.lambda);
    fmt::print("  mu_R{}            {:.10g}\n", other + 1, r.mu);
    fmt::print("  lambda_R{}        {:.10g}\n", dummy + 1, r.dummy_relay.lambda);
    fmt::print("  mu_R{}            {:.10g}\n", dummy + 1, r.dummy_relay.mu);
    fmt::print("  R{} queue         {}\n", other + 1, r.stable ? "stable" : "unstable");
    const auto o = fmt::format("r{}", other + 1);
    const auto d = fmt::format("r{}", dummy + 1);
    row(fmt::format("lambda_{}_0_{}", o, s), r.lambda_0);
    row(fmt::format("lambda_{}_1_{}", o, s), r.lambda_1);
    row(fmt::format("p_empty_{}_{}", o, s), r.p_empty);
    row(fmt::format("lambda_{}_{}", o, s), r.lambda);
    row(fmt::format("mu_{}_{}", o, s), r.mu);
    row(fmt::format("lambda_{}_{}", d, s), r.dummy_relay.lambda);
    row(fmt::format("mu_{}_{}", d, s), r.dummy_relay.mu);
  }

  fmt::print("\n");
  for (int j = 0; j < kNumRelays; ++j) {
    const double q = analysis::q_min(*params, j);
    fmt::print("q_R{},min          {:.10g}\n", j + 1, q);
    row(fmt::format("q_min_r{}", j + 1), q);
  }

  fmt::print("\nper-user throughput bounds{}\n", params->cluster_of ? " (clustered)" : "");
  fmt::print("  {:>5}  {:>14}  {:>14}\n", "user", "lower", "upper");
  for (int i = 0; i < params->n_users; ++i) {
    const auto b = params->cluster_of ? analysis::clustered_throughput_bounds(*params, i)
                                      : analysis::throughput_bounds(*params, i);
    fmt::print("  {:>5}  {:>14.10g}  {:>14.10g}\n", i + 1, b.per_user_lower, b.per_user_upper);
    row(fmt::format("throughput_lower_user_{}", i + 1), b.per_user_lower);
    row(fmt::format("throughput_upper_user_{}", i + 1), b.per_user_upper);
  }

  if (!csv_path.empty()) {
    auto out = open_output(csv_path);
    write_csv(out, rows);
  }
  return kExitOk;
}

struct SimulateOptions {
  std::optional<std::int64_t> slots;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_simulate(const std::string& scenario_path, const SimulateOptions& opt) {
  ScenarioConfig config = load_checked(scenario_path);
  if (opt.slots) {
    config.horizon_slots = *opt.slots;
    config.warmup_slots = *opt.slots / 10;
  }
  if (opt.reps) config.replications = *opt.reps;
  if (opt.seed) config.seed = *opt.seed;
  require_valid(config);

  const auto rows = report_rows(run(config));
  if (opt.out.empty()) {
    write_csv(std::cout, rows);
  } else {
    auto out = open_output(opt.out);
    write_csv(out, rows);
    if (!out) throw CliError{kExitIo, fmt::format("write to {} failed", opt.out)};
  }
  return kExitOk;
}

int cmd_figure(const std::string& figure_name, const std::string& out_dir,
               const FigureOptions& options) {
  const auto id = parse_figure_id(figure_name);
  if (!id) {
    std::string known;
    for (FigureId f : kAllFigures) known += fmt::format(" {}", to_string(f));
    throw CliError{kExitUnknownFigure,
                   fmt::format("unknown figure id '{}'; known:{}", figure_name, known)};
  }
  if (options.reps && *options.reps < 1) throw CliError{kExitInvalid, "--reps must be >= 1"};
  if (options.slots && *options.slots < 10) throw CliError{kExitInvalid, "--slots must be >= 10"};
  std::vector<std::filesystem::path> files;
  try {
    files = write_figure(*id, out_dir, options);
  } catch (const std::filesystem::filesystem_error& e) {
    throw CliError{kExitIo, e.what()};
  }
  for (const auto& f : files) fmt::print("{}\n", f.string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-relay cooperative random-access network: analysis and simulation"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string csv_path;
  auto* analyze = app.add_subcommand("analyze", "Closed-form collision-channel results");
  analyze->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  analyze->add_option("--csv", csv_path, "Also write the values as tidy CSV");

  SimulateOptions sim_opt;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of one scenario");
  simulate->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  simulate->add_option("--slots", sim_opt.slots, "Horizon per replication (warmup = 10%)");
  simulate->add_option("--reps", sim_opt.reps, "Number of replications");
  simulate->add_option("--seed", sim_opt.seed, "Base seed");
  simulate->add_option("--out", sim_opt.out, "Output CSV (default: stdout)");

  std::string figure_name;
  std::string out_dir;
  FigureOptions fig_opt;
  auto* figure = app.add_subcommand("figure", "Emit the CSV grid behind one figure");
  figure->add_option("figure_id", figure_name, "Figure id")->required();
  figure->add_option("--out", out_dir, "Output directory")->required();
  figure->add_option("--slots", fig_opt.slots, "Horizon per replication");
  figure->add_option("--reps", fig_opt.reps, "Replications per grid point");
  figure->add_option("--seed", fig_opt.seed, "Base seed");
  figure->add_flag("--full", fig_opt.full, "Use the full user range");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*analyze) return cmd_analyze(scenario_path, csv_path);
    if (*simulate) return cmd_simulate(scenario_path, sim_opt);
    if (*figure) return cmd_figure(figure_name, out_dir, fig_opt);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitInvalid;
}
