// scm_arena: run, replay and compare supply-chain trading games.
//
//   scm_arena run --config c.json --seed 7 --log out.jsonl
//   scm_arena tournament --spec t.json --out results/
//   scm_arena replay --log out.jsonl --config c.json
//   scm_arena report --log out.jsonl [--out daily.csv]

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "scm/agents.hpp"
#include "scm/config.hpp"
#include "scm/errors.hpp"
#include "scm/events.hpp"
#include "scm/harness.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void print_summary(std::ostream& out, const scm::GameResult& result) {
  out << "agent_id,rank,balance,revenue,material,storage,penalty,interest,bids,won,delivered,late,"
         "cancelled,utilization\n";
  for (std::size_t rank = 0; rank < result.ranking.size(); ++rank) {
    const auto& a = result.agents[scm::index_of(result.ranking[rank])];
    char util[32];
    std::snprintf(util, sizeof util, "%.4f", a.utilization);
    out << scm::raw(a.agent) << ',' << rank + 1 << ',' << a.balance << ',' << a.revenue << ','
        << a.material << ',' << a.storage << ',' << a.penalty << ',' << a.interest << ',' << a.bids << ','
        << a.won << ',' << a.delivered << ',' << a.late << ',' << a.cancelled << ',' << util << '\n';
  }
}

scm::GameConfig config_or_default(const std::string& path) {
  return path.empty() ? scm::default_game_config() : scm::load_config(path);
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& log_path) {
  auto config = config_or_default(config_path);
  if (seed) config.seed = *seed;
  const auto run = scm::run_game(config);
  if (!log_path.empty()) {
    std::ofstream out(log_path, std::ios::binary);
    if (!out) throw scm::Error("cannot write log '" + log_path + "'");
    scm::write_event_log(out, run.header, run.log);
  }
  std::cout << "seed " << config.seed << ", " << config.horizon_days << " days, " << run.log.size()
            << " events\n";
  print_summary(std::cout, run.result);
  return 0;
}

int cmd_tournament(const std::string& spec_path, const std::string& out_dir, unsigned threads) {
  const auto spec = scm::load_tournament_spec(spec_path);
  std::filesystem::create_directories(out_dir);
  scm::TournamentOptions options;
  options.log_dir = out_dir;
  options.threads = threads;
  const auto rows = scm::run_tournament(spec, options);
  const auto table = scm::aggregate(rows);

  std::ofstream games(std::filesystem::path(out_dir) / "games.csv");
  scm::write_games_csv(games, rows);
  std::ofstream summary(std::filesystem::path(out_dir) / "summary.csv");
  scm::write_summary_csv(summary, table);

  std::cout << spec.lineups.size() * spec.seeds.size() << " games on "
            << scm::worker_count(spec.lineups.size() * spec.seeds.size(), threads) << " workers\n";
  scm::write_summary_csv(std::cout, table);
  return 0;
}

int cmd_replay(const std::string& log_path, const std::string& config_path) {
  const auto loaded = scm::read_event_log_file(log_path);
  const auto result = scm::replay(loaded, config_or_default(config_path));
  std::cout << "ok: " << loaded.lines.size() << " events replayed, ledgers match\n";
  print_summary(std::cout, result);
  return 0;
}

int cmd_report(const std::string& log_path, const std::string& out_path) {
  const auto loaded = scm::read_event_log_file(log_path);
  const auto events = scm::parse_events(loaded);
  if (out_path.empty()) {
    scm::write_daily_report(std::cout, events, loaded.header.num_agents);
  } else {
    std::ofstream out(out_path);
    if (!out) throw scm::Error("cannot write '" + out_path + "'");
    scm::write_daily_report(out, events, loaded.header.num_agents);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic supply-chain trading game simulator"};
  app.require_subcommand(1);

  std::string config_path, log_path, spec_path, out_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "Play one game");
  run->add_option("--config", config_path, "Game config (JSON); defaults when omitted")->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Overrides the config seed");
  run->add_option("--log", log_path, "Write the event log here (JSON lines)");

  auto* tour = app.add_subcommand("tournament", "Play every (line-up, seed) game");
  tour->add_option("--spec", spec_path, "Tournament spec (JSON)")->required()->check(CLI::ExistingFile);
  tour->add_option("--out", out_path, "Output directory")->required();
  tour->add_option("--threads", threads, "Worker cap (default: SCM_ARENA_THREADS or all cores)");

  auto* rep = app.add_subcommand("replay", "Verify an event log by re-simulation");
  rep->add_option("--log", log_path, "Event log")->required()->check(CLI::ExistingFile);
  rep->add_option("--config", config_path, "Config the log was produced with")->check(CLI::ExistingFile);

  auto* report = app.add_subcommand("report", "Per-day CSV metrics from an event log");
  report->add_option("--log", log_path, "Event log")->required()->check(CLI::ExistingFile);
  report->add_option("--out", out_path, "CSV path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, seed, log_path);
    if (*tour) return cmd_tournament(spec_path, out_path, threads);
    if (*rep) return cmd_replay(log_path, config_path);
    if (*report) return cmd_report(log_path, out_path);
  } catch (const scm::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const scm::ReplayDivergence& e) {
    std::cerr << "replay failed: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
