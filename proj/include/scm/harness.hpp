#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "scm/config.hpp"
#include "scm/engine.hpp"

namespace scm {

struct Lineup {
  std::string name;
  /// One binding per agent slot.
  std::vector<AgentBinding> agents;
};

struct TournamentSpec {
  GameConfig base;
  std::vector<Lineup> lineups;
  std::vector<std::uint64_t> seeds;
  /// Seed k shifts every slot to agent id (slot + k) mod n.
  bool rotate_ids = false;

  /// Throws ConfigError: needs >= 2 line-ups or >= 2 seeds, and every line-up
  /// must fill exactly base.num_agents slots.
  void validate() const;
  /// Stable id used to refuse aggregating results of different specs.
  std::string fingerprint() const;
};

/// Keys: base_config (object) or base_config_path, lineups [{name, agents}],
/// seeds (list) or seed_count (seeds 1..n), rotate_ids.
TournamentSpec tournament_spec_from_json(const nlohmann::json& doc, const std::string& base_dir = ".");
TournamentSpec load_tournament_spec(const std::string& path);

/// The config of one tournament game, ids rotated if requested.
GameConfig tournament_game_config(const TournamentSpec& spec, std::size_t lineup, std::size_t seed_index);
/// Agent id that plays `slot` in game `seed_index`.
int slot_agent(const TournamentSpec& spec, int slot, std::size_t seed_index);

/// One row of games.csv: one agent slot in one game.
struct GameRow {
  int slot = 0;
  std::string lineup;
  std::uint64_t seed = 0;
  AgentResult result;
  std::string spec;
};

/// Rows of one finished game, in slot order.
std::vector<GameRow> game_rows(const TournamentSpec& spec, std::size_t lineup, std::size_t seed_index,
                               const GameResult& result);

struct TournamentOptions {
  /// When set, every game's event log is written to <dir>/logs/.
  std::optional<std::string> log_dir;
  /// 0: SCM_ARENA_THREADS if set, else hardware concurrency.
  unsigned threads = 0;
};

/// Runs every (line-up, seed) game on a worker pool. Rows come back sorted by
/// (line-up order, seed order, slot) regardless of completion order.
std::vector<GameRow> run_tournament(const TournamentSpec& spec, const TournamentOptions& options = {});

/// Worker count for `jobs` games honoring SCM_ARENA_THREADS.
unsigned worker_count(std::size_t jobs, unsigned requested = 0);

std::string log_file_name(const std::string& lineup, std::uint64_t seed);

struct AggregateRow {
  std::string lineup;
  int slot = 0;
  std::int64_t games = 0;
  double mean_balance = 0.0;
  double median_balance = 0.0;
  /// Rank-1 finishes: top balance in its game, ties to the lower slot.
  std::int64_t wins = 0;
  /// won / bids
  double auction_win_rate = 0.0;
  /// (delivered - late) / won
  double on_time_rate = 0.0;
};

/// Per (line-up, slot) table ordered by mean balance, best first (ties by
/// line-up then slot). Throws ConfigError if rows come from different specs.
std::vector<AggregateRow> aggregate(std::span<const GameRow> rows);

inline constexpr const char* kGamesCsvHeader =
    "agent_id,lineup,seed,balance,revenue,material,storage,penalty,interest,won,delivered,late,"
    "cancelled,utilization";
inline constexpr const char* kSummaryCsvHeader =
    "lineup,agent_id,games,mean_balance,median_balance,wins,auction_win_rate,on_time_rate";

void write_games_csv(std::ostream& out, std::span<const GameRow> rows);
void write_summary_csv(std::ostream& out, std::span<const AggregateRow> rows);
/// Parses games.csv back; `spec` is filled from the argument.
std::vector<GameRow> read_games_csv(std::istream& in, const std::string& spec);

/// Per-day, per-agent metrics from an event log:
/// day,agent_id,balance,component_units,finished_units,cycles_used,won,delivered,rfqs,cleared,mean_win_price
void write_daily_report(std::ostream& out, const EventLog& log, int num_agents);

}  // namespace scm
