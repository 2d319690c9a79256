#include "scm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "scm/agents.hpp"
#include "scm/errors.hpp"
#include "scm/rng.hpp"

namespace scm {

using nlohmann::json;

void TournamentSpec::validate() const {
  base.validate();
  if (lineups.empty()) throw ConfigError("invalid tournament: no line-ups");
  if (seeds.empty()) throw ConfigError("invalid tournament: no seeds");
  if (lineups.size() < 2 && seeds.size() < 2) {
    throw ConfigError("invalid tournament: needs at least 2 line-ups or 2 seeds");
  }
  std::set<std::string> names;
  for (const auto& l : lineups) {
    if (l.name.empty() || l.name.find_first_of(",\n\"") != std::string::npos) {
      throw ConfigError("invalid tournament: line-up names must be non-empty without commas or quotes");
    }
    if (!names.insert(l.name).second) throw ConfigError("invalid tournament: duplicate line-up '" + l.name + "'");
    if (static_cast<int>(l.agents.size()) != base.num_agents) {
      throw ConfigError("invalid tournament: line-up '" + l.name + "' has " +
                        std::to_string(l.agents.size()) + " agents, expected " +
                        std::to_string(base.num_agents));
    }
  }
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) throw ConfigError("invalid tournament: duplicate seeds");
}

std::string TournamentSpec::fingerprint() const {
  json doc{{"base", config_hash(base)}, {"seeds", seeds}, {"rotate_ids", rotate_ids}};
  json ls = json::array();
  for (const auto& l : lineups) {
    json agents = json::array();
    for (const auto& a : l.agents) agents.push_back(agent_binding_to_json(a));
    ls.push_back({{"name", l.name}, {"agents", agents}});
  }
  doc["lineups"] = ls;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(doc.dump())));
  return buf;
}

TournamentSpec tournament_spec_from_json(const json& doc, const std::string& base_dir) {
  try {
    TournamentSpec spec;
    if (auto it = doc.find("base_config"); it != doc.end()) {
      spec.base = config_from_json(*it, base_dir);
    } else if (auto p = doc.find("base_config_path"); p != doc.end()) {
      std::filesystem::path path = p->get<std::string>();
      if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
      spec.base = load_config(path.string());
    } else {
      spec.base = default_game_config();
    }

    for (const auto& l : doc.at("lineups")) {
      Lineup lineup;
      lineup.name = l.at("name").get<std::string>();
      const auto& agents = l.at("agents");
      for (std::size_t i = 0; i < agents.size(); ++i) {
        const AgentBinding& base = i < spec.base.agents.size() ? spec.base.agents[i] : AgentBinding{};
        lineup.agents.push_back(agent_binding_from_json(agents[i], base));
      }
      spec.lineups.push_back(std::move(lineup));
    }
    if (auto it = doc.find("seeds"); it != doc.end()) {
      spec.seeds = it->get<std::vector<std::uint64_t>>();
    } else {
      const int count = doc.value("seed_count", 1);
      for (int i = 1; i <= count; ++i) spec.seeds.push_back(static_cast<std::uint64_t>(i));
    }
    spec.rotate_ids = doc.value("rotate_ids", false);
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed tournament spec: ") + e.what());
  }
}

TournamentSpec load_tournament_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tournament spec '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("tournament spec '" + path + "' is not valid JSON: " + e.what());
  }
  return tournament_spec_from_json(doc, std::filesystem::path(path).parent_path().string());
}

int slot_agent(const TournamentSpec& spec, int slot, std::size_t seed_index) {
  if (!spec.rotate_ids) return slot;
  const int n = spec.base.num_agents;
  return static_cast<int>((static_cast<std::size_t>(slot) + seed_index) % static_cast<std::size_t>(n));
}

GameConfig tournament_game_config(const TournamentSpec& spec, std::size_t lineup, std::size_t seed_index) {
  GameConfig config = spec.base;
  config.seed = spec.seeds.at(seed_index);
  const auto& agents = spec.lineups.at(lineup).agents;
  for (int slot = 0; slot < config.num_agents; ++slot) {
    config.agents[static_cast<std::size_t>(slot_agent(spec, slot, seed_index))] =
        agents[static_cast<std::size_t>(slot)];
  }
  return config;
}

std::vector<GameRow> game_rows(const TournamentSpec& spec, std::size_t lineup, std::size_t seed_index,
                               const GameResult& result) {
  std::vector<GameRow> rows;
  const std::string fp = spec.fingerprint();
  for (int slot = 0; slot < spec.base.num_agents; ++slot) {
    GameRow row;
    row.slot = slot;
    row.lineup = spec.lineups.at(lineup).name;
    row.seed = spec.seeds.at(seed_index);
    row.result = result.agents.at(static_cast<std::size_t>(slot_agent(spec, slot, seed_index)));
    row.spec = fp;
    rows.push_back(std::move(row));
  }
  return rows;
}

unsigned worker_count(std::size_t jobs, unsigned requested) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("SCM_ARENA_THREADS"); env && *env) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end && *end == '\0' && v >= 1) n = static_cast<unsigned>(v);
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

std::string log_file_name(const std::string& lineup, std::uint64_t seed) {
  std::string safe;
  for (char ch : lineup) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                    ch == '-' || ch == '_';
    safe += ok ? ch : '_';
  }
  return safe + "_seed" + std::to_string(seed) + ".jsonl";
}

std::vector<GameRow> run_tournament(const TournamentSpec& spec, const TournamentOptions& options) {
  spec.validate();
  const std::size_t jobs = spec.lineups.size() * spec.seeds.size();
  std::vector<std::vector<GameRow>> results(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  if (options.log_dir) std::filesystem::create_directories(std::filesystem::path(*options.log_dir) / "logs");

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      const std::size_t lineup = job / spec.seeds.size();
      const std::size_t seed_index = job % spec.seeds.size();
      try {
        const GameConfig config = tournament_game_config(spec, lineup, seed_index);
        const GameRun run = run_game(config);
        if (options.log_dir) {
          const auto path = std::filesystem::path(*options.log_dir) / "logs" /
                            log_file_name(spec.lineups[lineup].name, config.seed);
          std::ofstream out(path, std::ios::binary);
          if (!out) throw Error("cannot write " + path.string());
          write_event_log(out, run.header, run.log);
        }
        results[job] = game_rows(spec, lineup, seed_index, run.result);
      } catch (...) {
        errors[job] = std::current_exception();
      }
    }
  };

  const unsigned n = worker_count(jobs, options.threads);
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<GameRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

std::vector<AggregateRow> aggregate(std::span<const GameRow> rows) {
  if (rows.empty()) return {};
  for (const auto& r : rows) {
    if (r.spec != rows.front().spec) throw ConfigError("cannot aggregate results from different tournament specs");
  }

  // Winner of each game: top balance, ties to the lower slot.
  std::map<std::pair<std::string, std::uint64_t>, const GameRow*> winner;
  for (const auto& r : rows) {
    auto& w = winner[{r.lineup, r.seed}];
    if (!w || r.result.balance > w->result.balance ||
        (r.result.balance == w->result.balance && r.slot < w->slot)) {
      w = &r;
    }
  }

  std::map<std::pair<std::string, int>, std::vector<const GameRow*>> groups;
  for (const auto& r : rows) groups[{r.lineup, r.slot}].push_back(&r);

  std::vector<AggregateRow> out;
  for (const auto& [key, members] : groups) {
    AggregateRow a;
    a.lineup = key.first;
    a.slot = key.second;
    a.games = static_cast<std::int64_t>(members.size());
    std::vector<std::int64_t> balances;
    std::int64_t bids = 0, won = 0, delivered = 0, late = 0;
    double total = 0.0;
    for (const auto* m : members) {
      balances.push_back(m->result.balance.amount);
      total += static_cast<double>(m->result.balance.amount);
      bids += m->result.bids;
      won += m->result.won;
      delivered += m->result.delivered;
      late += m->result.late;
      if (winner[{m->lineup, m->seed}] == m) ++a.wins;
    }
    a.mean_balance = total / static_cast<double>(a.games);
    std::sort(balances.begin(), balances.end());
    const std::size_t mid = balances.size() / 2;
    a.median_balance = balances.size() % 2 == 1
                           ? static_cast<double>(balances[mid])
                           : (static_cast<double>(balances[mid - 1]) + static_cast<double>(balances[mid])) / 2.0;
    a.auction_win_rate = bids > 0 ? static_cast<double>(won) / static_cast<double>(bids) : 0.0;
    a.on_time_rate = won > 0 ? static_cast<double>(delivered - late) / static_cast<double>(won) : 0.0;
    out.push_back(std::move(a));
  }
  std::stable_sort(out.begin(), out.end(), [](const AggregateRow& x, const AggregateRow& y) {
    return x.mean_balance > y.mean_balance;
  });
  return out;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

void write_games_csv(std::ostream& out, std::span<const GameRow> rows) {
  out << kGamesCsvHeader << '\n';
  for (const auto& r : rows) {
    const auto& a = r.result;
    out << r.slot << ',' << r.lineup << ',' << r.seed << ',' << a.balance << ',' << a.revenue << ','
        << a.material << ',' << a.storage << ',' << a.penalty << ',' << a.interest << ',' << a.won << ','
        << a.delivered << ',' << a.late << ',' << a.cancelled << ',' << fmt_double(a.utilization) << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const AggregateRow> rows) {
  out << kSummaryCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.lineup << ',' << r.slot << ',' << r.games << ',' << fmt_double(r.mean_balance) << ','
        << fmt_double(r.median_balance) << ',' << r.wins << ',' << fmt_double(r.auction_win_rate) << ','
        << fmt_double(r.on_time_rate) << '\n';
  }
}

std::vector<GameRow> read_games_csv(std::istream& in, const std::string& spec) {
  std::string line;
  if (!std::getline(in, line) || line != kGamesCsvHeader) throw ConfigError("games.csv: unexpected header");
  std::vector<GameRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 14) throw ConfigError("games.csv: expected 14 columns in '" + line + "'");
    GameRow r;
    r.slot = std::stoi(c[0]);
    r.lineup = c[1];
    r.seed = std::stoull(c[2]);
    r.result.agent = AgentId{r.slot};
    r.result.balance = Money{std::stoll(c[3])};
    r.result.revenue = Money{std::stoll(c[4])};
    r.result.material = Money{std::stoll(c[5])};
    r.result.storage = Money{std::stoll(c[6])};
    r.result.penalty = Money{std::stoll(c[7])};
    r.result.interest = Money{std::stoll(c[8])};
    r.result.won = std::stoll(c[9]);
    r.result.delivered = std::stoll(c[10]);
    r.result.late = std::stoll(c[11]);
    r.result.cancelled = std::stoll(c[12]);
    r.result.utilization = std::stod(c[13]);
    r.spec = spec;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_daily_report(std::ostream& out, const EventLog& log, int num_agents) {
  struct AgentDay {
    Money balance;
    std::int64_t won = 0;
    std::int64_t delivered = 0;
  };
  std::vector<AgentDay> agents(static_cast<std::size_t>(num_agents));
  std::int64_t rfqs = 0, cleared = 0, price_total = 0;
  Day current = log.empty() ? 0 : log.front().day;

  out << "day,agent_id,balance,component_units,finished_units,cycles_used,won,delivered,rfqs,cleared,"
         "mean_win_price\n";
  auto agent_at = [&](const Endpoint& e) -> AgentDay* {
    if (e.party != Party::agent || e.id < 0 || e.id >= num_agents) return nullptr;
    return &agents[static_cast<std::size_t>(e.id)];
  };
  for (const auto& e : log) {
    if (e.day != current) {
      current = e.day;
      rfqs = cleared = price_total = 0;
      for (auto& a : agents) a.won = a.delivered = 0;
    }
    switch (e.kind) {
      case EventKind::customer_rfq: ++rfqs; break;
      case EventKind::bank_transaction:
        if (auto* a = agent_at(e.to)) a->balance = std::get<BankEntry>(e.payload).balance;
        break;
      case EventKind::order_award:
        if (auto* a = agent_at(e.to)) ++a->won;
        break;
      case EventKind::product_delivery:
        if (auto* a = agent_at(e.from)) ++a->delivered;
        break;
      case EventKind::market_report:
        for (const auto& p : std::get<MarketReport>(e.payload).products) {
          cleared += p.count;
          price_total += p.mean.amount * p.count;
        }
        break;
      case EventKind::inventory_snapshot: {
        const auto* a = agent_at(e.to);
        if (!a) break;
        const auto& snap = std::get<InventorySnapshot>(e.payload);
        std::int64_t comp = 0, fin = 0;
        for (auto v : snap.components) comp += v;
        for (auto v : snap.products) fin += v;
        out << e.day << ',' << e.to.id << ',' << a->balance << ',' << comp << ',' << fin << ','
            << snap.cycles_used << ',' << a->won << ',' << a->delivered << ',' << rfqs << ',' << cleared
            << ',' << (cleared > 0 ? std::to_string(price_total / cleared) : std::string()) << '\n';
        break;
      }
      default: break;
    }
  }
}

}  // namespace scm
