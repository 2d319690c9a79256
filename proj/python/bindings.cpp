// Python bindings. Structured values cross the boundary as JSON text; the
// scm_arena package wraps them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scm/agents.hpp"
#include "scm/config.hpp"
#include "scm/errors.hpp"
#include "scm/harness.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

json result_json(const scm::GameResult& result) {
  json agents = json::array();
  for (const auto& a : result.agents) {
    agents.push_back({{"agent_id", scm::raw(a.agent)}, {"balance", a.balance.amount},
                      {"revenue", a.revenue.amount}, {"material", a.material.amount},
                      {"storage", a.storage.amount}, {"penalty", a.penalty.amount},
                      {"interest", a.interest.amount}, {"bids", a.bids}, {"won", a.won},
                      {"delivered", a.delivered}, {"late", a.late}, {"cancelled", a.cancelled},
                      {"cycles_used", a.cycles_used}, {"utilization", a.utilization}});
  }
  json ranking = json::array();
  for (auto id : result.ranking) ranking.push_back(scm::raw(id));
  return {{"agents", agents}, {"ranking", ranking}};
}

scm::GameConfig config_of(const std::optional<std::string>& config_json) {
  return config_json ? scm::config_from_json(json::parse(*config_json)) : scm::default_game_config();
}

std::string default_config() { return scm::config_to_json(scm::default_game_config()).dump(); }

std::string default_catalog() { return scm::catalog_to_json(scm::default_catalog()).dump(); }

std::optional<std::pair<int, std::int64_t>> clear_auction(std::int64_t reserve,
                                                          const std::vector<std::pair<int, std::int64_t>>& bids) {
  scm::CustomerRfq rfq;
  rfq.reserve_unit_price = scm::Money{reserve};
  std::vector<scm::Bid> list;
  for (const auto& [agent, price] : bids) list.push_back(scm::Bid{rfq.id, scm::AgentId{agent}, scm::Money{price}});
  const auto award = scm::clear_auction(rfq, list);
  if (!award) return std::nullopt;
  return std::pair{scm::raw(award->winner), award->unit_price.amount};
}

std::int64_t quote(std::int64_t base_price, int daily_capacity, const std::map<int, int>& committed, int today,
                   int due, double discount) {
  scm::ComponentSku sku;
  sku.base_price = scm::Money{base_price};
  scm::Supplier supplier(scm::SupplierSpec{scm::SupplierId{0}, {sku.id}, daily_capacity});
  for (const auto& [day, units] : committed) supplier.commit(day, units);
  return scm::quote_supply_price(sku, supplier, due, today, scm::Ppm::from_double(discount)).amount;
}

std::string run_game(const std::optional<std::string>& config_json, std::optional<std::uint64_t> seed,
                     const std::optional<std::string>& log_path) {
  auto config = config_of(config_json);
  if (seed) config.seed = *seed;
  scm::GameRun run;
  {
    py::gil_scoped_release release;
    run = scm::run_game(config);
  }
  if (log_path) {
    std::ofstream out(*log_path, std::ios::binary);
    if (!out) throw scm::Error("cannot write log '" + *log_path + "'");
    scm::write_event_log(out, run.header, run.log);
  }
  auto doc = result_json(run.result);
  doc["seed"] = config.seed;
  doc["events"] = run.log.size();
  return doc.dump();
}

std::string replay(const std::string& log_path, const std::optional<std::string>& config_json) {
  const auto loaded = scm::read_event_log_file(log_path);
  const auto config = config_of(config_json);
  py::gil_scoped_release release;
  return result_json(scm::replay(loaded, config)).dump();
}

std::string tournament(const std::string& spec_json, const std::optional<std::string>& out_dir, unsigned threads) {
  const auto spec = scm::tournament_spec_from_json(json::parse(spec_json));
  scm::TournamentOptions options;
  options.log_dir = out_dir;
  options.threads = threads;
  std::vector<scm::GameRow> rows;
  {
    py::gil_scoped_release release;
    rows = scm::run_tournament(spec, options);
  }
  std::ostringstream games, summary;
  scm::write_games_csv(games, rows);
  scm::write_summary_csv(summary, scm::aggregate(rows));
  if (out_dir) {
    std::ofstream(*out_dir + "/games.csv") << games.str();
    std::ofstream(*out_dir + "/summary.csv") << summary.str();
  }
  return json{{"games_csv", games.str()}, {"summary_csv", summary.str()}}.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Supply-chain trading game simulator core";

  auto error = py::register_exception<scm::Error>(m, "ScmError");
  py::register_exception<scm::ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<scm::MarketError>(m, "MarketError", error.ptr());
  py::register_exception<scm::ReplayDivergence>(m, "ReplayDivergence", error.ptr());

  m.def("default_config", &default_config);
  m.def("default_catalog", &default_catalog);
  m.def("clear_auction", &clear_auction, py::arg("reserve"), py::arg("bids"));
  m.def("quote", &quote, py::arg("base_price"), py::arg("daily_capacity"), py::arg("committed"),
        py::arg("today"), py::arg("due"), py::arg("discount"));
  m.def("run_game", &run_game, py::arg("config") = py::none(), py::arg("seed") = py::none(),
        py::arg("log_path") = py::none());
  m.def("replay", &replay, py::arg("log_path"), py::arg("config") = py::none());
  m.def("tournament", &tournament, py::arg("spec"), py::arg("out_dir") = py::none(), py::arg("threads") = 0);
}
