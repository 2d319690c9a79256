#include <doctest.h>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "scm/agents.hpp"
#include "scm/errors.hpp"

using namespace scm;
using testing::ProbeAgent;
using testing::ScriptedAgent;

namespace {

GameConfig quiet_config(int num_agents, int horizon) {
  GameConfig c = testing::small_config(num_agents, horizon, 1);
  c.market.demand.lambda = 0;
  return c;
}

AgentList scripted(int n, ScriptedAgent::DecideFn first = {}, ScriptedAgent::DispatchFn first_dispatch = {}) {
  AgentList out;
  out.push_back(std::make_unique<ScriptedAgent>(std::move(first), std::move(first_dispatch)));
  for (int i = 1; i < n; ++i) out.push_back(std::make_unique<ScriptedAgent>());
  return out;
}

std::vector<const Event*> of_kind(const EventLog& log, EventKind kind) {
  std::vector<const Event*> out;
  for (const auto& e : log) {
    if (e.kind == kind) out.push_back(&e);
  }
  return out;
}

void grant_bom(Game& game, AgentId agent, ProductId product, int units) {
  for (auto c : game.config().catalog.product(product).bom) game.grant_components(agent, c, units);
}

}  // namespace

TEST_CASE("zero horizon: no events, zero balances") {
  GameConfig c = default_game_config();
  c.horizon_days = 0;
  const auto run = run_game(c);
  CHECK(run.log.empty());
  for (const auto& a : run.result.agents) CHECK(a.balance == Money{0});
  CHECK(run.result.ranking.size() == 6);
}

TEST_CASE("an empty world only books zero-amount bank entries") {
  const auto run = run_game(quiet_config(2, 3), scripted(2));
  for (const auto& e : run.log) {
    const bool bookkeeping = e.kind == EventKind::bank_transaction || e.kind == EventKind::market_report ||
                             e.kind == EventKind::inventory_snapshot;
    CHECK(bookkeeping);
    if (e.kind == EventKind::bank_transaction) CHECK(std::get<BankEntry>(e.payload).amount == Money{0});
  }
  CHECK(of_kind(run.log, EventKind::bank_transaction).size() == 3 * 2 * 2);
}

TEST_CASE("a 501-unit plan of a four-cycle product is refused whole") {
  const ProductId p{0};
  Game game(quiet_config(2, 2), scripted(2, [p](const AgentView& v, MessageBus&) {
              DailyDecision d;
              d.production = {{p, v.day == 0 ? 501 : 500}};
              return d;
            }));
  grant_bom(game, AgentId{0}, p, 1001);
  game.tick();
  const auto rejected = of_kind(game.log(), EventKind::decision_rejected);
  REQUIRE(rejected.size() == 1);
  CHECK(std::get<DecisionRejected>(rejected[0]->payload).reason == "cycle_cap_exceeded: 2004 > 2000");
  CHECK(of_kind(game.log(), EventKind::production_run).empty());
  CHECK(game.agent(AgentId{0}).finished[0] == 0);

  game.tick();
  CHECK(game.agent(AgentId{0}).finished[0] == 500);
  CHECK(game.agent(AgentId{0}).counters.cycles_used == 2000);
}

TEST_CASE("win on day 0, build on day 1, revenue on day 2") {
  const ProductId p{0};
  Game game(quiet_config(2, 4), scripted(2, [p](const AgentView& v, MessageBus&) {
              DailyDecision d;
              if (v.day == 1) d.production = {{p, 3}};
              return d;
            }));
  grant_bom(game, AgentId{0}, p, 3);
  const OrderId order = game.grant_order(AgentId{0}, p, 3, 3, Money{2000});
  game.run();

  const auto revenue = of_kind(game.log(), EventKind::bank_transaction);
  std::vector<const Event*> paid;
  for (const auto* e : revenue) {
    if (std::get<BankEntry>(e->payload).kind == TxKind::revenue) paid.push_back(e);
  }
  REQUIRE(paid.size() == 1);
  CHECK(paid[0]->day == 2);
  CHECK(std::get<BankEntry>(paid[0]->payload).amount == Money{6000});
  CHECK(std::get<BankEntry>(paid[0]->payload).reference == raw(order));

  const auto runs = of_kind(game.log(), EventKind::production_run);
  REQUIRE(runs.size() == 1);
  CHECK(runs[0]->day == 1);
  CHECK(std::get<ProductionRun>(runs[0]->payload).cycles == 12);
  const auto shipped = of_kind(game.log(), EventKind::product_delivery);
  REQUIRE(shipped.size() == 1);
  CHECK(std::get<ProductDelivery>(shipped[0]->payload).late_days == 0);
}

TEST_CASE("late orders pay daily penalties, then cancel") {
  GameConfig c = quiet_config(2, 10);
  c.market.demand.cancel_after_days = 3;
  Game game(c, scripted(2));
  game.grant_order(AgentId{1}, ProductId{4}, 2, 1, Money{1800}, Money{70});
  game.run();
  const auto& a = game.agent(AgentId{1});
  CHECK(a.orders.empty());
  CHECK(a.counters.cancelled == 1);
  CHECK(a.bank.total(TxKind::penalty) == Money{210});
  const auto cancelled = of_kind(game.log(), EventKind::order_cancelled);
  REQUIRE(cancelled.size() == 1);
  CHECK(cancelled[0]->day == 3);
}

TEST_CASE("supply round trip: rfq, offer, acceptance, arrival, payment") {
  const ComponentId cpu{0};
  Game game(quiet_config(2, 6), scripted(2, [cpu](const AgentView& v, MessageBus&) {
              DailyDecision d;
              if (v.day == 0) d.supply_rfqs.push_back({SupplierId{0}, cpu, 10, 3});
              for (const auto& o : v.offers) d.accept_offers.push_back(o.rfq);
              return d;
            }));
  game.run();
  const auto offers = of_kind(game.log(), EventKind::supply_offer);
  REQUIRE(offers.size() == 1);
  const auto& offer = std::get<SupplyOffer>(offers[0]->payload);
  CHECK(offers[0]->day == 1);
  CHECK(offer.promised_due_day == 3);
  CHECK(offer.unit_price == Money{500});  // idle supplier, half discount
  const auto arrivals = of_kind(game.log(), EventKind::component_delivery);
  REQUIRE(arrivals.size() == 1);
  CHECK(arrivals[0]->day == 3);
  CHECK(game.agent(AgentId{0}).bank.total(TxKind::material) == Money{5000});
  CHECK(game.agent(AgentId{0}).components[0] == 10);
}

TEST_CASE("unused offers give capacity back") {
  Game game(quiet_config(2, 4), scripted(2, [](const AgentView& v, MessageBus&) {
              DailyDecision d;
              if (v.day == 0) d.supply_rfqs.push_back({SupplierId{0}, ComponentId{0}, 400, 2});
              return d;
            }));
  game.run();
  CHECK(of_kind(game.log(), EventKind::supply_offer).size() == 1);
  CHECK(game.suppliers()[0].commitments().empty());
}

TEST_CASE("malformed decisions are logged and skipped") {
  Game game(quiet_config(2, 2), scripted(
                                    2,
                                    [](const AgentView& v, MessageBus&) {
                                      DailyDecision d;
                                      d.bids.push_back({RfqId{999}, v.self, Money{10}});
                                      d.bids.push_back({RfqId{999}, AgentId{1}, Money{10}});
                                      d.supply_rfqs.push_back({SupplierId{77}, ComponentId{0}, 5, 3});
                                      d.supply_rfqs.push_back({SupplierId{0}, ComponentId{5}, 5, 3});
                                      d.supply_rfqs.push_back({SupplierId{0}, ComponentId{0}, 0, 3});
                                      d.supply_rfqs.push_back({SupplierId{0}, ComponentId{0}, 5, v.day});
                                      d.accept_offers.push_back(SupplyRfqId{12345});
                                      d.production.push_back({ProductId{0}, 1});
                                      return d;
                                    },
                                    [](const DispatchView&) { return std::vector<OrderId>{OrderId{42}}; }));
  game.tick();
  std::multiset<std::string> reasons;
  for (const auto* e : of_kind(game.log(), EventKind::decision_rejected)) {
    reasons.insert(std::get<DecisionRejected>(e->payload).reason);
  }
  const std::multiset<std::string> expected{"unknown_rfq",
                                            "bid_for_other_agent",
                                            "unknown_supplier",
                                            "supplier_does_not_produce_component",
                                            "non_positive_supply_quantity",
                                            "supply_due_outside_window",
                                            "unknown_offer",
                                            "insufficient_components: component 0",
                                            "unknown_order"};
  CHECK(reasons == expected);
  CHECK(of_kind(game.log(), EventKind::supply_rfq).empty());
}

TEST_CASE("agents see published information only") {
  auto probe_run = [](bool rival_active) {
    GameConfig c = testing::small_config(2, 6, 5);
    c.market.demand.lambda = 3;
    std::vector<std::string> lines;
    AgentList agents;
    agents.push_back(std::make_unique<ScriptedAgent>([rival_active](const AgentView& v, MessageBus&) {
      DailyDecision d;
      if (!rival_active) return d;
      for (const auto& r : v.rfqs) d.bids.push_back({r.id, v.self, r.reserve_unit_price});
      d.supply_rfqs.push_back({SupplierId{0}, ComponentId{0}, 50, v.day + 2 < 6 ? v.day + 2 : 5});
      return d;
    }));
    agents.push_back(std::make_unique<ProbeAgent>(&lines));
    run_game(c, std::move(agents));
    return lines;
  };
  const auto quiet = probe_run(false);
  const auto busy = probe_run(true);
  REQUIRE(quiet.size() == 6);
  // The rival's same-day bids and supply requests never show up in what agent 1 sees.
  CHECK(quiet[0] == busy[0]);
  CHECK(quiet[0].rfind("day=0 rfqs=", 0) == 0);
  CHECK(quiet[0].find("report=none") != std::string::npos);
  // Later days differ only through published results (reports), never through offers or awards.
  for (std::size_t d = 1; d < quiet.size(); ++d) {
    CHECK(busy[d].find("awards= ") != std::string::npos);
    CHECK(busy[d].find("offers= ") != std::string::npos);
  }
}

TEST_CASE("company games: determinism, replay, tally, conservation, topology") {
  GameConfig c = testing::small_config(3, 30, 9);
  const auto first = run_game(c);
  const auto second = run_game(c);
  CHECK(testing::serialize(first) == testing::serialize(second));

  GameConfig other = c;
  other.seed = 10;
  CHECK(testing::serialize(run_game(other)) != testing::serialize(first));

  CHECK(tally(first.log, c) == first.result);
  CHECK(check_conservation(first.log, c.catalog, 3) == 30 * 3);

  for (const auto& a : first.result.agents) {
    CHECK(a.balance == a.revenue - a.material - a.storage - a.penalty - a.interest);
  }

  std::int64_t role_notes = 0;
  for (const auto& e : first.log) {
    if (!e.from.is_role() || !e.to.is_role()) continue;
    ++role_notes;
    CHECK(e.from.id == e.to.id);
    CHECK(((e.from.role == Role::coordinator) != (e.to.role == Role::coordinator)));
    CHECK(std::holds_alternative<RoleNote>(e.payload));
  }
  CHECK(role_notes > 0);

  std::istringstream in(testing::serialize(first));
  const auto loaded = read_event_log(in);
  CHECK(replay(loaded, c) == first.result);

  SUBCASE("tampered digit") {
    auto bad = loaded;
    auto& line = bad.lines[200];
    const auto pos = line.find_first_of("0123456789", line.find("\"data\""));
    line[pos] = line[pos] == '9' ? '8' : static_cast<char>(line[pos] + 1);
    try {
      replay(bad, c);
      FAIL("tampered log replayed");
    } catch (const ReplayDivergence& e) {
      CHECK(e.index() == 200);
    }
  }
  SUBCASE("truncated mid-day") {
    auto cut = loaded;
    cut.lines.resize(cut.lines.size() / 2);
    try {
      replay(cut, c);
      FAIL("truncated log replayed");
    } catch (const ReplayDivergence& e) {
      CHECK(e.index() == cut.lines.size());
    }
  }
  SUBCASE("wrong config") {
    GameConfig changed = c;
    changed.market.demand.lambda = 5;
    CHECK_THROWS_AS(replay(loaded, changed), ConfigError);
  }
}

TEST_CASE("constructor refuses mismatched agent lists") {
  CHECK_THROWS_AS(Game(quiet_config(3, 2), scripted(2)), ConfigError);
}
