#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "scm/config.hpp"
#include "scm/errors.hpp"
#include "scm/events.hpp"
#include "scm/rng.hpp"

using namespace scm;
using nlohmann::json;

TEST_CASE("fnv1a and labeled streams") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);

  RngStream a = RngStream::derive(7, "demand");
  RngStream b = RngStream::derive(7, "demand");
  RngStream c = RngStream::derive(7, "exploration");
  const auto first = a.next();
  CHECK(first == b.next());
  CHECK(first != c.next());

  RngStream r(3);
  for (int i = 0; i < 1000; ++i) {
    const auto v = r.uniform_int(-2, 2);
    CHECK(v >= -2);
    CHECK(v <= 2);
  }
  CHECK(r.poisson(0.0) == 0);
}

TEST_CASE("endpoint text round-trips") {
  for (const auto& e : {Endpoint::market(), Endpoint::customers(), Endpoint::bank(), Endpoint::factory(),
                        Endpoint::scenario(), Endpoint::supplier(SupplierId{3}),
                        Endpoint::agent(AgentId{2}), Endpoint::agent(AgentId{5}, Role::delivery),
                        Endpoint::agent(AgentId{1}, Role::company)}) {
    CHECK(Endpoint::parse(e.str()) == e);
  }
  CHECK(Endpoint::agent(AgentId{4}, Role::sales).str() == "agent:4/sales_manager");
  CHECK_THROWS_AS(Endpoint::parse("planet:1"), Error);
  CHECK_THROWS_AS(Endpoint::parse("agent:1/janitor"), Error);
}

TEST_CASE("every payload type survives a json line") {
  std::vector<Payload> payloads{
      CustomerRfq{RfqId{1}, ProductId{2}, 3, 4, 9, Money{1800}, Money{90}, 5},
      Bid{RfqId{1}, AgentId{2}, Money{1700}},
      CustomerOrder{OrderId{1}, RfqId{1}, AgentId{2}, ProductId{2}, 3, 9, Money{1700}, Money{90}, 5},
      AuctionResult{RfqId{1}, 4, 2, Money{1700}},
      SupplyRfq{SupplyRfqId{8}, AgentId{1}, SupplierId{2}, ComponentId{4}, 50, 12},
      SupplyOffer{SupplyRfqId{8}, AgentId{1}, SupplierId{2}, ComponentId{4}, 50, Money{200}, 12, 13},
      SupplyOrder{SupplyRfqId{8}, AgentId{1}, SupplierId{2}, ComponentId{4}, 50, Money{200}, 13},
      ComponentDelivery{SupplyRfqId{8}, ComponentId{4}, 50, Money{200}},
      ProductionRun{ProductId{2}, 10, 40},
      ProductDelivery{OrderId{1}, ProductId{2}, 3, Money{1700}, 1},
      OrderCancelled{OrderId{1}},
      BankEntry{TxKind::penalty, Money{-90}, Money{-1090}, 1},
      InventorySnapshot{{1, 2, 3}, {4, 5}, 1996},
      MarketReport{3, {{ProductId{1}, 2, Money{1500}, Money{1600}, Money{1550}}}},
      DecisionRejected{"unknown_rfq", 17},
      RoleNote{"eval_delivery", 4, {{"due_day", 9}, {"quantity", 3}}},
  };
  std::int64_t seq = 0;
  for (const auto& p : payloads) {
    const Event e{seq++, 3, EventKind::report, Endpoint::agent(AgentId{1}, Role::inventory),
                  Endpoint::agent(AgentId{1}), p};
    const auto line = to_json_line(e);
    CHECK(line.find('\n') == std::string::npos);
    CHECK(event_from_json_line(line) == e);
    CHECK(to_json_line(event_from_json_line(line)) == line);
  }
}

TEST_CASE("log files carry a header and reject garbage") {
  LogHeader h;
  h.seed = 42;
  h.config_hash = "00ff";
  h.horizon_days = 3;
  h.num_agents = 2;
  const EventLog log{Event{0, 0, EventKind::order_cancelled, Endpoint::customers(), Endpoint::agent(AgentId{0}),
                           OrderCancelled{OrderId{5}}}};
  std::stringstream buf;
  write_event_log(buf, h, log);
  const auto loaded = read_event_log(buf);
  CHECK(loaded.header == h);
  CHECK(parse_events(loaded) == log);

  std::istringstream empty("");
  CHECK_THROWS_AS(read_event_log(empty), Error);
  std::istringstream not_ours("{\"format\":\"other\"}\n");
  CHECK_THROWS_AS(read_event_log(not_ours), Error);

  LoadedLog broken = loaded;
  broken.lines.push_back("{\"seq\":");
  try {
    parse_events(broken);
    FAIL("expected divergence");
  } catch (const ReplayDivergence& e) {
    CHECK(e.index() == 1);
  }
}

TEST_CASE("default config") {
  const GameConfig c = default_game_config();
  CHECK(c.horizon_days == 220);
  CHECK(c.num_agents == 6);
  CHECK(c.daily_cycles == 2000);
  CHECK(c.agents.size() == 6);
  CHECK_NOTHROW(c.validate());
  CHECK(c.supplier_specs().size() == 8);
}

TEST_CASE("config json round trip and hash") {
  const GameConfig c = default_game_config();
  const GameConfig back = config_from_json(config_to_json(c));
  CHECK(back == c);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);

  GameConfig reseeded = c;
  reseeded.seed = 99;
  CHECK(config_hash(reseeded) == config_hash(c));

  GameConfig other = c;
  other.market.demand.lambda = 7;
  CHECK(config_hash(other) != config_hash(c));
}

TEST_CASE("config reads nested strategy sections") {
  const json doc = json::parse(R"({
    "seed": 3, "horizon_days": 40, "num_agents": 2,
    "market": {"demand": {"lambda": 4, "quantity": [2, 5], "product_weights": [1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]},
               "penalty": {"rate": 0.1, "cancel_after_days": 3},
               "supplier": {"capacity": 300, "discount_delta": 0.25},
               "storage": {"holding_rate": 2}},
    "sales": {"margin_floor": 1.1, "undercut": {"step": 25}},
    "procurement": {"mixed": {"split": 0.75}},
    "agents": [
      {"sales_strategy": "undercut", "procurement_strategy": "jit"},
      {"sales_strategy": "fixed", "procurement_strategy": "threshold",
       "sales": {"fixed": {"price": 1800}}, "procurement": {"threshold": {"horizon_days": 7}}}
    ]})");
  const GameConfig c = config_from_json(doc);
  CHECK(c.seed == 3);
  CHECK(c.horizon_days == 40);
  CHECK(c.market.demand.quantity == Range<int>{2, 5});
  CHECK(c.market.demand.penalty_rate == Ppm{100'000});
  CHECK(c.market.demand.cancel_after_days == 3);
  CHECK(c.market.supplier_capacity == 300);
  CHECK(c.market.discount_delta == Ppm{250'000});
  CHECK(c.market.bank.holding_rate == Money{2});
  REQUIRE(c.agents.size() == 2);
  CHECK(c.agents[0].sales_strategy == SalesStrategyKind::undercut);
  CHECK(c.agents[0].sales.undercut_step == Money{25});
  CHECK(c.agents[0].sales.margin_floor == Ppm{1'100'000});
  CHECK(c.agents[0].procurement.mixed_split == Ppm{750'000});
  CHECK(c.agents[1].sales.fixed_price == Money{1800});
  CHECK(c.agents[1].sales.undercut_step == Money{25});
  CHECK(c.agents[1].procurement.threshold_horizon_days == 7);
  CHECK(config_from_json(config_to_json(c)) == c);
}

TEST_CASE("invalid configs are refused") {
  auto base = config_to_json(default_game_config());
  auto expect_refused = [](json doc) { CHECK_THROWS_AS(config_from_json(doc), ConfigError); };

  SUBCASE("one agent") {
    base["num_agents"] = 1;
    base.erase("agents");
    expect_refused(base);
  }
  SUBCASE("agent count mismatch") {
    base["num_agents"] = 4;
    expect_refused(base);
  }
  SUBCASE("unknown strategy") {
    base["agents"][0]["sales_strategy"] = "oracle";
    expect_refused(base);
  }
  SUBCASE("negative lambda") {
    base["market"]["demand"]["lambda"] = -1;
    expect_refused(base);
  }
  SUBCASE("wrong weight count") {
    base["market"]["demand"]["product_weights"] = json::array({1, 2});
    expect_refused(base);
  }
  SUBCASE("discount above one") {
    base["market"]["supplier"]["discount_delta"] = 1.5;
    expect_refused(base);
  }
  SUBCASE("short lead not below long lead") {
    base["agents"][0]["procurement"]["mixed"]["short_lead"] = 10;
    expect_refused(base);
  }
  SUBCASE("wrong value type") {
    base["horizon_days"] = "long";
    expect_refused(base);
  }
  SUBCASE("missing catalog file") {
    base["catalog"] = "no/such/catalog.json";
    expect_refused(base);
  }
}
