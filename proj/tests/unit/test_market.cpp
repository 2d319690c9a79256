#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "scm/errors.hpp"
#include "scm/market.hpp"

using namespace scm;

namespace {

CustomerRfq rfq_with_reserve(std::int64_t reserve) {
  CustomerRfq r;
  r.id = RfqId{7};
  r.reserve_unit_price = Money{reserve};
  return r;
}

Bid bid(int agent, std::int64_t price) { return Bid{RfqId{7}, AgentId{agent}, Money{price}}; }

Supplier cpu_supplier(int capacity) {
  return Supplier(SupplierSpec{SupplierId{0}, {ComponentId{0}}, capacity});
}

}  // namespace

TEST_CASE("lowest qualifying bid wins at its own price") {
  const std::vector<Bid> bids{bid(0, 1500), bid(1, 1400), bid(2, 1600)};
  const auto award = clear_auction(rfq_with_reserve(1550), bids);
  REQUIRE(award);
  CHECK(award->winner == AgentId{1});
  CHECK(award->unit_price == Money{1400});
}

TEST_CASE("auction edge cases") {
  CHECK_FALSE(clear_auction(rfq_with_reserve(1000), std::vector<Bid>{bid(0, 1001), bid(1, 2000)}));
  CHECK_FALSE(clear_auction(rfq_with_reserve(1000), std::vector<Bid>{}));

  const auto at_reserve = clear_auction(rfq_with_reserve(1000), std::vector<Bid>{bid(3, 1000)});
  REQUIRE(at_reserve);
  CHECK(at_reserve->winner == AgentId{3});

  const auto tie = clear_auction(rfq_with_reserve(1000), std::vector<Bid>{bid(4, 900), bid(2, 900)});
  REQUIRE(tie);
  CHECK(tie->winner == AgentId{2});

  CHECK_THROWS_AS(clear_auction(rfq_with_reserve(1000), std::vector<Bid>{bid(1, 900), bid(1, 800)}),
                  MarketError);
  CHECK_THROWS_AS(clear_auction(rfq_with_reserve(1000), std::vector<Bid>{Bid{RfqId{8}, AgentId{0}, Money{5}}}),
                  MarketError);
}

TEST_CASE("auction agrees with the pairwise oracle") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto rfq = rfq_with_reserve(std::uniform_int_distribution<std::int64_t>(900, 2100)(gen));
    const int n = std::uniform_int_distribution<int>(2, 6)(gen);
    std::vector<Bid> bids;
    for (int a = 0; a < n; ++a) {
      // narrow price band so ties are common
      bids.push_back(bid(a, 100 * std::uniform_int_distribution<std::int64_t>(9, 21)(gen)));
    }
    std::shuffle(bids.begin(), bids.end(), gen);
    CHECK(clear_auction(rfq, bids) == testing::auction_oracle(rfq, bids));
  }
}

TEST_CASE("no demand at zero rate; generator is reproducible") {
  const Catalog c = default_catalog();
  DemandConfig quiet;
  quiet.lambda = 0;
  RngStream rng(1);
  CHECK(generate_customer_rfqs(3, quiet, c, rng, RfqId{0}).empty());

  DemandConfig d;
  RngStream a = RngStream::derive(5, "demand");
  RngStream b = RngStream::derive(5, "demand");
  const auto first = generate_customer_rfqs(3, d, c, a, RfqId{10});
  CHECK(first == generate_customer_rfqs(3, d, c, b, RfqId{10}));
  for (const auto& r : first) {
    CHECK(r.due_day - r.issue_day >= d.lead_days.lo);
    CHECK(r.due_day - r.issue_day <= d.lead_days.hi);
    CHECK(r.quantity >= d.quantity.lo);
    CHECK(r.quantity <= d.quantity.hi);
    const Money floor = product_cost_floor(r.product, c);
    CHECK(r.reserve_unit_price >= floor);
    CHECK(r.reserve_unit_price <= scale(floor, d.reserve_multiplier.hi));
  }
}

TEST_CASE("daily rfq count averages the configured rate") {
  const Catalog c = default_catalog();
  DemandConfig d;
  RngStream rng = RngStream::derive(99, "demand");
  std::int64_t total = 0;
  constexpr int days = 10'000;
  for (int day = 0; day < days; ++day) {
    total += static_cast<std::int64_t>(generate_customer_rfqs(day, d, c, rng, RfqId{0}).size());
  }
  const double mean = static_cast<double>(total) / days;
  CHECK(mean > 20.0 * 0.98);
  CHECK(mean < 20.0 * 1.02);
}

TEST_CASE("quote boundaries and monotonicity") {
  const ComponentSku cpu{ComponentId{0}, ComponentKind::cpu, Family::pintel, 2.0, Money{1000}};
  const Ppm half{500'000};

  Supplier idle = cpu_supplier(100);
  CHECK(quote_supply_price(cpu, idle, 5, 0, half) == Money{500});

  Supplier full = cpu_supplier(100);
  for (Day d = 1; d <= 5; ++d) full.commit(d, 100);
  CHECK(quote_supply_price(cpu, full, 5, 0, half) == Money{1000});

  Supplier busier = cpu_supplier(100), lighter = cpu_supplier(100);
  busier.commit(2, 60);
  lighter.commit(2, 20);
  CHECK(quote_supply_price(cpu, busier, 4, 0, half) > quote_supply_price(cpu, lighter, 4, 0, half));

  CHECK_THROWS_AS(quote_supply_price(cpu, idle, 0, 0, half), MarketError);
  const ComponentSku board{ComponentId{4}, ComponentKind::motherboard, Family::pintel, {}, Money{250}};
  CHECK_THROWS_AS(quote_supply_price(board, idle, 3, 0, half), MarketError);
}

TEST_CASE("quotes match the long double formula") {
  const ComponentSku cpu{ComponentId{0}, ComponentKind::cpu, Family::pintel, 2.0, Money{1500}};
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    Supplier s = cpu_supplier(50);
    std::map<Day, int> committed;
    for (Day d = 1; d <= 8; ++d) {
      const int used = std::uniform_int_distribution<int>(0, 50)(gen);
      if (used > 0) s.commit(d, used);
      if (used > 0) committed[d] = used;
    }
    const Day due = std::uniform_int_distribution<int>(1, 8)(gen);
    const auto got = quote_supply_price(cpu, s, due, 0, Ppm{350'000});
    const auto want = testing::quote_oracle(cpu.base_price, 50, committed, 0, due, 0.35);
    CHECK(std::llabs(got.amount - want.amount) <= 1);
  }
}

TEST_CASE("capacity allocation") {
  SUBCASE("uncontended order keeps its day") {
    Supplier s = cpu_supplier(100);
    const std::vector<CapacityRequest> reqs{{1, 40, 5}};
    const auto p = allocate_supplier_capacity(s, reqs);
    CHECK(p[0].promised_due_day == 5);
    CHECK(s.committed_on(5) == 40);
  }
  SUBCASE("second full-capacity order slips a day") {
    Supplier s = cpu_supplier(100);
    const std::vector<CapacityRequest> reqs{{2, 100, 5}, {1, 100, 5}};
    const auto p = allocate_supplier_capacity(s, reqs);
    CHECK(p[1].promised_due_day == 5);
    CHECK(p[0].promised_due_day == 6);
  }
  SUBCASE("oversized requests are truncated to daily capacity") {
    Supplier s = cpu_supplier(100);
    const std::vector<CapacityRequest> reqs{{1, 250, 3}};
    const auto p = allocate_supplier_capacity(s, reqs);
    CHECK(p[0].quantity == 100);
  }
  SUBCASE("matches the exhaustive oracle") {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 150; ++trial) {
      const int cap = std::uniform_int_distribution<int>(3, 8)(gen);
      Supplier s = cpu_supplier(cap);
      std::map<Day, int> committed;
      for (Day d = 1; d <= 4; ++d) {
        const int used = std::uniform_int_distribution<int>(0, cap)(gen);
        if (used > 0) {
          s.commit(d, used);
          committed[d] = used;
        }
      }
      std::vector<CapacityRequest> reqs;
      const int n = std::uniform_int_distribution<int>(1, 5)(gen);
      for (int i = 0; i < n; ++i) {
        reqs.push_back({std::uniform_int_distribution<std::int64_t>(0, 50)(gen) * 10 + i,
                        std::uniform_int_distribution<int>(1, cap + 2)(gen),
                        std::uniform_int_distribution<int>(1, 4)(gen)});
      }
      const auto want = testing::capacity_oracle(cap, committed, reqs);
      const auto got = allocate_supplier_capacity(s, reqs);
      for (std::size_t i = 0; i < reqs.size(); ++i) CHECK(got[i].promised_due_day == want[i]);
      for (const auto& [day, used] : s.commitments()) CHECK(used <= cap);
    }
  }
}

TEST_CASE("bank daily charges") {
  const BankConfig cfg;

  BankLedger empty = bank_apply_daily(BankLedger(AgentId{0}), 0, cfg, 0);
  REQUIRE(empty.transactions().size() == 2);
  CHECK(empty.transactions()[0].amount == Money{0});
  CHECK(empty.transactions()[1].amount == Money{0});

  BankLedger stocked = bank_apply_daily(BankLedger(AgentId{0}), 0, cfg, 100);
  CHECK(stocked.transactions()[0].kind == TxKind::storage);
  CHECK(stocked.transactions()[0].amount == Money{-100});

  BankLedger debt(AgentId{1});
  debt.post(0, TxKind::material, Money{-1'000'000});
  debt = bank_apply_daily(debt, 0, cfg, 0);
  CHECK(debt.transactions().back().kind == TxKind::interest);
  CHECK(debt.transactions().back().amount == Money{-500});  // 500 ppm of a 1e6 debt
  CHECK(debt.balance() == Money{-1'000'500});

  CHECK_THROWS_AS(bank_apply_daily(debt, 0, cfg, 0), MarketError);
}
