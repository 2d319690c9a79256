#include "scm/engine.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "scm/errors.hpp"

namespace scm {

namespace {

std::int64_t sum(const std::vector<std::int64_t>& v) {
  return std::accumulate(v.begin(), v.end(), std::int64_t{0});
}

double utilization_of(std::int64_t cycles, const GameConfig& config) {
  const std::int64_t capacity =
      static_cast<std::int64_t>(config.daily_cycles) * std::max(1, config.horizon_days);
  return static_cast<double>(cycles) / static_cast<double>(capacity);
}

}  // namespace

std::int64_t AgentState::inventory_units() const { return sum(components) + sum(finished); }

void MessageBus::post(Role from, Role to, EventKind kind, RoleNote note) {
  if (kind > EventKind::report) {
    throw InvariantViolation("role_messages_are_messages", day_,
                             "role note posted as " + std::string(to_string(kind)));
  }
  if (from == to || (from != Role::coordinator && to != Role::coordinator) ||
      from == Role::company || to == Role::company) {
    throw InvariantViolation("coordinator_topology", day_,
                             std::string(to_string(from)) + " -> " + std::string(to_string(to)));
  }
  sink_(kind, Endpoint::agent(agent_, from), Endpoint::agent(agent_, to), std::move(note));
}

std::vector<AgentId> rank_agents(std::span<const AgentResult> agents) {
  std::vector<AgentId> order;
  for (const auto& a : agents) order.push_back(a.agent);
  std::vector<Money> balance(agents.size());
  for (const auto& a : agents) balance[index_of(a.agent)] = a.balance;
  std::sort(order.begin(), order.end(), [&](AgentId x, AgentId y) {
    const Money bx = balance[index_of(x)];
    const Money by = balance[index_of(y)];
    return bx != by ? bx > by : x < y;
  });
  return order;
}

Game::Game(GameConfig config, AgentList agents)
    : config_(std::move(config)),
      agents_(std::move(agents)),
      demand_rng_(RngStream::derive(config_.seed, "demand")) {
  config_.validate();
  if (static_cast<int>(agents_.size()) != config_.num_agents) {
    throw ConfigError("expected " + std::to_string(config_.num_agents) + " agents, got " +
                      std::to_string(agents_.size()));
  }
  for (int i = 0; i < config_.num_agents; ++i) {
    AgentState s;
    s.id = AgentId{i};
    s.components.assign(config_.catalog.component_count(), 0);
    s.finished.assign(config_.catalog.product_count(), 0);
    s.bank = BankLedger(s.id);
    states_.push_back(std::move(s));
  }
  for (const auto& spec : config_.supplier_specs()) suppliers_.emplace_back(spec);
  const auto n = static_cast<std::size_t>(config_.num_agents);
  awards_.resize(n);
  arrivals_.resize(n);
  planned_production_.resize(n);
  planned_shipments_.resize(n);
  cycles_today_.assign(n, 0);
}

LogHeader Game::header() const {
  LogHeader h;
  h.seed = config_.seed;
  h.config_hash = config_hash(config_);
  h.horizon_days = config_.horizon_days;
  h.num_agents = config_.num_agents;
  return h;
}

void Game::emit(EventKind kind, Endpoint from, Endpoint to, Payload payload) {
  Event e;
  e.seq = static_cast<std::int64_t>(log_.size());
  e.day = day_;
  e.kind = kind;
  e.from = from;
  e.to = to;
  e.payload = std::move(payload);
  log_.push_back(std::move(e));
}

void Game::post_bank(AgentState& s, TxKind kind, Money amount, std::int64_t reference) {
  const auto& tx = s.bank.post(day_, kind, amount, reference);
  emit(EventKind::bank_transaction, Endpoint::bank(), Endpoint::agent(s.id),
       BankEntry{tx.kind, tx.amount, s.bank.balance(), tx.reference});
}

void Game::reject(AgentId agent, std::string reason, std::int64_t reference) {
  emit(EventKind::decision_rejected, Endpoint::market(), Endpoint::agent(agent),
       DecisionRejected{std::move(reason), reference});
}

void Game::grant_components(AgentId agent, ComponentId component, int quantity) {
  auto& s = states_.at(index_of(agent));
  if (quantity <= 0 || index_of(component) >= s.components.size()) {
    throw MarketError("grant_components: bad component or quantity");
  }
  s.components[index_of(component)] += quantity;
  s.counters.components_received += quantity;
  emit(EventKind::component_delivery, Endpoint::scenario(), Endpoint::agent(agent),
       ComponentDelivery{SupplyRfqId{-1}, component, quantity, Money{0}});
}

OrderId Game::grant_order(AgentId agent, ProductId product, int quantity, Day due_day,
                          Money unit_price, Money penalty_per_day) {
  auto& s = states_.at(index_of(agent));
  if (!config_.catalog.has_product(product) || quantity <= 0) {
    throw MarketError("grant_order: bad product or quantity");
  }
  CustomerOrder o;
  o.id = OrderId{next_rfq_id_};
  o.rfq = RfqId{next_rfq_id_};
  ++next_rfq_id_;
  o.winner = agent;
  o.product = product;
  o.quantity = quantity;
  o.due_day = due_day;
  o.unit_price = unit_price;
  o.penalty_per_day = penalty_per_day;
  o.cancel_after_days = config_.market.demand.cancel_after_days;
  s.orders.push_back(o);
  ++s.counters.won;
  emit(EventKind::order_award, Endpoint::scenario(), Endpoint::agent(agent), o);
  return o.id;
}

void Game::run() {
  while (!finished()) tick();
}

void Game::tick() {
  if (finished()) throw MarketError("tick past the horizon");
  for (auto& a : awards_) a.clear();
  for (auto& a : arrivals_) a.clear();
  for (auto& p : planned_production_) p.clear();
  for (auto& p : planned_shipments_) p.clear();
  std::fill(cycles_today_.begin(), cycles_today_.end(), 0);
  cleared_today_.clear();
  cleared_products_.clear();

  phase_component_deliveries();
  phase_supply_offers();
  phase_awards();
  phase_customer_rfqs();
  phase_decisions();
  phase_factory();
  phase_customer_deliveries();
  phase_bank();
  phase_report();
  check_invariants();
  ++day_;
}

// (1) Components whose promised day is today arrive and are paid for.
void Game::phase_component_deliveries() {
  for (auto& s : states_) {
    std::vector<SupplyOrder> keep;
    for (const auto& o : s.inbound) {
      if (o.due_day != day_) {
        keep.push_back(o);
        continue;
      }
      s.components[index_of(o.component)] += o.quantity;
      s.counters.components_received += o.quantity;
      ComponentDelivery d{o.offer, o.component, o.quantity, o.unit_price};
      arrivals_[index_of(s.id)].push_back(d);
      emit(EventKind::component_delivery, Endpoint::supplier(o.supplier), Endpoint::agent(s.id), d);
      post_bank(s, TxKind::material, -(o.unit_price * o.quantity), raw(o.offer));
    }
    s.inbound = std::move(keep);
  }
}

// (2) Yesterday's supply RFQs are answered. Each supplier quotes its batch on
// the commitments it held before the batch, then allocates capacity.
void Game::phase_supply_offers() {
  offers_.clear();
  for (auto& supplier : suppliers_) {
    std::vector<const SupplyRfq*> batch;
    for (const auto& r : open_supply_rfqs_) {
      if (r.supplier == supplier.id()) batch.push_back(&r);
    }
    if (batch.empty()) continue;

    std::vector<CapacityRequest> requests;
    std::vector<Money> prices;
    for (const auto* r : batch) {
      const Day due = std::max(r->requested_due_day, day_ + 1);
      prices.push_back(quote_supply_price(config_.catalog.component(r->component), supplier, due,
                                          day_, config_.market.discount_delta));
      requests.push_back(CapacityRequest{raw(r->id), r->quantity, due});
    }
    const auto promises = allocate_supplier_capacity(supplier, requests);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto& r = *batch[i];
      SupplyOffer offer{r.id,     r.agent,     r.supplier,          r.component,
                        promises[i].quantity, prices[i], r.requested_due_day,
                        promises[i].promised_due_day};
      offers_.push_back(offer);
      emit(EventKind::supply_offer, Endpoint::supplier(r.supplier), Endpoint::agent(r.agent), offer);
    }
  }
  open_supply_rfqs_.clear();
}

// (3) Yesterday's auctions clear.
void Game::phase_awards() {
  for (const auto& rfq : open_rfqs_) {
    std::vector<Bid> bids;
    for (const auto& b : open_bids_) {
      if (b.rfq == rfq.id) bids.push_back(b);
    }
    const auto award = clear_auction(rfq, bids);
    AuctionResult result{rfq.id, static_cast<int>(bids.size()), -1, Money{0}};
    if (award) {
      result.winner = raw(award->winner);
      result.unit_price = award->unit_price;
      CustomerOrder o;
      o.id = OrderId{raw(rfq.id)};
      o.rfq = rfq.id;
      o.winner = award->winner;
      o.product = rfq.product;
      o.quantity = rfq.quantity;
      o.due_day = rfq.due_day;
      o.unit_price = award->unit_price;
      o.penalty_per_day = rfq.penalty_per_day;
      o.cancel_after_days = rfq.cancel_after_days;
      auto& s = states_[index_of(award->winner)];
      s.orders.push_back(o);
      ++s.counters.won;
      awards_[index_of(award->winner)].push_back(o);
      cleared_today_.push_back(*award);
      cleared_products_.push_back(rfq.product);
      emit(EventKind::order_award, Endpoint::customers(), Endpoint::agent(award->winner), o);
    }
    emit(EventKind::auction_result, Endpoint::market(), Endpoint::customers(), result);
  }
  open_rfqs_.clear();
  open_bids_.clear();
}

// (4) Today's RFQs are published.
void Game::phase_customer_rfqs() {
  open_rfqs_ = generate_customer_rfqs(day_, config_.market.demand, config_.catalog, demand_rng_,
                                      RfqId{next_rfq_id_});
  next_rfq_id_ += static_cast<std::int64_t>(open_rfqs_.size());
  for (const auto& rfq : open_rfqs_) {
    emit(EventKind::customer_rfq, Endpoint::customers(), Endpoint::market(), rfq);
  }
}

// (5) Every agent decides on the same published information.
void Game::phase_decisions() {
  const auto suppliers = config_.supplier_specs();
  std::set<SupplyRfqId> accepted;
  const MarketReport* report = last_report_ ? &*last_report_ : nullptr;

  for (std::size_t i = 0; i < agents_.size(); ++i) {
    auto& s = states_[i];
    std::vector<SupplyOffer> own_offers;
    for (const auto& o : offers_) {
      if (o.agent == s.id) own_offers.push_back(o);
    }
    AgentView view;
    view.day = day_;
    view.horizon = config_.horizon_days;
    view.daily_cycles = config_.daily_cycles;
    view.self = s.id;
    view.catalog = &config_.catalog;
    view.suppliers = suppliers;
    view.rfqs = open_rfqs_;
    view.awards = awards_[i];
    view.offers = own_offers;
    view.arrivals = arrivals_[i];
    view.last_report = report;
    view.state = &s;

    MessageBus bus(day_, s.id, [this](EventKind k, Endpoint f, Endpoint t, Payload p) {
      emit(k, f, t, std::move(p));
    });
    DailyDecision d = agents_[i]->decide(view, bus);

    std::set<RfqId> bid_on;
    for (auto bid : d.bids) {
      const bool known = std::any_of(open_rfqs_.begin(), open_rfqs_.end(),
                                     [&](const CustomerRfq& r) { return r.id == bid.rfq; });
      if (bid.agent != s.id) {
        reject(s.id, "bid_for_other_agent", raw(bid.rfq));
      } else if (!known) {
        reject(s.id, "unknown_rfq", raw(bid.rfq));
      } else if (bid.unit_price.amount < 0) {
        reject(s.id, "negative_bid", raw(bid.rfq));
      } else if (!bid_on.insert(bid.rfq).second) {
        reject(s.id, "duplicate_bid", raw(bid.rfq));
      } else {
        open_bids_.push_back(bid);
        ++s.counters.bids;
        emit(EventKind::bid, Endpoint::agent(s.id), Endpoint::customers(), bid);
      }
    }

    for (const auto& req : d.supply_rfqs) {
      const std::int64_t ref = raw(req.component);
      if (index_of(req.supplier) >= suppliers_.size() || raw(req.supplier) < 0) {
        reject(s.id, "unknown_supplier", raw(req.supplier));
      } else if (!suppliers_[index_of(req.supplier)].produces(req.component)) {
        reject(s.id, "supplier_does_not_produce_component", ref);
      } else if (req.quantity <= 0) {
        reject(s.id, "non_positive_supply_quantity", ref);
      } else if (req.requested_due_day <= day_ || req.requested_due_day >= config_.horizon_days) {
        reject(s.id, "supply_due_outside_window", ref);
      } else {
        SupplyRfq rfq{SupplyRfqId{next_supply_rfq_id_++}, s.id, req.supplier, req.component,
                      req.quantity, req.requested_due_day};
        open_supply_rfqs_.push_back(rfq);
        emit(EventKind::supply_rfq, Endpoint::agent(s.id), Endpoint::supplier(req.supplier), rfq);
      }
    }

    for (auto id : d.accept_offers) {
      auto it = std::find_if(own_offers.begin(), own_offers.end(),
                             [&](const SupplyOffer& o) { return o.rfq == id; });
      if (it == own_offers.end()) {
        reject(s.id, "unknown_offer", raw(id));
      } else if (!accepted.insert(id).second) {
        reject(s.id, "duplicate_acceptance", raw(id));
      } else if (it->quantity <= 0) {
        reject(s.id, "empty_offer", raw(id));
      } else {
        SupplyOrder order{it->rfq,      s.id,          it->supplier,        it->component,
                          it->quantity, it->unit_price, it->promised_due_day};
        s.inbound.push_back(order);
        emit(EventKind::supply_order, Endpoint::agent(s.id), Endpoint::supplier(it->supplier), order);
      }
    }

    planned_production_[i] = std::move(d.production);
    // The delivery plan is fixed now, against stock on hand before the factory runs.
    planned_shipments_[i] = agents_[i]->dispatch(DispatchView{day_, s.id, &config_.catalog, &s}, bus);
  }

  // Offers nobody took give their capacity back.
  for (const auto& o : offers_) {
    if (!accepted.count(o.rfq) && o.quantity > 0) {
      suppliers_[index_of(o.supplier)].commit(o.promised_due_day, -o.quantity);
    }
  }
}

// (6) Production plans run whole or not at all.
void Game::phase_factory() {
  const auto& catalog = config_.catalog;
  for (auto& s : states_) {
    const auto& plan = planned_production_[index_of(s.id)];
    if (plan.empty()) continue;

    std::int64_t cycles = 0;
    std::vector<std::int64_t> need(catalog.component_count(), 0);
    std::string problem;
    for (const auto& line : plan) {
      if (!catalog.has_product(line.product) || line.units <= 0) {
        problem = "bad_production_line";
        break;
      }
      const auto& p = catalog.product(line.product);
      cycles += static_cast<std::int64_t>(p.cycles) * line.units;
      for (auto c : p.bom) need[index_of(c)] += line.units;
    }
    if (problem.empty() && cycles > config_.daily_cycles) {
      problem = "cycle_cap_exceeded: " + std::to_string(cycles) + " > " +
                std::to_string(config_.daily_cycles);
    }
    if (problem.empty()) {
      for (std::size_t c = 0; c < need.size(); ++c) {
        if (need[c] > s.components[c]) {
          problem = "insufficient_components: component " + std::to_string(c);
          break;
        }
      }
    }
    if (!problem.empty()) {
      reject(s.id, problem, cycles);
      continue;
    }

    for (const auto& line : plan) {
      const auto& p = catalog.product(line.product);
      for (auto c : p.bom) s.components[index_of(c)] -= line.units;
      s.finished[index_of(line.product)] += line.units;
      s.counters.components_consumed += static_cast<std::int64_t>(line.units) * static_cast<std::int64_t>(p.bom.size());
      s.counters.units_assembled += line.units;
      s.factory_schedule[day_].push_back(line);
      emit(EventKind::production_run, Endpoint::factory(), Endpoint::agent(s.id),
           ProductionRun{line.product, line.units, p.cycles * line.units});
    }
    cycles_today_[index_of(s.id)] = static_cast<int>(cycles);
    s.counters.cycles_used += cycles;
  }
}

// (7) Shipments planned in phase 5, then late penalties and cancellations.
void Game::phase_customer_deliveries() {
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    auto& s = states_[i];
    const auto& ship = planned_shipments_[i];
    std::set<OrderId> shipped;
    for (auto id : ship) {
      auto it = std::find_if(s.orders.begin(), s.orders.end(),
                             [&](const CustomerOrder& o) { return o.id == id; });
      if (it == s.orders.end() || shipped.count(id)) {
        reject(s.id, "unknown_order", raw(id));
        continue;
      }
      auto& stock = s.finished[index_of(it->product)];
      if (stock < it->quantity) {
        reject(s.id, "insufficient_finished_goods", raw(id));
        continue;
      }
      stock -= it->quantity;
      const int late_days = std::max(0, day_ - it->due_day);
      s.counters.units_delivered += it->quantity;
      ++s.counters.delivered;
      if (late_days > 0) ++s.counters.late;
      emit(EventKind::product_delivery, Endpoint::agent(s.id), Endpoint::customers(),
           ProductDelivery{it->id, it->product, it->quantity, it->unit_price, late_days});
      post_bank(s, TxKind::revenue, it->unit_price * it->quantity, raw(it->id));
      shipped.insert(id);
      s.orders.erase(it);
    }

    std::vector<CustomerOrder> keep;
    for (auto& o : s.orders) {
      if (day_ < o.due_day) {
        keep.push_back(o);
        continue;
      }
      o.status = OrderStatus::late;
      ++o.penalty_days;
      post_bank(s, TxKind::penalty, -o.penalty_per_day, raw(o.id));
      if (o.penalty_days >= o.cancel_after_days) {
        ++s.counters.cancelled;
        emit(EventKind::order_cancelled, Endpoint::customers(), Endpoint::agent(s.id),
             OrderCancelled{o.id});
      } else {
        keep.push_back(o);
      }
    }
    s.orders = std::move(keep);
  }
}

// (8) Storage and interest.
void Game::phase_bank() {
  for (auto& s : states_) {
    const std::size_t before = s.bank.transactions().size();
    Money running = s.bank.balance();
    s.bank = bank_apply_daily(std::move(s.bank), day_, config_.market.bank, s.inventory_units());
    const auto& txs = s.bank.transactions();
    for (std::size_t k = before; k < txs.size(); ++k) {
      running += txs[k].amount;
      emit(EventKind::bank_transaction, Endpoint::bank(), Endpoint::agent(s.id),
           BankEntry{txs[k].kind, txs[k].amount, running, txs[k].reference});
    }
  }
}

// (9) Market report of today's cleared auctions, then inventory snapshots.
void Game::phase_report() {
  MarketReport report;
  report.day = day_;
  std::map<ProductId, std::vector<Money>> prices;
  for (std::size_t k = 0; k < cleared_today_.size(); ++k) {
    prices[cleared_products_[k]].push_back(cleared_today_[k].unit_price);
  }
  for (const auto& [product, list] : prices) {
    ProductPriceStats st;
    st.product = product;
    st.count = static_cast<int>(list.size());
    st.min = *std::min_element(list.begin(), list.end());
    st.max = *std::max_element(list.begin(), list.end());
    Money total;
    for (auto m : list) total += m;
    st.mean = Money{total.amount / st.count};
    report.products.push_back(st);
  }
  emit(EventKind::market_report, Endpoint::market(), Endpoint::market(), report);
  last_report_ = std::move(report);

  for (const auto& s : states_) {
    emit(EventKind::inventory_snapshot, Endpoint::factory(), Endpoint::agent(s.id),
         InventorySnapshot{s.components, s.finished, cycles_today_[index_of(s.id)]});
  }
}

void Game::check_invariants() const {
  for (const auto& s : states_) {
    for (auto v : s.components) {
      if (v < 0) throw InvariantViolation("non_negative_component_inventory", day_, "");
    }
    for (auto v : s.finished) {
      if (v < 0) throw InvariantViolation("non_negative_finished_inventory", day_, "");
    }
    if (cycles_today_[index_of(s.id)] > config_.daily_cycles) {
      throw InvariantViolation("daily_cycle_cap", day_, "agent " + std::to_string(raw(s.id)));
    }
    Money total;
    for (const auto& tx : s.bank.transactions()) total += tx.amount;
    if (total != s.bank.balance()) {
      throw InvariantViolation("balance_equals_transaction_sum", day_,
                               "agent " + std::to_string(raw(s.id)));
    }
    if (s.counters.components_received - s.counters.components_consumed != sum(s.components) ||
        s.counters.units_assembled - s.counters.units_delivered != sum(s.finished)) {
      throw InvariantViolation("inventory_conservation", day_, "agent " + std::to_string(raw(s.id)));
    }
  }
  for (const auto& sup : suppliers_) {
    for (const auto& [d, units] : sup.commitments()) {
      if (units > sup.daily_capacity() || units < 0) {
        throw InvariantViolation("supplier_capacity", day_,
                                 "supplier " + std::to_string(raw(sup.id())) + " day " +
                                     std::to_string(d));
      }
    }
  }
}

GameResult Game::result() const {
  GameResult r;
  for (const auto& s : states_) {
    AgentResult a;
    a.agent = s.id;
    a.balance = s.bank.balance();
    a.revenue = s.bank.total(TxKind::revenue);
    a.material = s.bank.total(TxKind::material);
    a.storage = s.bank.total(TxKind::storage);
    a.penalty = s.bank.total(TxKind::penalty);
    a.interest = s.bank.total(TxKind::interest);
    a.bids = s.counters.bids;
    a.won = s.counters.won;
    a.delivered = s.counters.delivered;
    a.late = s.counters.late;
    a.cancelled = s.counters.cancelled;
    a.cycles_used = s.counters.cycles_used;
    a.utilization = utilization_of(a.cycles_used, config_);
    r.agents.push_back(a);
  }
  r.ranking = rank_agents(r.agents);
  return r;
}

GameRun run_game(const GameConfig& config, AgentList agents) {
  Game game(config, std::move(agents));
  game.run();
  return GameRun{game.result(), game.header(), game.log()};
}

GameResult tally(const EventLog& log, const GameConfig& config) {
  GameResult r;
  for (int i = 0; i < config.num_agents; ++i) {
    AgentResult a;
    a.agent = AgentId{i};
    r.agents.push_back(a);
  }
  auto at = [&](std::size_t index, const Endpoint& e) -> AgentResult& {
    if (e.party != Party::agent || e.id < 0 || e.id >= config.num_agents) {
      throw ReplayDivergence(index, "event addressed to unknown agent '" + e.str() + "'");
    }
    return r.agents[static_cast<std::size_t>(e.id)];
  };

  for (std::size_t i = 0; i < log.size(); ++i) {
    const Event& e = log[i];
    // Internal company notes reuse message kinds; only market traffic counts.
    if (std::holds_alternative<RoleNote>(e.payload)) continue;
    switch (e.kind) {
      case EventKind::bank_transaction: {
        auto& a = at(i, e.to);
        const auto& b = std::get<BankEntry>(e.payload);
        a.balance += b.amount;
        if (a.balance != b.balance) {
          throw ReplayDivergence(i, "logged balance " + std::to_string(b.balance.amount) +
                                        " != running sum " + std::to_string(a.balance.amount));
        }
        const Money magnitude{b.amount.amount < 0 ? -b.amount.amount : b.amount.amount};
        switch (b.kind) {
          case TxKind::revenue: a.revenue += magnitude; break;
          case TxKind::material: a.material += magnitude; break;
          case TxKind::storage: a.storage += magnitude; break;
          case TxKind::penalty: a.penalty += magnitude; break;
          case TxKind::interest: a.interest += magnitude; break;
        }
        break;
      }
      case EventKind::bid: ++at(i, e.from).bids; break;
      case EventKind::order_award: ++at(i, e.to).won; break;
      case EventKind::product_delivery: {
        auto& a = at(i, e.from);
        ++a.delivered;
        if (std::get<ProductDelivery>(e.payload).late_days > 0) ++a.late;
        break;
      }
      case EventKind::order_cancelled: ++at(i, e.to).cancelled; break;
      case EventKind::production_run:
        at(i, e.to).cycles_used += std::get<ProductionRun>(e.payload).cycles;
        break;
      default: break;
    }
  }
  for (auto& a : r.agents) a.utilization = utilization_of(a.cycles_used, config);
  r.ranking = rank_agents(r.agents);
  return r;
}

std::int64_t check_conservation(const EventLog& log, const Catalog& catalog, int num_agents) {
  struct Flow {
    std::vector<std::int64_t> components;
    std::vector<std::int64_t> products;
  };
  std::vector<Flow> flows(static_cast<std::size_t>(num_agents),
                          Flow{std::vector<std::int64_t>(catalog.component_count(), 0),
                               std::vector<std::int64_t>(catalog.product_count(), 0)});
  auto flow = [&](const Event& e, const Endpoint& ep) -> Flow& {
    if (ep.party != Party::agent || ep.id < 0 || ep.id >= num_agents) {
      throw InvariantViolation("conservation", e.day, "event for unknown agent " + ep.str());
    }
    return flows[static_cast<std::size_t>(ep.id)];
  };

  std::int64_t checked = 0;
  for (const auto& e : log) {
    switch (e.kind) {
      case EventKind::component_delivery: {
        const auto& d = std::get<ComponentDelivery>(e.payload);
        flow(e, e.to).components.at(index_of(d.component)) += d.quantity;
        break;
      }
      case EventKind::production_run: {
        const auto& run = std::get<ProductionRun>(e.payload);
        auto& f = flow(e, e.to);
        for (auto c : catalog.product(run.product).bom) f.components[index_of(c)] -= run.units;
        f.products.at(index_of(run.product)) += run.units;
        break;
      }
      case EventKind::product_delivery: {
        const auto& d = std::get<ProductDelivery>(e.payload);
        flow(e, e.from).products.at(index_of(d.product)) -= d.quantity;
        break;
      }
      case EventKind::inventory_snapshot: {
        const auto& snap = std::get<InventorySnapshot>(e.payload);
        const auto& f = flow(e, e.to);
        if (snap.components != f.components) {
          throw InvariantViolation("component_conservation", e.day, "agent " + std::to_string(e.to.id));
        }
        if (snap.products != f.products) {
          throw InvariantViolation("finished_goods_conservation", e.day,
                                   "agent " + std::to_string(e.to.id));
        }
        ++checked;
        break;
      }
      default: break;
    }
  }
  return checked;
}

GameResult replay(const LoadedLog& loaded, GameConfig config, const AgentFactory& make_agents) {
  config.seed = loaded.header.seed;
  const std::string hash = config_hash(config);
  if (loaded.header.config_hash != hash) {
    throw ConfigError("log was recorded with config " + loaded.header.config_hash +
                      ", replay config hashes to " + hash);
  }
  if (loaded.header.horizon_days != config.horizon_days ||
      loaded.header.num_agents != config.num_agents) {
    throw ConfigError("log header horizon/num_agents disagree with the config");
  }

  Game game(config, make_agents(config));
  std::size_t compared = 0;
  auto compare_new = [&]() {
    const auto& log = game.log();
    for (; compared < log.size(); ++compared) {
      if (compared >= loaded.lines.size()) {
        throw ReplayDivergence(compared, "log ends early (truncated after " +
                                             std::to_string(loaded.lines.size()) + " events)");
      }
      if (to_json_line(log[compared]) != loaded.lines[compared]) {
        throw ReplayDivergence(compared, "recorded event differs from re-simulation");
      }
    }
  };
  compare_new();
  while (!game.finished()) {
    game.tick();
    compare_new();
  }
  if (loaded.lines.size() > compared) {
    throw ReplayDivergence(compared, "log has events past the end of the game");
  }

  const GameResult from_events = tally(parse_events(loaded), config);
  if (!(from_events == game.result())) {
    throw ReplayDivergence(loaded.lines.size(), "ledgers rebuilt from events differ from the game");
  }
  return from_events;
}

}  // namespace scm
