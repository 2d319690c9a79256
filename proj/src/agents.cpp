#include "scm/agents.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "scm/errors.hpp"

namespace scm {

// ---------------------------------------------------------------------------
// ProductionProgram

int ProductionProgram::cycles_on(Day day) const {
  auto it = days.find(day);
  if (it == days.end()) return 0;
  int total = 0;
  for (const auto& e : it->second) total += e.cycles;
  return total;
}

int ProductionProgram::units_for(OrderId order) const {
  int total = 0;
  for (const auto& [day, entries] : days) {
    for (const auto& e : entries) {
      if (e.order == order) total += e.units;
    }
  }
  return total;
}

std::optional<Day> ProductionProgram::completion_day(OrderId order) const {
  std::optional<Day> last;
  for (const auto& [day, entries] : days) {
    for (const auto& e : entries) {
      if (e.order == order && e.units > 0) last = day;
    }
  }
  return last;
}

std::vector<ProductionLine> ProductionProgram::lines_on(Day day) const {
  std::map<ProductId, int> units;
  if (auto it = days.find(day); it != days.end()) {
    for (const auto& e : it->second) units[e.product] += e.units;
  }
  std::vector<ProductionLine> out;
  for (const auto& [product, n] : units) {
    if (n > 0) out.push_back(ProductionLine{product, n});
  }
  return out;
}

void ProductionProgram::add(const ProgramEntry& entry) { days[entry.day].push_back(entry); }

// ---------------------------------------------------------------------------
// Scheduler

ProductionProgram production_manager_schedule(std::span<const ScheduleOrder> orders,
                                              const FactoryResources& res, const Catalog& catalog,
                                              const ProductionProgram& locked) {
  ProductionProgram program = locked;
  const int n_days = std::max(0, res.end - res.start);
  if (n_days == 0) return program;

  // Days at or past `limited` are free of component limits.
  int limited = n_days;
  if (res.unlimited_from) limited = std::clamp(*res.unlimited_from - res.start, 0, n_days);

  const std::size_t n_comp = catalog.component_count();
  std::vector<int> used(static_cast<std::size_t>(n_days), 0);
  // slack[c][k]: components of c still uncommitted by the end of day start+k.
  std::vector<std::vector<std::int64_t>> slack(n_comp, std::vector<std::int64_t>(n_days, 0));
  for (std::size_t c = 0; c < n_comp; ++c) {
    std::int64_t cum = c < res.stock.size() ? res.stock[c] : 0;
    for (int k = 0; k < n_days; ++k) {
      if (auto it = res.arrivals.find(res.start + k); it != res.arrivals.end() && c < it->second.size()) {
        cum += it->second[c];
      }
      slack[c][static_cast<std::size_t>(k)] = cum;
    }
  }
  auto consume = [&](int k, ComponentId c, std::int64_t units) {
    for (int j = k; j < limited; ++j) slack[index_of(c)][static_cast<std::size_t>(j)] -= units;
  };
  for (const auto& [day, entries] : locked.days) {
    const int k = day - res.start;
    if (k < 0 || k >= n_days) continue;
    for (const auto& e : entries) {
      used[static_cast<std::size_t>(k)] += e.cycles;
      for (auto c : catalog.product(e.product).bom) consume(k, c, e.units);
    }
  }

  std::vector<const ScheduleOrder*> sorted;
  for (const auto& o : orders) sorted.push_back(&o);
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    if (a->due_day != b->due_day) return a->due_day < b->due_day;
    if (a->unit_margin != b->unit_margin) return a->unit_margin > b->unit_margin;
    return a->id < b->id;
  });

  // Fills `o` into the earliest days with room; returns the last day used.
  auto place = [&](const ScheduleOrder& o, ProductionProgram& prog) {
    const auto& product = catalog.product(o.product);
    int remaining = o.quantity - locked.units_for(o.id);
    std::optional<Day> last;
    for (int k = 0; k < n_days && remaining > 0; ++k) {
      std::int64_t cap = (res.daily_cycles - used[static_cast<std::size_t>(k)]) / product.cycles;
      if (k < limited) {
        for (auto c : product.bom) {
          const auto& s = slack[index_of(c)];
          const std::int64_t room = *std::min_element(s.begin() + k, s.begin() + limited);
          cap = std::min(cap, room);
        }
      }
      const int units = static_cast<int>(std::min<std::int64_t>(remaining, cap));
      if (units <= 0) continue;
      prog.add(ProgramEntry{res.start + k, o.id, o.product, units, units * product.cycles});
      used[static_cast<std::size_t>(k)] += units * product.cycles;
      for (auto c : product.bom) consume(k, c, units);
      remaining -= units;
      last = res.start + k;
    }
    return remaining == 0 ? last : std::nullopt;
  };

  // First pass keeps only orders that finish by their due day; the rest fill
  // what is left in the same order, so a hopeless order never pushes a
  // feasible one late.
  std::vector<const ScheduleOrder*> deferred;
  for (const auto* o : sorted) {
    const auto saved_used = used;
    const auto saved_slack = slack;
    ProductionProgram trial = program;
    const auto done = place(*o, trial);
    if (locked.units_for(o->id) >= o->quantity || (done && *done <= o->due_day)) {
      program = std::move(trial);
    } else {
      used = saved_used;
      slack = saved_slack;
      deferred.push_back(o);
    }
  }
  for (const auto* o : deferred) place(*o, program);
  return program;
}

// ---------------------------------------------------------------------------
// Delivery, inventory, supply

std::vector<OrderId> delivery_manager_dispatch(std::span<const CustomerOrder> orders,
                                               std::vector<std::int64_t>& finished) {
  std::vector<const CustomerOrder*> sorted;
  for (const auto& o : orders) sorted.push_back(&o);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    return a->due_day != b->due_day ? a->due_day < b->due_day : a->id < b->id;
  });
  std::vector<OrderId> ship;
  for (const auto* o : sorted) {
    if (index_of(o->product) >= finished.size()) continue;
    auto& stock = finished[index_of(o->product)];
    if (stock >= o->quantity) {
      stock -= o->quantity;
      ship.push_back(o->id);
    }
  }
  return ship;
}

InventoryUpdate inventory_manager_update(const DemandForecast& forecast,
                                         const ComponentPosition& inventory, int horizon_days,
                                         const Catalog& catalog) {
  InventoryUpdate out;
  out.thresholds = component_targets(forecast, horizon_days, catalog);
  for (const auto& c : catalog.components()) {
    const auto threshold = out.thresholds[index_of(c.id)];
    if (threshold > 0 && inventory.position(c.id) < threshold) out.alerts.push_back(c.id);
  }
  return out;
}

ProcurementPlan supply_manager_plan(ProcurementPlan need, std::span<const SupplierSpec> suppliers,
                                    const QuoteHistory& quotes, const LatenessTracker& lateness,
                                    const Catalog& catalog, PlanWindow window) {
  for (auto& line : need) {
    std::optional<SupplierId> best;
    Money best_price;
    for (const auto& s : suppliers) {
      if (std::find(s.components.begin(), s.components.end(), line.component) == s.components.end()) {
        continue;
      }
      auto it = quotes.find({s.id, line.component});
      const Money price = it != quotes.end() ? it->second : catalog.component(line.component).base_price;
      if (!best || price < best_price) {
        best = s.id;
        best_price = price;
      }
    }
    if (!best) {
      throw ConfigError("no supplier produces component " + std::to_string(raw(line.component)));
    }
    line.supplier = best;
  }
  return delay_risk_adjust(std::move(need), lateness, window);
}

// ---------------------------------------------------------------------------
// CompanyAgent

namespace {

RoleNote note(std::string topic, std::int64_t reference,
              std::map<std::string, std::int64_t> values = {}) {
  return RoleNote{std::move(topic), reference, std::move(values)};
}

}  // namespace

CompanyAgent::CompanyAgent(AgentId id, AgentBinding binding, const Catalog& catalog)
    : id_(id),
      binding_(std::move(binding)),
      catalog_(catalog),
      sales_(make_sales_strategy(binding_.sales_strategy, binding_.sales)),
      procurement_(binding_.procurement_strategy),
      lateness_(binding_.procurement.lateness_alpha) {}

DemandForecast CompanyAgent::forecast() const {
  DemandForecast f;
  f.window_days = binding_.procurement.forecast_window_days;
  f.units.assign(catalog_.product_count(), 0);
  for (const auto& day : won_history_) {
    for (std::size_t p = 0; p < day.size(); ++p) f.units[p] += day[p];
  }
  return f;
}

std::vector<ScheduleOrder> CompanyAgent::open_production_needs(const AgentView& view) const {
  std::vector<CustomerOrder> orders = view.state->orders;
  std::sort(orders.begin(), orders.end(), [](const auto& a, const auto& b) {
    return a.due_day != b.due_day ? a.due_day < b.due_day : a.id < b.id;
  });
  std::vector<std::int64_t> finished = view.state->finished;
  std::vector<ScheduleOrder> out;
  for (const auto& o : orders) {
    auto& stock = finished[index_of(o.product)];
    const std::int64_t covered = std::min<std::int64_t>(stock, o.quantity);
    stock -= covered;
    const int need = o.quantity - static_cast<int>(covered);
    if (need <= 0) continue;
    out.push_back(ScheduleOrder{o.id, o.product, need, o.due_day - 1,
                                o.unit_price - product_cost_floor(o.product, catalog_)});
  }
  return out;
}

ComponentPosition CompanyAgent::position(const AgentView& view,
                                         std::span<const SupplyOrder> accepted_today,
                                         bool exclude_new_awards) const {
  auto pos = ComponentPosition::empty(catalog_.component_count());
  pos.stock = view.state->components;
  for (const auto& o : view.state->inbound) pos.in_transit[index_of(o.component)] += o.quantity;
  for (const auto& o : accepted_today) pos.in_transit[index_of(o.component)] += o.quantity;

  std::set<OrderId> fresh;
  if (exclude_new_awards) {
    for (const auto& a : view.awards) fresh.insert(a.id);
  }
  for (const auto& need : open_production_needs(view)) {
    if (fresh.count(need.id)) continue;
    for (auto c : catalog_.product(need.product).bom) pos.reserved[index_of(c)] += need.quantity;
  }
  return pos;
}

AttendOutcome CompanyAgent::coordinator_attend_request(const CustomerRfq& rfq, const AgentView& view,
                                                       ProductionProgram& program,
                                                       const FactoryResources& resources,
                                                       MessageBus& bus) {
  const std::int64_t ref = raw(rfq.id);
  const AgentState& state = *view.state;
  AttendOutcome out;

  // evalProgram: the committed program is the snapshot evaluated below.
  bus.post(Role::coordinator, Role::delivery, EventKind::schedule_update,
           note("eval_delivery", ref, {{"due_day", rfq.due_day}, {"quantity", rfq.quantity}}));
  std::int64_t ahead = 0;
  for (const auto& o : state.orders) {
    if (o.due_day <= rfq.due_day) ++ahead;
  }
  bus.post(Role::delivery, Role::coordinator, EventKind::schedule_update,
           note("update_schedule", ref, {{"deliveries_ahead", ahead}}));

  bus.post(Role::coordinator, Role::production, EventKind::production_request,
           note("eval_prod_request", ref,
                {{"product", raw(rfq.product)}, {"quantity", rfq.quantity}, {"due_day", rfq.due_day}}));
  ProductionProgram trial = program;
  if (rfq.due_day < view.horizon && catalog_.has_product(rfq.product)) {
    const ScheduleOrder candidate{OrderId{ref}, rfq.product, rfq.quantity, rfq.due_day - 1,
                                  rfq.reserve_unit_price - product_cost_floor(rfq.product, catalog_)};
    trial = production_manager_schedule(std::span(&candidate, 1), resources, catalog_, program);
    const auto done = trial.completion_day(candidate.id);
    // goods built on day d ship on day d + 1 at the earliest
    out.feasible = trial.units_for(candidate.id) == rfq.quantity && done && *done < rfq.due_day;
    if (out.feasible) out.completion_day = done;
  }
  bus.post(Role::production, Role::coordinator, EventKind::production_request,
           note("prod_request", ref,
                {{"feasible", out.feasible ? 1 : 0},
                 {"completion_day", out.completion_day ? *out.completion_day : -1}}));
  if (!out.feasible) {
    bus.post(Role::coordinator, Role::delivery, EventKind::schedule_update, note("decline", ref));
    return out;
  }
  bus.post(Role::coordinator, Role::delivery, EventKind::schedule_update,
           note("update_delivery", ref, {{"planned_day", *out.completion_day + 1}}));

  bus.post(Role::coordinator, Role::sales, EventKind::customer_rfq,
           note("price_request", ref, {{"reserve", rfq.reserve_unit_price.amount}}));
  PricingContext ctx;
  ctx.today = view.day;
  ctx.cost_floor = product_cost_floor(rfq.product, catalog_);
  if (auto it = predictor_.last_mean.find(rfq.product); it != predictor_.last_mean.end()) {
    ctx.features.yesterday_mean = static_cast<double>(it->second.amount);
  }
  ctx.features.demand_level = static_cast<double>(view.rfqs.size());
  const double stock = static_cast<double>(state.finished[index_of(rfq.product)]);
  ctx.urgency = 0.5 + 0.5 * std::min(1.0, stock / std::max(1, rfq.quantity));
  const auto priced = sales_manager_price(*sales_, rfq, ctx, predictor_, binding_.sales);
  bus.post(Role::sales, Role::coordinator, EventKind::bid,
           note("price", ref,
                {{"price", priced ? priced->unit_price.amount : -1},
                 {"clamped", priced && priced->clamped ? 1 : 0},
                 {"declined", priced ? 0 : 1}}));
  if (!priced) {
    bus.post(Role::coordinator, Role::production, EventKind::production_request, note("release", ref));
    return out;
  }

  program = std::move(trial);
  out.bid = Bid{rfq.id, id_, priced->unit_price};
  open_bids_[rfq.id] = OwnOutcome{rfq, priced->unit_price, false, ctx.features};
  return out;
}

DailyDecision CompanyAgent::decide(const AgentView& view, MessageBus& bus) {
  DailyDecision d;
  const AgentState& state = *view.state;
  const auto& params = binding_.procurement;

  // Learn from yesterday's bids and the latest market report.
  DayObservations obs;
  obs.day = view.day;
  std::set<RfqId> won;
  for (const auto& a : view.awards) won.insert(a.rfq);
  for (auto& [rfq, outcome] : open_bids_) {
    outcome.won = won.count(rfq) > 0;
    obs.outcomes.push_back(outcome);
  }
  open_bids_.clear();
  if (view.last_report) obs.report = *view.last_report;
  predictor_ = update_history(std::move(predictor_), std::span(&obs, 1), binding_.sales);

  std::vector<std::int64_t> won_today(catalog_.product_count(), 0);
  for (const auto& a : view.awards) won_today[index_of(a.product)] += a.quantity;
  won_history_.push_back(std::move(won_today));
  while (static_cast<int>(won_history_.size()) > params.forecast_window_days) won_history_.pop_front();

  // Supply manager: read quotes, track lateness, take every usable offer.
  std::vector<SupplyOrder> accepted;
  for (const auto& offer : view.offers) {
    quotes_[{offer.supplier, offer.component}] = offer.unit_price;
    lateness_.observe(offer.supplier, offer.promised_due_day - offer.requested_due_day);
    if (offer.quantity > 0 && offer.promised_due_day < view.horizon) {
      d.accept_offers.push_back(offer.rfq);
      accepted.push_back(SupplyOrder{offer.rfq, id_, offer.supplier, offer.component, offer.quantity,
                                     offer.unit_price, offer.promised_due_day});
    }
  }
  if (!view.offers.empty()) {
    bus.post(Role::supply, Role::coordinator, EventKind::supply_order,
             note("accept_offers", view.day,
                  {{"offers", static_cast<std::int64_t>(view.offers.size())},
                   {"accepted", static_cast<std::int64_t>(accepted.size())}}));
  }

  // Meta-strategy: trailing ten days of storage against revenue.
  Money storage, revenue;
  for (auto it = state.bank.transactions().rbegin(); it != state.bank.transactions().rend(); ++it) {
    if (it->day <= view.day - 10) break;
    if (it->kind == TxKind::storage) storage -= it->amount;
    if (it->kind == TxKind::revenue) revenue += it->amount;
  }
  procurement_ = meta_select(procurement_, storage, revenue, params);

  // Production manager: today's run from real resources.
  FactoryResources real;
  real.start = view.day;
  real.end = view.horizon;
  real.daily_cycles = view.daily_cycles;
  real.stock = state.components;
  auto add_arrival = [&](const SupplyOrder& o) {
    auto& v = real.arrivals[o.due_day];
    if (v.empty()) v.assign(catalog_.component_count(), 0);
    v[index_of(o.component)] += o.quantity;
  };
  for (const auto& o : state.inbound) add_arrival(o);
  for (const auto& o : accepted) add_arrival(o);

  const auto needs = open_production_needs(view);
  const auto actual = production_manager_schedule(needs, real, catalog_);
  d.production = actual.lines_on(view.day);
  if (!d.production.empty()) {
    bus.post(Role::production, Role::coordinator, EventKind::production_request,
             note("prod_schedule", view.day, {{"cycles", actual.cycles_on(view.day)}}));
  }

  // Coordinator: attend every request against the optimistic program.
  FactoryResources optimistic = real;
  optimistic.unlimited_from = view.day + 2;
  ProductionProgram committed = production_manager_schedule(needs, optimistic, catalog_);
  std::vector<CustomerRfq> rfqs(view.rfqs.begin(), view.rfqs.end());
  std::sort(rfqs.begin(), rfqs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& rfq : rfqs) {
    auto outcome = coordinator_attend_request(rfq, view, committed, optimistic, bus);
    if (outcome.bid) d.bids.push_back(*outcome.bid);
  }

  // Inventory manager.
  const auto pos = position(view, accepted, false);
  const auto inv = inventory_manager_update(forecast(), pos, binding_.inventory_horizon_days, catalog_);
  for (auto c : inv.alerts) {
    bus.post(Role::inventory, Role::coordinator, EventKind::report,
             note("shortage", raw(c),
                  {{"position", pos.position(c)}, {"threshold", inv.thresholds[index_of(c)]}}));
  }

  // Supply manager: strategy plan, supplier choice, lateness hedge.
  const PlanWindow window{view.day, view.horizon};
  ProcurementPlan plan;
  switch (procurement_) {
    case ProcurementStrategyKind::mixed_horizon: {
      const auto target = component_targets(forecast(), params.mixed_long_lead, catalog_);
      std::vector<ComponentNeed> need;
      for (const auto& c : catalog_.components()) {
        const std::int64_t q = target[index_of(c.id)] - pos.position(c.id);
        if (q > 0) need.push_back(ComponentNeed{c.id, q});
      }
      plan = mixed_horizon_plan(need, params.mixed_split, params.mixed_short_lead,
                                params.mixed_long_lead, window);
      break;
    }
    case ProcurementStrategyKind::threshold:
      plan = threshold_plan(forecast(), pos, params.threshold_horizon_days, catalog_,
                            params.mixed_short_lead, window);
      break;
    case ProcurementStrategyKind::jit:
      plan = jit_plan(view.awards, position(view, accepted, true), catalog_,
                      params.jit_production_lead, window);
      break;
  }
  if (!plan.empty()) {
    plan = supply_manager_plan(std::move(plan), view.suppliers, quotes_, lateness_, catalog_, window);
    std::int64_t units = 0;
    for (const auto& line : plan) {
      units += line.quantity;
      d.supply_rfqs.push_back(
          SupplyRequest{*line.supplier, line.component, line.quantity, line.requested_due_day});
    }
    bus.post(Role::coordinator, Role::supply, EventKind::supply_rfq,
             note("procure", view.day,
                  {{"lines", static_cast<std::int64_t>(plan.size())}, {"units", units}}));
  }
  return d;
}

std::vector<OrderId> CompanyAgent::dispatch(const DispatchView& view, MessageBus& bus) {
  std::vector<std::int64_t> finished = view.state->finished;
  auto ship = delivery_manager_dispatch(view.state->orders, finished);
  if (!ship.empty()) {
    bus.post(Role::delivery, Role::coordinator, EventKind::product_delivery_request,
             note("dispatch", view.day, {{"orders", static_cast<std::int64_t>(ship.size())}}));
  }
  return ship;
}

AgentList make_company_agents(const GameConfig& config) {
  AgentList out;
  for (int i = 0; i < config.num_agents; ++i) {
    out.push_back(std::make_unique<CompanyAgent>(AgentId{i}, config.agents.at(static_cast<std::size_t>(i)),
                                                 config.catalog));
  }
  return out;
}

GameRun run_game(const GameConfig& config) { return run_game(config, make_company_agents(config)); }

GameResult replay(const LoadedLog& loaded, const GameConfig& config) {
  return replay(loaded, config, make_company_agents);
}

}  // namespace scm
