#include "scm/market.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "scm/errors.hpp"

namespace scm {

std::string_view to_string(OrderStatus status) {
  switch (status) {
    case OrderStatus::pending: return "pending";
    case OrderStatus::delivered: return "delivered";
    case OrderStatus::late: return "late";
    case OrderStatus::cancelled: return "cancelled";
  }
  return "?";
}

const ProductPriceStats* MarketReport::find(ProductId product) const {
  for (const auto& p : products) {
    if (p.product == product) return &p;
  }
  return nullptr;
}

std::vector<CustomerRfq> generate_customer_rfqs(Day day, const DemandConfig& config,
                                                const Catalog& catalog, RngStream& rng,
                                                RfqId first_id) {
  std::vector<CustomerRfq> out;
  const std::int64_t count = rng.poisson(config.lambda);
  if (count == 0 || catalog.product_count() == 0) return out;

  std::vector<std::int64_t> weights = config.product_weights;
  if (weights.empty()) weights.assign(catalog.product_count(), 1);
  const std::int64_t total_weight = std::accumulate(weights.begin(), weights.end(), std::int64_t{0});

  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    std::int64_t pick = rng.uniform_int(0, total_weight - 1);
    std::size_t product = 0;
    while (pick >= weights[product]) {
      pick -= weights[product];
      ++product;
    }

    CustomerRfq rfq;
    rfq.id = RfqId{raw(first_id) + i};
    rfq.product = ProductId{static_cast<std::int32_t>(product)};
    rfq.quantity = static_cast<int>(rng.uniform_int(config.quantity.lo, config.quantity.hi));
    rfq.issue_day = day;
    rfq.due_day = day + static_cast<Day>(rng.uniform_int(config.lead_days.lo, config.lead_days.hi));
    const Ppm multiplier{rng.uniform_int(config.reserve_multiplier.lo.value,
                                         config.reserve_multiplier.hi.value)};
    const Money floor = product_cost_floor(rfq.product, catalog);
    rfq.reserve_unit_price = std::max(Money{1}, scale(floor, multiplier));
    rfq.penalty_per_day = scale(rfq.reserve_unit_price * rfq.quantity, config.penalty_rate);
    rfq.cancel_after_days = config.cancel_after_days;
    out.push_back(rfq);
  }
  return out;
}

std::optional<Award> clear_auction(const CustomerRfq& rfq, std::span<const Bid> bids) {
  std::set<AgentId> seen;
  for (const auto& bid : bids) {
    if (bid.rfq != rfq.id) {
      throw MarketError("bid for rfq " + std::to_string(raw(bid.rfq)) + " submitted to rfq " +
                        std::to_string(raw(rfq.id)));
    }
    if (!seen.insert(bid.agent).second) {
      throw MarketError("malformed bid set for rfq " + std::to_string(raw(rfq.id)) +
                        ": duplicate bid from agent " + std::to_string(raw(bid.agent)));
    }
  }

  const Bid* best = nullptr;
  for (const auto& bid : bids) {
    if (bid.unit_price > rfq.reserve_unit_price || bid.unit_price < Money{0}) continue;
    if (best == nullptr || bid.unit_price < best->unit_price ||
        (bid.unit_price == best->unit_price && bid.agent < best->agent)) {
      best = &bid;
    }
  }
  if (best == nullptr) return std::nullopt;
  return Award{best->agent, best->unit_price};
}

Supplier::Supplier(SupplierSpec spec) : spec_(std::move(spec)) {
  if (spec_.daily_capacity <= 0) {
    throw ConfigError("supplier " + std::to_string(raw(spec_.id)) + " needs positive capacity");
  }
}

bool Supplier::produces(ComponentId component) const {
  return std::find(spec_.components.begin(), spec_.components.end(), component) !=
         spec_.components.end();
}

int Supplier::committed_on(Day day) const {
  auto it = committed_.find(day);
  return it == committed_.end() ? 0 : it->second;
}

void Supplier::commit(Day day, int units) {
  int& slot = committed_[day];
  slot += units;
  if (slot == 0) committed_.erase(day);
}

std::vector<SupplierSpec> default_suppliers(const Catalog& catalog, int daily_capacity) {
  std::vector<ComponentId> pintel_cpu, imd_cpu, boards, memory, disks;
  for (const auto& c : catalog.components()) {
    switch (c.kind) {
      case ComponentKind::cpu:
        (c.family == Family::pintel ? pintel_cpu : imd_cpu).push_back(c.id);
        break;
      case ComponentKind::motherboard: boards.push_back(c.id); break;
      case ComponentKind::memory: memory.push_back(c.id); break;
      case ComponentKind::disk: disks.push_back(c.id); break;
    }
  }
  std::vector<SupplierSpec> out;
  auto add = [&](const std::vector<ComponentId>& line) {
    out.push_back({SupplierId{static_cast<std::int32_t>(out.size())}, line, daily_capacity});
  };
  add(pintel_cpu);
  add(imd_cpu);
  add(boards);
  add(boards);
  add(memory);
  add(memory);
  add(disks);
  add(disks);
  return out;
}

Money quote_supply_price(const ComponentSku& component, const Supplier& supplier,
                         Day requested_due_day, Day today, Ppm discount) {
  if (!supplier.produces(component.id)) {
    throw MarketError("supplier " + std::to_string(raw(supplier.id())) +
                      " does not produce component " + std::to_string(raw(component.id)));
  }
  if (requested_due_day <= today) {
    throw MarketError("requested due day must lie after today");
  }
  const std::int64_t days = requested_due_day - today;
  const std::int64_t total = days * supplier.daily_capacity();
  std::int64_t free = 0;
  for (Day d = today + 1; d <= requested_due_day; ++d) free += std::max(0, supplier.free_on(d));

  // base * (total - discount * free) / total, all in ppm to stay exact
  const std::int64_t numer = total * Ppm::one - discount.value * free;
  return Money{div_round(component.base_price.amount * numer, total * Ppm::one)};
}

std::vector<CapacityPromise> allocate_supplier_capacity(Supplier& supplier,
                                                        std::span<const CapacityRequest> requests) {
  std::vector<std::size_t> order(requests.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (requests[a].requested_due_day != requests[b].requested_due_day) {
      return requests[a].requested_due_day < requests[b].requested_due_day;
    }
    return requests[a].id < requests[b].id;
  });

  std::vector<CapacityPromise> out(requests.size());
  for (std::size_t i : order) {
    const auto& req = requests[i];
    const int quantity = std::clamp(req.quantity, 0, supplier.daily_capacity());
    Day day = req.requested_due_day;
    while (supplier.free_on(day) < quantity) ++day;
    supplier.commit(day, quantity);
    out[i] = CapacityPromise{req.id, quantity, day};
  }
  return out;
}

std::string_view to_string(TxKind kind) {
  switch (kind) {
    case TxKind::revenue: return "revenue";
    case TxKind::material: return "material";
    case TxKind::storage: return "storage";
    case TxKind::penalty: return "penalty";
    case TxKind::interest: return "interest";
  }
  return "?";
}

TxKind tx_kind_from(std::string_view name) {
  for (auto k : {TxKind::revenue, TxKind::material, TxKind::storage, TxKind::penalty,
                 TxKind::interest}) {
    if (to_string(k) == name) return k;
  }
  throw Error("unknown transaction kind '" + std::string(name) + "'");
}

const Transaction& BankLedger::post(Day day, TxKind kind, Money amount, std::int64_t reference) {
  transactions_.push_back(Transaction{day, kind, amount, reference});
  balance_ += amount;
  return transactions_.back();
}

Money BankLedger::total(TxKind kind) const {
  Money sum;
  for (const auto& t : transactions_) {
    if (t.kind == kind) sum += t.amount < Money{0} ? -t.amount : t.amount;
  }
  return sum;
}

BankLedger bank_apply_daily(BankLedger ledger, Day day, const BankConfig& config,
                            std::int64_t inventory_units) {
  if (ledger.last_daily_day() && *ledger.last_daily_day() >= day) {
    throw MarketError("bank daily charges already applied for agent " +
                      std::to_string(raw(ledger.agent())) + " on day " + std::to_string(day));
  }
  ledger.post(day, TxKind::storage, -(config.holding_rate * inventory_units));
  const Money balance = ledger.balance();
  const Money interest = balance < Money{0} ? scale(-balance, config.debt_rate) : Money{0};
  ledger.post(day, TxKind::interest, -interest);
  ledger.mark_daily(day);
  return ledger;
}

}  // namespace scm
