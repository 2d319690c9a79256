#include "scm/procurement.hpp"

#include <algorithm>
#include <cmath>

#include "scm/errors.hpp"

namespace scm {

std::string_view to_string(ProcurementStrategyKind kind) {
  switch (kind) {
    case ProcurementStrategyKind::mixed_horizon: return "mixed_horizon";
    case ProcurementStrategyKind::threshold: return "threshold";
    case ProcurementStrategyKind::jit: return "jit";
  }
  return "?";
}

ProcurementStrategyKind procurement_strategy_from(std::string_view name) {
  for (auto k : {ProcurementStrategyKind::mixed_horizon, ProcurementStrategyKind::threshold,
                 ProcurementStrategyKind::jit}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown procurement strategy '" + std::string(name) + "'");
}

DemandForecast DemandForecast::per_day(std::vector<std::int64_t> units_per_day) {
  return DemandForecast{1, std::move(units_per_day)};
}

double DemandForecast::daily(ProductId product) const {
  if (index_of(product) >= units.size() || window_days <= 0) return 0.0;
  return static_cast<double>(units[index_of(product)]) / window_days;
}

std::int64_t DemandForecast::over(ProductId product, int days) const {
  if (index_of(product) >= units.size() || window_days <= 0 || days <= 0) return 0;
  const std::int64_t num = units[index_of(product)] * days;
  return (num + window_days - 1) / window_days;
}

ComponentPosition ComponentPosition::empty(std::size_t components) {
  return ComponentPosition{std::vector<std::int64_t>(components, 0),
                           std::vector<std::int64_t>(components, 0),
                           std::vector<std::int64_t>(components, 0)};
}

std::int64_t ComponentPosition::position(ComponentId c) const {
  auto at = [&](const std::vector<std::int64_t>& v) {
    return index_of(c) < v.size() ? v[index_of(c)] : 0;
  };
  return at(stock) + at(in_transit) - at(reserved);
}

namespace {

std::optional<Day> clamp_due(Day due, PlanWindow window) {
  const Day lo = window.today + 1;
  const Day hi = window.horizon - 1;
  if (lo > hi) return std::nullopt;
  return std::clamp(due, lo, hi);
}

void add_line(ProcurementPlan& plan, ComponentId c, std::int64_t quantity, Day due,
              PlanWindow window) {
  if (quantity <= 0) return;
  const auto day = clamp_due(due, window);
  if (!day) return;
  for (auto& line : plan) {
    if (line.component == c && line.requested_due_day == *day && !line.supplier) {
      line.quantity += static_cast<int>(quantity);
      return;
    }
  }
  plan.push_back(PlanLine{c, static_cast<int>(quantity), *day, std::nullopt});
}

}  // namespace

ProcurementPlan mixed_horizon_plan(std::span<const ComponentNeed> need, Ppm split, int short_lead,
                                   int long_lead, PlanWindow window) {
  ProcurementPlan plan;
  for (const auto& n : need) {
    if (n.quantity <= 0) continue;
    const std::int64_t scaled = n.quantity * split.value;
    const std::int64_t short_qty = std::min(n.quantity, (scaled + Ppm::one - 1) / Ppm::one);
    const std::int64_t long_qty = n.quantity - short_qty;
    if (short_qty > 0) {
      if (auto d = clamp_due(window.today + short_lead, window)) {
        plan.push_back(PlanLine{n.component, static_cast<int>(short_qty), *d, std::nullopt});
      }
    }
    if (long_qty > 0) {
      if (auto d = clamp_due(window.today + long_lead, window)) {
        plan.push_back(PlanLine{n.component, static_cast<int>(long_qty), *d, std::nullopt});
      }
    }
  }
  return plan;
}

std::vector<std::int64_t> component_targets(const DemandForecast& forecast, int horizon_days,
                                            const Catalog& catalog) {
  std::vector<std::int64_t> target(catalog.component_count(), 0);
  for (const auto& product : catalog.products()) {
    const std::int64_t units = forecast.over(product.id, horizon_days);
    if (units == 0) continue;
    for (ComponentId c : product.bom) target[index_of(c)] += units;
  }
  return target;
}

ProcurementPlan threshold_plan(const DemandForecast& forecast, const ComponentPosition& inventory,
                               int horizon_days, const Catalog& catalog, int short_lead,
                               PlanWindow window) {
  const auto target = component_targets(forecast, std::max(1, horizon_days), catalog);
  ProcurementPlan plan;
  for (const auto& c : catalog.components()) {
    const std::int64_t order = target[index_of(c.id)] - inventory.position(c.id);
    add_line(plan, c.id, order, window.today + short_lead, window);
  }
  return plan;
}

ProcurementPlan jit_plan(std::span<const CustomerOrder> newly_won, const ComponentPosition& inventory,
                         const Catalog& catalog, int production_lead, PlanWindow window) {
  std::vector<const CustomerOrder*> orders;
  for (const auto& o : newly_won) orders.push_back(&o);
  std::sort(orders.begin(), orders.end(), [](const auto* a, const auto* b) {
    return a->due_day != b->due_day ? a->due_day < b->due_day : a->id < b->id;
  });

  std::vector<std::int64_t> pool(catalog.component_count(), 0);
  for (const auto& c : catalog.components()) {
    pool[index_of(c.id)] = std::max<std::int64_t>(0, inventory.position(c.id));
  }

  ProcurementPlan plan;
  for (const auto* order : orders) {
    for (ComponentId c : catalog.product(order->product).bom) {
      std::int64_t& available = pool[index_of(c)];
      const std::int64_t take = std::min<std::int64_t>(available, order->quantity);
      available -= take;
      add_line(plan, c, order->quantity - take, order->due_day - production_lead, window);
    }
  }
  return plan;
}

void LatenessTracker::observe(SupplierId supplier, int lateness_days) {
  double& m = mean_[supplier];
  m = alpha_ * static_cast<double>(std::max(0, lateness_days)) + (1.0 - alpha_) * m;
}

double LatenessTracker::mean(SupplierId supplier) const {
  auto it = mean_.find(supplier);
  return it == mean_.end() ? 0.0 : it->second;
}

ProcurementPlan delay_risk_adjust(ProcurementPlan plan, const LatenessTracker& lateness,
                                  PlanWindow window) {
  for (auto& line : plan) {
    if (!line.supplier) continue;
    const auto shift = static_cast<Day>(std::ceil(lateness.mean(*line.supplier)));
    if (shift <= 0) continue;
    line.requested_due_day = std::max(window.today + 1, line.requested_due_day - shift);
  }
  return plan;
}

ProcurementStrategyKind meta_select(ProcurementStrategyKind current, Money trailing_storage,
                                    Money trailing_revenue, const ProcurementParams& params) {
  if (!params.meta_enabled || current != ProcurementStrategyKind::mixed_horizon) return current;
  if (trailing_storage > scale(trailing_revenue, params.meta_storage_fraction)) {
    return ProcurementStrategyKind::jit;
  }
  return current;
}

}  // namespace scm
