#pragma once

#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "scm/domain.hpp"
#include "scm/market.hpp"
#include "scm/types.hpp"

namespace scm {

enum class ProcurementStrategyKind { mixed_horizon, threshold, jit };
std::string_view to_string(ProcurementStrategyKind kind);
ProcurementStrategyKind procurement_strategy_from(std::string_view name);

struct ProcurementParams {
  Ppm mixed_split{500'000};
  int mixed_short_lead = 3;
  int mixed_long_lead = 10;
  int threshold_horizon_days = 5;
  int jit_production_lead = 1;
  double lateness_alpha = 0.3;
  bool meta_enabled = false;
  /// Storage cost share of revenue (trailing 10 days) that triggers mixed -> jit.
  Ppm meta_storage_fraction{250'000};
  int forecast_window_days = 10;

  bool operator==(const ProcurementParams&) const = default;
};

struct PlanLine {
  ComponentId component{};
  int quantity = 0;
  Day requested_due_day = 0;
  /// Filled in by the supply manager once a supplier is picked.
  std::optional<SupplierId> supplier;

  bool operator==(const PlanLine&) const = default;
};

using ProcurementPlan = std::vector<PlanLine>;

/// Due days of every plan line are kept inside (today, horizon).
struct PlanWindow {
  Day today = 0;
  Day horizon = 220;
};

/// Moving average of won-order volume: `units[p]` won over the last
/// `window_days` days. Kept as an exact ratio.
struct DemandForecast {
  int window_days = 10;
  std::vector<std::int64_t> units;

  static DemandForecast per_day(std::vector<std::int64_t> units_per_day);
  double daily(ProductId product) const;
  /// ceil(expected units of `product` over `days` days)
  std::int64_t over(ProductId product, int days) const;
};

/// Per-component inventory position inputs, indexed by component id.
struct ComponentPosition {
  std::vector<std::int64_t> stock;
  std::vector<std::int64_t> in_transit;
  /// Components already spoken for by won, unproduced orders.
  std::vector<std::int64_t> reserved;

  static ComponentPosition empty(std::size_t components);
  std::int64_t position(ComponentId c) const;
};

struct ComponentNeed {
  ComponentId component{};
  std::int64_t quantity = 0;
};

/// Splits each need: ceil(quantity * split) at the short lead, the rest at the long lead.
ProcurementPlan mixed_horizon_plan(std::span<const ComponentNeed> need, Ppm split, int short_lead,
                                   int long_lead, PlanWindow window);

/// Per-component target: expected bom consumption over `horizon_days` days.
std::vector<std::int64_t> component_targets(const DemandForecast& forecast, int horizon_days,
                                            const Catalog& catalog);

/// Orders max(0, target - position) per component at today + short_lead.
ProcurementPlan threshold_plan(const DemandForecast& forecast, const ComponentPosition& inventory,
                               int horizon_days, const Catalog& catalog, int short_lead,
                               PlanWindow window);

/// Orders exactly the bom shortfall of newly won orders, due production_lead
/// days before each order's due day.
ProcurementPlan jit_plan(std::span<const CustomerOrder> newly_won, const ComponentPosition& inventory,
                         const Catalog& catalog, int production_lead, PlanWindow window);

/// Exponentially smoothed (promised - requested) lateness per supplier.
class LatenessTracker {
 public:
  explicit LatenessTracker(double alpha = 0.3) : alpha_(alpha) {}
  void observe(SupplierId supplier, int lateness_days);
  void seed(SupplierId supplier, double mean) { mean_[supplier] = mean; }
  double mean(SupplierId supplier) const;
  bool operator==(const LatenessTracker&) const = default;

 private:
  double alpha_;
  std::map<SupplierId, double> mean_;
};

/// Moves each line's due day earlier by ceil(mean lateness of its supplier),
/// never before tomorrow.
ProcurementPlan delay_risk_adjust(ProcurementPlan plan, const LatenessTracker& lateness,
                                  PlanWindow window);

/// Meta-strategy hook: switches mixed_horizon to jit once trailing storage
/// cost exceeds the configured fraction of trailing revenue.
ProcurementStrategyKind meta_select(ProcurementStrategyKind current, Money trailing_storage,
                                    Money trailing_revenue, const ProcurementParams& params);

}  // namespace scm
