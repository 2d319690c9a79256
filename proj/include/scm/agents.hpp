#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "scm/config.hpp"
#include "scm/engine.hpp"
#include "scm/procurement.hpp"
#include "scm/sales.hpp"

namespace scm {

// ---------------------------------------------------------------------------
// Production scheduling

struct ScheduleOrder {
  OrderId id{};
  ProductId product{};
  int quantity = 0;
  /// Last day production may finish and still count as on time.
  Day due_day = 0;
  /// unit price - cost floor; breaks due-date ties (higher first).
  Money unit_margin;
};

struct ProgramEntry {
  Day day = 0;
  OrderId order{};
  ProductId product{};
  int units = 0;
  int cycles = 0;
  bool operator==(const ProgramEntry&) const = default;
};

struct ProductionProgram {
  std::map<Day, std::vector<ProgramEntry>> days;

  int cycles_on(Day day) const;
  int units_for(OrderId order) const;
  /// Day the last unit of `order` is produced; empty if nothing is scheduled.
  std::optional<Day> completion_day(OrderId order) const;
  /// Entries of one day merged per product, in product order.
  std::vector<ProductionLine> lines_on(Day day) const;
  void add(const ProgramEntry& entry);
  bool operator==(const ProductionProgram&) const = default;
};

/// Cycles and components the scheduler may plan against over [start, end).
struct FactoryResources {
  Day start = 0;
  Day end = 0;
  int daily_cycles = 2000;
  /// Components on hand for production on `start`.
  std::vector<std::int64_t> stock;
  /// Components arriving on a day, usable from that day on.
  std::map<Day, std::vector<std::int64_t>> arrivals;
  /// From this day on components are treated as unconstrained (optimistic
  /// feasibility: they can still be ordered in time).
  std::optional<Day> unlimited_from;
};

/// Greedy fill: orders by due day, then higher unit margin, then id; each
/// order takes the earliest days with free cycles and projected components,
/// splitting across days when needed. Orders that cannot finish by their due
/// day are set aside and fill the leftover room afterwards, in the same order.
/// Entries in `locked` keep their slots and are planned around. Unfillable
/// units stay unscheduled.
ProductionProgram production_manager_schedule(std::span<const ScheduleOrder> orders,
                                              const FactoryResources& resources,
                                              const Catalog& catalog,
                                              const ProductionProgram& locked = {});

// ---------------------------------------------------------------------------
// Delivery

/// Due-date order (ties by id); ships whole orders that finished stock covers.
/// `finished` is decremented by what ships.
std::vector<OrderId> delivery_manager_dispatch(std::span<const CustomerOrder> orders,
                                               std::vector<std::int64_t>& finished);

// ---------------------------------------------------------------------------
// Inventory

struct InventoryUpdate {
  std::vector<std::int64_t> thresholds;
  /// Components whose position sits below threshold.
  std::vector<ComponentId> alerts;
};

InventoryUpdate inventory_manager_update(const DemandForecast& forecast,
                                         const ComponentPosition& inventory, int horizon_days,
                                         const Catalog& catalog);

// ---------------------------------------------------------------------------
// Supply

/// Last quoted unit price per (supplier, component).
using QuoteHistory = std::map<std::pair<SupplierId, ComponentId>, Money>;

/// Picks the supplier with the lowest recent quote for each line (unquoted
/// suppliers count at base price; ties to the lower id), then pulls due days
/// forward by expected lateness. Throws ConfigError when no supplier makes a
/// needed component.
ProcurementPlan supply_manager_plan(ProcurementPlan need, std::span<const SupplierSpec> suppliers,
                                    const QuoteHistory& quotes, const LatenessTracker& lateness,
                                    const Catalog& catalog, PlanWindow window);

// ---------------------------------------------------------------------------
// The company

/// Outcome of one coordinator_attend_request pass.
struct AttendOutcome {
  std::optional<Bid> bid;
  bool feasible = false;
  std::optional<Day> completion_day;
};

/// One competitor: coordinator plus five managers. Roles talk only through the
/// coordinator; every exchange goes on the message bus.
class CompanyAgent : public Agent {
 public:
  CompanyAgent(AgentId id, AgentBinding binding, const Catalog& catalog);

  DailyDecision decide(const AgentView& view, MessageBus& bus) override;
  std::vector<OrderId> dispatch(const DispatchView& view, MessageBus& bus) override;

  ProcurementStrategyKind procurement_strategy() const { return procurement_; }
  const PredictorState& predictor() const { return predictor_; }
  const LatenessTracker& lateness() const { return lateness_; }
  const QuoteHistory& quotes() const { return quotes_; }

  /// The attendRequest flow for one rfq. `program` is the committed program
  /// (gains the candidate's entries on a bid); `resources` the optimistic
  /// feasibility view.
  AttendOutcome coordinator_attend_request(const CustomerRfq& rfq, const AgentView& view,
                                           ProductionProgram& program,
                                           const FactoryResources& resources, MessageBus& bus);

 private:
  DemandForecast forecast() const;
  ComponentPosition position(const AgentView& view, std::span<const SupplyOrder> accepted_today,
                             bool exclude_new_awards) const;
  std::vector<ScheduleOrder> open_production_needs(const AgentView& view) const;

  AgentId id_;
  AgentBinding binding_;
  Catalog catalog_;
  std::unique_ptr<SalesStrategy> sales_;
  ProcurementStrategyKind procurement_;
  PredictorState predictor_;
  LatenessTracker lateness_;
  QuoteHistory quotes_;
  std::map<RfqId, OwnOutcome> open_bids_;
  /// Won units per product for each of the last forecast_window_days days.
  std::deque<std::vector<std::int64_t>> won_history_;
};

AgentList make_company_agents(const GameConfig& config);

/// run_game / replay with CompanyAgents built from the config's bindings.
GameRun run_game(const GameConfig& config);
GameResult replay(const LoadedLog& loaded, const GameConfig& config);

}  // namespace scm
