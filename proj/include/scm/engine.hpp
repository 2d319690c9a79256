#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "scm/config.hpp"
#include "scm/events.hpp"
#include "scm/market.hpp"
#include "scm/rng.hpp"

namespace scm {

struct ProductionLine {
  ProductId product{};
  int units = 0;
  bool operator==(const ProductionLine&) const = default;
};

struct AgentCounters {
  std::int64_t bids = 0;
  std::int64_t won = 0;
  std::int64_t delivered = 0;
  std::int64_t late = 0;
  std::int64_t cancelled = 0;
  std::int64_t cycles_used = 0;
  std::int64_t components_received = 0;
  std::int64_t components_consumed = 0;
  std::int64_t units_assembled = 0;
  std::int64_t units_delivered = 0;
  bool operator==(const AgentCounters&) const = default;
};

/// Everything the engine holds for one competitor. Agents get read-only access
/// to their own state only.
struct AgentState {
  AgentId id{};
  std::vector<std::int64_t> components;
  std::vector<std::int64_t> finished;
  BankLedger bank;
  /// Won customer orders not yet delivered or cancelled.
  std::vector<CustomerOrder> orders;
  /// Accepted supply orders not yet delivered.
  std::vector<SupplyOrder> inbound;
  /// Production actually executed, by day.
  std::map<Day, std::vector<ProductionLine>> factory_schedule;
  AgentCounters counters;

  std::int64_t inventory_units() const;
};

/// A supply RFQ as an agent submits it; the engine assigns the id.
struct SupplyRequest {
  SupplierId supplier{};
  ComponentId component{};
  int quantity = 0;
  Day requested_due_day = 0;
  bool operator==(const SupplyRequest&) const = default;
};

struct DailyDecision {
  std::vector<Bid> bids;
  std::vector<SupplyRequest> supply_rfqs;
  std::vector<SupplyRfqId> accept_offers;
  /// Executed in phase 6, all or nothing.
  std::vector<ProductionLine> production;
};

/// What one agent may see in phase 5: public information published before the
/// phase plus its own private messages. Never another agent's state.
struct AgentView {
  Day day = 0;
  Day horizon = 0;
  int daily_cycles = 0;
  AgentId self{};
  const Catalog* catalog = nullptr;
  std::span<const SupplierSpec> suppliers;
  std::span<const CustomerRfq> rfqs;
  std::span<const CustomerOrder> awards;
  std::span<const SupplyOffer> offers;
  std::span<const ComponentDelivery> arrivals;
  /// Yesterday's report, null on day 0.
  const MarketReport* last_report = nullptr;
  const AgentState* state = nullptr;
};

struct DispatchView {
  Day day = 0;
  AgentId self{};
  const Catalog* catalog = nullptr;
  const AgentState* state = nullptr;
};

/// Logs internal role-to-role messages of one company. Every message must
/// have the coordinator on one end.
class MessageBus {
 public:
  using Sink = std::function<void(EventKind, Endpoint, Endpoint, Payload)>;
  MessageBus(Day day, AgentId agent, Sink sink) : day_(day), agent_(agent), sink_(std::move(sink)) {}

  void post(Role from, Role to, EventKind kind, RoleNote note);

 private:
  Day day_;
  AgentId agent_;
  Sink sink_;
};

class Agent {
 public:
  virtual ~Agent() = default;
  /// Phase 5.
  virtual DailyDecision decide(const AgentView& view, MessageBus& bus) = 0;
  /// Phase 5, right after decide: customer orders to ship today, in order.
  /// Only stock on hand before today's factory run can go out; shipping
  /// happens in phase 7.
  virtual std::vector<OrderId> dispatch(const DispatchView& view, MessageBus& bus) = 0;
};

using AgentList = std::vector<std::unique_ptr<Agent>>;
using AgentFactory = std::function<AgentList(const GameConfig&)>;

struct AgentResult {
  AgentId agent{};
  Money balance;
  Money revenue;
  Money material;
  Money storage;
  Money penalty;
  Money interest;
  std::int64_t bids = 0;
  std::int64_t won = 0;
  std::int64_t delivered = 0;
  std::int64_t late = 0;
  std::int64_t cancelled = 0;
  std::int64_t cycles_used = 0;
  /// cycles_used / (daily_cycles x horizon_days)
  double utilization = 0.0;

  bool operator==(const AgentResult&) const = default;
};

struct GameResult {
  std::vector<AgentResult> agents;
  /// Best first: balance descending, then agent id ascending.
  std::vector<AgentId> ranking;

  bool operator==(const GameResult&) const = default;
};

std::vector<AgentId> rank_agents(std::span<const AgentResult> agents);

class Game {
 public:
  Game(GameConfig config, AgentList agents);

  /// Runs the next day. Throws InvariantViolation if any check fails.
  void tick();
  bool finished() const { return day_ >= config_.horizon_days; }
  void run();

  Day day() const { return day_; }
  const GameConfig& config() const { return config_; }
  const EventLog& log() const { return log_; }
  LogHeader header() const;
  const AgentState& agent(AgentId id) const { return states_.at(index_of(id)); }
  const std::vector<Supplier>& suppliers() const { return suppliers_; }
  GameResult result() const;

  /// Scenario hooks for constructed tests: hand an agent free components or a
  /// won order before the next tick. Both are logged from `scenario`.
  void grant_components(AgentId agent, ComponentId component, int quantity);
  OrderId grant_order(AgentId agent, ProductId product, int quantity, Day due_day, Money unit_price,
                      Money penalty_per_day = Money{0});

 private:
  void emit(EventKind kind, Endpoint from, Endpoint to, Payload payload);
  void post_bank(AgentState& s, TxKind kind, Money amount, std::int64_t reference);
  void reject(AgentId agent, std::string reason, std::int64_t reference);

  void phase_component_deliveries();
  void phase_supply_offers();
  void phase_awards();
  void phase_customer_rfqs();
  void phase_decisions();
  void phase_factory();
  void phase_customer_deliveries();
  void phase_bank();
  void phase_report();
  void check_invariants() const;

  GameConfig config_;
  AgentList agents_;
  std::vector<AgentState> states_;
  std::vector<Supplier> suppliers_;
  RngStream demand_rng_;
  EventLog log_;
  Day day_ = 0;

  std::int64_t next_rfq_id_ = 0;
  std::int64_t next_supply_rfq_id_ = 0;

  // Published and in-flight market state.
  std::vector<CustomerRfq> open_rfqs_;
  std::vector<Bid> open_bids_;
  std::vector<SupplyRfq> open_supply_rfqs_;
  std::vector<SupplyOffer> offers_;
  std::vector<std::vector<CustomerOrder>> awards_;
  std::vector<std::vector<ComponentDelivery>> arrivals_;
  std::vector<std::vector<ProductionLine>> planned_production_;
  std::vector<std::vector<OrderId>> planned_shipments_;
  std::optional<MarketReport> last_report_;
  std::vector<Award> cleared_today_;
  std::vector<ProductId> cleared_products_;
  std::vector<int> cycles_today_;
};

struct GameRun {
  GameResult result;
  LogHeader header;
  EventLog log;
};

GameRun run_game(const GameConfig& config, AgentList agents);

/// Rebuilds the result from the event stream alone. Throws ReplayDivergence
/// when a logged bank balance disagrees with the running sum.
GameResult tally(const EventLog& log, const GameConfig& config);

/// Checks, at every inventory snapshot, that cumulative received - consumed
/// equals component stock and assembled - delivered equals finished stock.
/// Returns the number of (agent, day) snapshots checked.
std::int64_t check_conservation(const EventLog& log, const Catalog& catalog, int num_agents);

/// Re-runs the game the log claims to record and compares it event by event.
/// The header's seed overrides config.seed. Throws ReplayDivergence naming the
/// first differing (or missing) event, ConfigError on a header mismatch.
GameResult replay(const LoadedLog& loaded, GameConfig config, const AgentFactory& make_agents);

}  // namespace scm
