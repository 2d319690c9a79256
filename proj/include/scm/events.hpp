#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "scm/market.hpp"
#include "scm/types.hpp"

namespace scm {

enum class EventKind {
  // messages
  customer_rfq,
  bid,
  order_award,
  supply_rfq,
  supply_offer,
  supply_order,
  component_delivery,
  product_delivery_request,
  production_request,
  schedule_update,
  report,
  // market events
  auction_result,
  production_run,
  product_delivery,
  order_cancelled,
  bank_transaction,
  inventory_snapshot,
  market_report,
  decision_rejected,
};

std::string_view to_string(EventKind kind);
EventKind event_kind_from(std::string_view name);

/// The six roles inside one company. `company` addresses the company as a
/// whole when the sender is external.
enum class Role { company, coordinator, sales, supply, inventory, production, delivery };
std::string_view to_string(Role role);

enum class Party { market, customers, bank, factory, scenario, supplier, agent };

/// Sender or receiver of an event, serialized as e.g. "market",
/// "supplier:3" or "agent:2/coordinator".
struct Endpoint {
  Party party = Party::market;
  std::int32_t id = 0;
  Role role = Role::company;

  static Endpoint market() { return {Party::market}; }
  static Endpoint customers() { return {Party::customers}; }
  static Endpoint bank() { return {Party::bank}; }
  static Endpoint factory() { return {Party::factory}; }
  static Endpoint scenario() { return {Party::scenario}; }
  static Endpoint supplier(SupplierId s) { return {Party::supplier, raw(s)}; }
  static Endpoint agent(AgentId a, Role r = Role::coordinator) { return {Party::agent, raw(a), r}; }

  bool is_role() const { return party == Party::agent && role != Role::company; }
  std::string str() const;
  static Endpoint parse(std::string_view text);
  bool operator==(const Endpoint&) const = default;
};

// ---------------------------------------------------------------------------
// Payloads. Every field is an integer or a string: the log holds no floats.

struct AuctionResult {
  RfqId rfq{};
  int bids = 0;
  /// -1 when nobody qualified.
  std::int32_t winner = -1;
  Money unit_price;
  bool operator==(const AuctionResult&) const = default;
};

struct ComponentDelivery {
  SupplyRfqId order{};
  ComponentId component{};
  int quantity = 0;
  Money unit_price;
  bool operator==(const ComponentDelivery&) const = default;
};

struct ProductionRun {
  ProductId product{};
  int units = 0;
  int cycles = 0;
  bool operator==(const ProductionRun&) const = default;
};

struct ProductDelivery {
  OrderId order{};
  ProductId product{};
  int quantity = 0;
  Money unit_price;
  int late_days = 0;
  bool operator==(const ProductDelivery&) const = default;
};

struct OrderCancelled {
  OrderId order{};
  bool operator==(const OrderCancelled&) const = default;
};

struct BankEntry {
  TxKind kind = TxKind::revenue;
  Money amount;
  Money balance;
  std::int64_t reference = 0;
  bool operator==(const BankEntry&) const = default;
};

/// End-of-day inventory as the engine holds it; the conservation checker
/// compares it against flows reconstructed from the other events.
struct InventorySnapshot {
  std::vector<std::int64_t> components;
  std::vector<std::int64_t> products;
  int cycles_used = 0;
  bool operator==(const InventorySnapshot&) const = default;
};

struct DecisionRejected {
  std::string reason;
  std::int64_t reference = 0;
  bool operator==(const DecisionRejected&) const = default;
};

/// Internal company protocol message (role to role).
struct RoleNote {
  std::string topic;
  std::int64_t reference = 0;
  std::map<std::string, std::int64_t> values;
  bool operator==(const RoleNote&) const = default;
};

using Payload = std::variant<CustomerRfq, Bid, CustomerOrder, AuctionResult, SupplyRfq,
                             SupplyOffer, SupplyOrder, ComponentDelivery, ProductionRun,
                             ProductDelivery, OrderCancelled, BankEntry, InventorySnapshot,
                             MarketReport, DecisionRejected, RoleNote>;

struct Event {
  std::int64_t seq = 0;
  Day day = 0;
  EventKind kind = EventKind::report;
  Endpoint from;
  Endpoint to;
  Payload payload;

  bool is_message() const { return kind <= EventKind::report; }
  bool operator==(const Event&) const = default;
};

using EventLog = std::vector<Event>;

/// One JSON object, keys in sorted order, integers only.
std::string to_json_line(const Event& event);
Event event_from_json_line(std::string_view line);

struct LogHeader {
  std::string format = "scm-arena-eventlog";
  int version = 1;
  std::uint64_t seed = 0;
  std::string config_hash;
  int horizon_days = 0;
  int num_agents = 0;
  bool operator==(const LogHeader&) const = default;
};

std::string to_json_line(const LogHeader& header);
LogHeader header_from_json_line(std::string_view line);

/// Header line followed by one event per line.
void write_event_log(std::ostream& out, const LogHeader& header, const EventLog& log);

struct LoadedLog {
  LogHeader header;
  /// Raw event lines, exactly as stored.
  std::vector<std::string> lines;
};
LoadedLog read_event_log(std::istream& in);
LoadedLog read_event_log_file(const std::string& path);
EventLog parse_events(const LoadedLog& loaded);

}  // namespace scm
