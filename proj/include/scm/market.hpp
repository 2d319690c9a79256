#pragma once

#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "scm/domain.hpp"
#include "scm/rng.hpp"
#include "scm/types.hpp"

namespace scm {

// ---------------------------------------------------------------------------
// Demand side

struct CustomerRfq {
  RfqId id{};
  ProductId product{};
  int quantity = 1;
  Day issue_day = 0;
  Day due_day = 1;
  /// Highest unit price the customer accepts.
  Money reserve_unit_price;
  Money penalty_per_day;
  int cancel_after_days = 1;

  bool operator==(const CustomerRfq&) const = default;
};

struct Bid {
  RfqId rfq{};
  AgentId agent{};
  Money unit_price;

  bool operator==(const Bid&) const = default;
};

struct Award {
  AgentId winner{};
  Money unit_price;

  bool operator==(const Award&) const = default;
};

enum class OrderStatus { pending, delivered, late, cancelled };
std::string_view to_string(OrderStatus status);

struct CustomerOrder {
  OrderId id{};
  RfqId rfq{};
  AgentId winner{};
  ProductId product{};
  int quantity = 0;
  Day due_day = 0;
  Money unit_price;
  Money penalty_per_day;
  int cancel_after_days = 1;
  OrderStatus status = OrderStatus::pending;
  /// Days of late penalty charged so far.
  int penalty_days = 0;

  bool operator==(const CustomerOrder&) const = default;
};

struct ProductPriceStats {
  ProductId product{};
  int count = 0;
  Money min;
  Money max;
  /// Floor of the arithmetic mean; the log never carries floats.
  Money mean;

  bool operator==(const ProductPriceStats&) const = default;
};

/// Daily aggregate of winning prices: the only view agents get of rival prices.
struct MarketReport {
  Day day = 0;
  std::vector<ProductPriceStats> products;

  const ProductPriceStats* find(ProductId product) const;
  bool operator==(const MarketReport&) const = default;
};

template <typename T>
struct Range {
  T lo{};
  T hi{};
  bool operator==(const Range&) const = default;
};

struct DemandConfig {
  double lambda = 20.0;
  Range<int> quantity{1, 20};
  Range<int> lead_days{3, 12};
  Range<Ppm> reserve_multiplier{Ppm{1'000'000}, Ppm{1'600'000}};
  /// Relative product weights; empty means uniform.
  std::vector<std::int64_t> product_weights;
  Ppm penalty_rate{50'000};
  int cancel_after_days = 5;

  bool operator==(const DemandConfig&) const = default;
};

/// Draws the day's customer RFQs, consuming only `rng`. Ids start at `first_id`.
std::vector<CustomerRfq> generate_customer_rfqs(Day day, const DemandConfig& config,
                                                const Catalog& catalog, RngStream& rng,
                                                RfqId first_id);

/// First-price sealed-bid reverse auction: lowest qualifying bid wins, ties go
/// to the lowest agent id. Throws MarketError for foreign or duplicate bids.
std::optional<Award> clear_auction(const CustomerRfq& rfq, std::span<const Bid> bids);

// ---------------------------------------------------------------------------
// Supply side

struct SupplyRfq {
  SupplyRfqId id{};
  AgentId agent{};
  SupplierId supplier{};
  ComponentId component{};
  int quantity = 0;
  Day requested_due_day = 0;

  bool operator==(const SupplyRfq&) const = default;
};

struct SupplyOffer {
  SupplyRfqId rfq{};
  AgentId agent{};
  SupplierId supplier{};
  ComponentId component{};
  int quantity = 0;
  Money unit_price;
  Day requested_due_day = 0;
  Day promised_due_day = 0;

  bool operator==(const SupplyOffer&) const = default;
};

/// An accepted offer. Payment happens on delivery.
struct SupplyOrder {
  SupplyRfqId offer{};
  AgentId agent{};
  SupplierId supplier{};
  ComponentId component{};
  int quantity = 0;
  Money unit_price;
  Day due_day = 0;

  bool operator==(const SupplyOrder&) const = default;
};

struct SupplierSpec {
  SupplierId id{};
  std::vector<ComponentId> components;
  int daily_capacity = 1;

  bool operator==(const SupplierSpec&) const = default;
};

class Supplier {
 public:
  explicit Supplier(SupplierSpec spec);

  SupplierId id() const { return spec_.id; }
  const SupplierSpec& spec() const { return spec_; }
  int daily_capacity() const { return spec_.daily_capacity; }
  bool produces(ComponentId component) const;

  int committed_on(Day day) const;
  int free_on(Day day) const { return daily_capacity() - committed_on(day); }
  /// Adds (or with a negative count, releases) commitment on a day.
  void commit(Day day, int units);
  const std::map<Day, int>& commitments() const { return committed_; }

 private:
  SupplierSpec spec_;
  std::map<Day, int> committed_;
};

/// Eight suppliers: one per cpu family, two each for motherboards, memory and disks.
std::vector<SupplierSpec> default_suppliers(const Catalog& catalog, int daily_capacity);

/// base_price * (1 - discount * free_ratio) over the window (today, requested_due_day].
Money quote_supply_price(const ComponentSku& component, const Supplier& supplier,
                         Day requested_due_day, Day today, Ppm discount);

struct CapacityRequest {
  std::int64_t id = 0;
  int quantity = 0;
  Day requested_due_day = 0;
};

struct CapacityPromise {
  std::int64_t id = 0;
  /// Truncated to the supplier's daily capacity.
  int quantity = 0;
  Day promised_due_day = 0;

  bool operator==(const CapacityPromise&) const = default;
};

/// Commits capacity earliest-requested-first (ties by id). Each request is
/// delivered whole on one day: the requested day when it fits, otherwise the
/// earliest later day that does. Returned in request order.
std::vector<CapacityPromise> allocate_supplier_capacity(Supplier& supplier,
                                                        std::span<const CapacityRequest> requests);

// ---------------------------------------------------------------------------
// Bank

enum class TxKind { revenue, material, storage, penalty, interest };
std::string_view to_string(TxKind kind);
TxKind tx_kind_from(std::string_view name);

struct Transaction {
  Day day = 0;
  TxKind kind = TxKind::revenue;
  /// Signed: revenue positive, every cost negative.
  Money amount;
  std::int64_t reference = 0;

  bool operator==(const Transaction&) const = default;
};

struct BankConfig {
  /// Charge per unit held per day.
  Money holding_rate{1};
  Ppm debt_rate{500};

  bool operator==(const BankConfig&) const = default;
};

class BankLedger {
 public:
  BankLedger() = default;
  explicit BankLedger(AgentId agent) : agent_(agent) {}

  AgentId agent() const { return agent_; }
  Money balance() const { return balance_; }
  const std::vector<Transaction>& transactions() const { return transactions_; }
  std::optional<Day> last_daily_day() const { return last_daily_day_; }

  const Transaction& post(Day day, TxKind kind, Money amount, std::int64_t reference = 0);
  void mark_daily(Day day) { last_daily_day_ = day; }

  /// Sum of |amount| over one category.
  Money total(TxKind kind) const;

  bool operator==(const BankLedger&) const = default;

 private:
  AgentId agent_{};
  Money balance_;
  std::vector<Transaction> transactions_;
  std::optional<Day> last_daily_day_;
};

/// Storage charge on `inventory_units` plus interest on a negative balance.
/// Both transactions are always appended, possibly with zero amounts. Throws
/// MarketError when called twice for the same day.
BankLedger bank_apply_daily(BankLedger ledger, Day day, const BankConfig& config,
                            std::int64_t inventory_units);

}  // namespace scm
