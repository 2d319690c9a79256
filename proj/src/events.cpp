#include "scm/events.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "scm/errors.hpp"

namespace scm {

using nlohmann::json;

void to_json(json& j, const Money& m) { j = m.amount; }
void from_json(const json& j, Money& m) { m.amount = j.get<std::int64_t>(); }

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CustomerRfq, id, product, quantity, issue_day, due_day,
                                   reserve_unit_price, penalty_per_day, cancel_after_days)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Bid, rfq, agent, unit_price)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AuctionResult, rfq, bids, winner, unit_price)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SupplyRfq, id, agent, supplier, component, quantity,
                                   requested_due_day)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SupplyOffer, rfq, agent, supplier, component, quantity,
                                   unit_price, requested_due_day, promised_due_day)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SupplyOrder, offer, agent, supplier, component, quantity,
                                   unit_price, due_day)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ComponentDelivery, order, component, quantity, unit_price)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ProductionRun, product, units, cycles)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ProductDelivery, order, product, quantity, unit_price,
                                   late_days)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(OrderCancelled, order)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(InventorySnapshot, components, products, cycles_used)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ProductPriceStats, product, count, min, max, mean)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MarketReport, day, products)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DecisionRejected, reason, reference)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RoleNote, topic, reference, values)

void to_json(json& j, const CustomerOrder& o) {
  j = json{{"id", o.id},
           {"rfq", o.rfq},
           {"winner", o.winner},
           {"product", o.product},
           {"quantity", o.quantity},
           {"due_day", o.due_day},
           {"unit_price", o.unit_price},
           {"penalty_per_day", o.penalty_per_day},
           {"cancel_after_days", o.cancel_after_days}};
}

void from_json(const json& j, CustomerOrder& o) {
  j.at("id").get_to(o.id);
  j.at("rfq").get_to(o.rfq);
  j.at("winner").get_to(o.winner);
  j.at("product").get_to(o.product);
  j.at("quantity").get_to(o.quantity);
  j.at("due_day").get_to(o.due_day);
  j.at("unit_price").get_to(o.unit_price);
  j.at("penalty_per_day").get_to(o.penalty_per_day);
  j.at("cancel_after_days").get_to(o.cancel_after_days);
}

void to_json(json& j, const BankEntry& e) {
  j = json{{"kind", to_string(e.kind)},
           {"amount", e.amount},
           {"balance", e.balance},
           {"reference", e.reference}};
}

void from_json(const json& j, BankEntry& e) {
  e.kind = tx_kind_from(j.at("kind").get<std::string>());
  j.at("amount").get_to(e.amount);
  j.at("balance").get_to(e.balance);
  j.at("reference").get_to(e.reference);
}

namespace {

constexpr std::array<std::string_view, std::variant_size_v<Payload>> kPayloadNames{
    "customer_rfq",   "bid",           "customer_order",     "auction_result",
    "supply_rfq",     "supply_offer",  "supply_order",       "component_delivery",
    "production_run", "product_delivery", "order_cancelled", "bank_entry",
    "inventory_snapshot", "market_report", "decision_rejected", "role_note"};

constexpr std::array<std::string_view, 19> kEventKindNames{
    "customer_rfq",     "bid",          "order_award",       "supply_rfq",
    "supply_offer",     "supply_order", "component_delivery", "product_delivery_request",
    "production_request", "schedule_update", "report",        "auction_result",
    "production_run",   "product_delivery", "order_cancelled", "bank_transaction",
    "inventory_snapshot", "market_report", "decision_rejected"};

template <std::size_t I = 0>
Payload payload_from(std::size_t index, const json& j) {
  if constexpr (I < std::variant_size_v<Payload>) {
    if (index == I) return Payload{std::in_place_index<I>, j.get<std::variant_alternative_t<I, Payload>>()};
    return payload_from<I + 1>(index, j);
  } else {
    throw Error("unknown payload index");
  }
}

std::string_view party_name(Party p) {
  switch (p) {
    case Party::market: return "market";
    case Party::customers: return "customers";
    case Party::bank: return "bank";
    case Party::factory: return "factory";
    case Party::scenario: return "scenario";
    case Party::supplier: return "supplier";
    case Party::agent: return "agent";
  }
  return "?";
}

std::int32_t parse_int(std::string_view text) {
  std::int32_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error("bad endpoint id '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::string_view to_string(EventKind kind) { return kEventKindNames[static_cast<std::size_t>(kind)]; }

EventKind event_kind_from(std::string_view name) {
  for (std::size_t i = 0; i < kEventKindNames.size(); ++i) {
    if (kEventKindNames[i] == name) return static_cast<EventKind>(i);
  }
  throw Error("unknown event kind '" + std::string(name) + "'");
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::company: return "company";
    case Role::coordinator: return "coordinator";
    case Role::sales: return "sales_manager";
    case Role::supply: return "supply_manager";
    case Role::inventory: return "inventory_manager";
    case Role::production: return "production_manager";
    case Role::delivery: return "delivery_manager";
  }
  return "?";
}

std::string Endpoint::str() const {
  std::string out(party_name(party));
  if (party == Party::supplier || party == Party::agent) out += ":" + std::to_string(id);
  if (party == Party::agent && role != Role::company) {
    out += "/";
    out += to_string(role);
  }
  return out;
}

Endpoint Endpoint::parse(std::string_view text) {
  Endpoint e;
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  bool found = false;
  for (auto p : {Party::market, Party::customers, Party::bank, Party::factory, Party::scenario,
                 Party::supplier, Party::agent}) {
    if (party_name(p) == head) {
      e.party = p;
      found = true;
    }
  }
  if (!found) throw Error("bad endpoint '" + std::string(text) + "'");
  if (colon == std::string_view::npos) return e;

  std::string_view rest = text.substr(colon + 1);
  const auto slash = rest.find('/');
  e.id = parse_int(rest.substr(0, slash));
  if (slash != std::string_view::npos) {
    const std::string_view role = rest.substr(slash + 1);
    found = false;
    for (auto r : {Role::company, Role::coordinator, Role::sales, Role::supply, Role::inventory,
                   Role::production, Role::delivery}) {
      if (to_string(r) == role) {
        e.role = r;
        found = true;
      }
    }
    if (!found) throw Error("bad endpoint role '" + std::string(role) + "'");
  }
  return e;
}

std::string to_json_line(const Event& event) {
  json j;
  j["seq"] = event.seq;
  j["day"] = event.day;
  j["kind"] = to_string(event.kind);
  j["from"] = event.from.str();
  j["to"] = event.to.str();
  j["type"] = kPayloadNames[event.payload.index()];
  std::visit([&](const auto& p) { j["data"] = p; }, event.payload);
  return j.dump();
}

Event event_from_json_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    Event e;
    e.seq = j.at("seq").get<std::int64_t>();
    e.day = j.at("day").get<Day>();
    e.kind = event_kind_from(j.at("kind").get<std::string>());
    e.from = Endpoint::parse(j.at("from").get<std::string>());
    e.to = Endpoint::parse(j.at("to").get<std::string>());
    const auto type = j.at("type").get<std::string>();
    std::size_t index = kPayloadNames.size();
    for (std::size_t i = 0; i < kPayloadNames.size(); ++i) {
      if (kPayloadNames[i] == type) index = i;
    }
    if (index == kPayloadNames.size()) throw Error("unknown payload type '" + type + "'");
    e.payload = payload_from(index, j.at("data"));
    return e;
  } catch (const json::exception& ex) {
    throw Error(std::string("malformed event line: ") + ex.what());
  }
}

std::string to_json_line(const LogHeader& header) {
  json j{{"format", header.format},
         {"version", header.version},
         {"seed", header.seed},
         {"config_hash", header.config_hash},
         {"horizon_days", header.horizon_days},
         {"num_agents", header.num_agents}};
  return j.dump();
}

LogHeader header_from_json_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    LogHeader h;
    h.format = j.at("format").get<std::string>();
    if (h.format != LogHeader{}.format) throw Error("not an scm-arena event log");
    h.version = j.at("version").get<int>();
    h.seed = j.at("seed").get<std::uint64_t>();
    h.config_hash = j.at("config_hash").get<std::string>();
    h.horizon_days = j.at("horizon_days").get<int>();
    h.num_agents = j.at("num_agents").get<int>();
    return h;
  } catch (const json::exception& ex) {
    throw Error(std::string("malformed log header: ") + ex.what());
  }
}

void write_event_log(std::ostream& out, const LogHeader& header, const EventLog& log) {
  out << to_json_line(header) << '\n';
  for (const auto& e : log) out << to_json_line(e) << '\n';
}

LoadedLog read_event_log(std::istream& in) {
  LoadedLog loaded;
  std::string line;
  if (!std::getline(in, line)) throw Error("event log is empty (missing header)");
  loaded.header = header_from_json_line(line);
  while (std::getline(in, line)) {
    if (!line.empty()) loaded.lines.push_back(line);
  }
  return loaded;
}

LoadedLog read_event_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open event log '" + path + "'");
  return read_event_log(in);
}

EventLog parse_events(const LoadedLog& loaded) {
  EventLog log;
  log.reserve(loaded.lines.size());
  for (std::size_t i = 0; i < loaded.lines.size(); ++i) {
    try {
      log.push_back(event_from_json_line(loaded.lines[i]));
    } catch (const Error& e) {
      throw ReplayDivergence(i, e.what());
    }
  }
  return log;
}

}  // namespace scm
