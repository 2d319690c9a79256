#include "scm/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "scm/errors.hpp"
#include "scm/rng.hpp"

namespace scm {

using nlohmann::json;

namespace {

const json* find(const json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (const json* v = find(j, key)) out = v->get<T>();
}

void read_money(const json& j, const char* key, Money& out) {
  if (const json* v = find(j, key)) out = Money{v->get<std::int64_t>()};
}

void read_rate(const json& j, const char* key, Ppm& out) {
  if (const json* v = find(j, key)) out = Ppm::from_double(v->get<double>());
}

template <typename T>
void read_range(const json& j, const char* key, Range<T>& out) {
  if (const json* v = find(j, key)) {
    if (!v->is_array() || v->size() != 2) {
      throw ConfigError(std::string("'") + key + "' must be a [lo, hi] pair");
    }
    out = Range<T>{(*v)[0].get<T>(), (*v)[1].get<T>()};
  }
}

void read_rate_range(const json& j, const char* key, Range<Ppm>& out) {
  if (const json* v = find(j, key)) {
    if (!v->is_array() || v->size() != 2) {
      throw ConfigError(std::string("'") + key + "' must be a [lo, hi] pair");
    }
    out = Range<Ppm>{Ppm::from_double((*v)[0].get<double>()), Ppm::from_double((*v)[1].get<double>())};
  }
}

const json kEmpty = json::object();

const json& section(const json& j, const char* key) {
  const json* v = find(j, key);
  return v ? *v : kEmpty;
}

void require(bool ok, const std::string& invariant) {
  if (!ok) throw ConfigError("invalid config: " + invariant);
}

void validate_sales(const SalesParams& s, const std::string& who) {
  require(s.interval_bin_width.amount >= 1, who + "sales.interval.bin_width >= 1");
  require(s.regression_window_days >= 1, who + "sales.regression.window_days >= 1");
  require(s.regression_epsilon >= 0.0 && s.regression_epsilon < 1.0,
          who + "sales.regression.epsilon in [0, 1)");
  require(s.minmax_alpha > 0.0 && s.minmax_alpha <= 1.0, who + "sales.minmax.alpha in (0, 1]");
  require(s.undercut_window_days >= 1, who + "sales.undercut.window_days >= 1");
  require(s.undercut_step.amount >= 0, who + "sales.undercut.step >= 0");
  require(s.fixed_price.amount >= 0, who + "sales.fixed.price >= 0");
}

void validate_procurement(const ProcurementParams& p, const std::string& who) {
  require(p.mixed_split.value <= Ppm::one, who + "procurement.mixed.split in [0, 1]");
  require(p.mixed_short_lead >= 1, who + "procurement.mixed.short_lead >= 1");
  require(p.mixed_short_lead < p.mixed_long_lead,
          who + "procurement.mixed.short_lead < procurement.mixed.long_lead");
  require(p.threshold_horizon_days >= 1, who + "procurement.threshold.horizon_days >= 1");
  require(p.jit_production_lead >= 0, who + "procurement.jit.production_lead >= 0");
  require(p.lateness_alpha > 0.0 && p.lateness_alpha <= 1.0,
          who + "procurement.lateness_alpha in (0, 1]");
  require(p.forecast_window_days >= 1, who + "procurement.forecast_window_days >= 1");
}

}  // namespace

SalesParams sales_params_from_json(const json& j, SalesParams s) {
  const json& interval = section(j, "interval");
  read_money(interval, "bin_width", s.interval_bin_width);
  if (const json* v = find(interval, "objective")) {
    const auto name = v->get<std::string>();
    if (name == "expected_margin") {
      s.interval_objective = IntervalObjective::expected_margin;
    } else if (name == "mode") {
      s.interval_objective = IntervalObjective::mode;
    } else {
      throw ConfigError("unknown sales.interval.objective '" + name + "'");
    }
  }
  read(section(j, "regression"), "window_days", s.regression_window_days);
  read(section(j, "regression"), "epsilon", s.regression_epsilon);
  read(section(j, "minmax"), "alpha", s.minmax_alpha);
  read(section(j, "undercut"), "window_days", s.undercut_window_days);
  read_money(section(j, "undercut"), "step", s.undercut_step);
  read_rate(j, "margin_floor", s.margin_floor);
  read_rate(j, "default_markup", s.default_markup);
  read_money(section(j, "fixed"), "price", s.fixed_price);
  return s;
}

ProcurementParams procurement_params_from_json(const json& j, ProcurementParams p) {
  const json& mixed = section(j, "mixed");
  read_rate(mixed, "split", p.mixed_split);
  read(mixed, "short_lead", p.mixed_short_lead);
  read(mixed, "long_lead", p.mixed_long_lead);
  read(section(j, "threshold"), "horizon_days", p.threshold_horizon_days);
  read(section(j, "jit"), "production_lead", p.jit_production_lead);
  read(j, "lateness_alpha", p.lateness_alpha);
  read(section(j, "meta"), "enabled", p.meta_enabled);
  read_rate(section(j, "meta"), "storage_fraction", p.meta_storage_fraction);
  read(j, "forecast_window_days", p.forecast_window_days);
  return p;
}

AgentBinding agent_binding_from_json(const json& j, const AgentBinding& base) {
  AgentBinding b = base;
  if (const json* v = find(j, "sales_strategy")) b.sales_strategy = sales_strategy_from(v->get<std::string>());
  if (const json* v = find(j, "procurement_strategy")) {
    b.procurement_strategy = procurement_strategy_from(v->get<std::string>());
  }
  b.sales = sales_params_from_json(section(j, "sales"), base.sales);
  b.procurement = procurement_params_from_json(section(j, "procurement"), base.procurement);
  read(section(j, "inventory"), "horizon_days", b.inventory_horizon_days);
  return b;
}

std::vector<SupplierSpec> GameConfig::supplier_specs() const {
  if (!market.suppliers.empty()) return market.suppliers;
  return default_suppliers(catalog, market.supplier_capacity);
}

void GameConfig::validate() const {
  require(num_agents >= 2, "num_agents >= 2");
  require(horizon_days >= 0, "horizon_days >= 0");
  require(daily_cycles >= catalog.max_cycles(), "daily_cycles >= max product cycles");
  require(static_cast<int>(agents.size()) == num_agents,
          "agents[] must list exactly num_agents bindings");

  const auto& d = market.demand;
  require(std::isfinite(d.lambda) && d.lambda >= 0.0, "market.demand.lambda >= 0");
  require(d.quantity.lo >= 1 && d.quantity.lo <= d.quantity.hi,
          "market.demand.quantity is a range with lo >= 1");
  require(d.lead_days.lo >= 1 && d.lead_days.lo <= d.lead_days.hi,
          "market.demand.lead_days is a range with lo >= 1 (due_day > issue_day)");
  require(d.reserve_multiplier.lo.value > 0 && d.reserve_multiplier.lo <= d.reserve_multiplier.hi,
          "market.demand.reserve_multiplier is a positive range");
  if (!d.product_weights.empty()) {
    require(d.product_weights.size() == catalog.product_count(),
            "market.demand.product_weights has one weight per product");
    std::int64_t total = 0;
    for (auto w : d.product_weights) {
      require(w >= 0, "market.demand.product_weights are non-negative");
      total += w;
    }
    require(total > 0, "market.demand.product_weights sum to a positive value");
  }
  require(d.cancel_after_days >= 1, "market.penalty.cancel_after_days >= 1");
  require(market.supplier_capacity >= 1, "market.supplier.capacity >= 1");
  require(market.discount_delta.value <= Ppm::one, "market.supplier.discount_delta in [0, 1]");
  require(market.bank.holding_rate.amount >= 0, "market.storage.holding_rate >= 0");

  std::set<SupplierId> ids;
  const auto specs = supplier_specs();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    require(index_of(s.id) == i, "supplier ids are dense from 0 in order");
    require(s.daily_capacity >= 1, "supplier capacity >= 1");
    for (auto c : s.components) {
      require(raw(c) >= 0 && index_of(c) < catalog.component_count(),
              "supplier components exist in the catalog");
    }
  }

  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string who = "agents[" + std::to_string(i) + "].";
    validate_sales(agents[i].sales, who);
    validate_procurement(agents[i].procurement, who);
    require(agents[i].inventory_horizon_days >= 1, who + "inventory.horizon_days >= 1");
  }
}

std::vector<AgentBinding> default_lineup(int num_agents) {
  const std::vector<std::pair<SalesStrategyKind, ProcurementStrategyKind>> base{
      {SalesStrategyKind::interval, ProcurementStrategyKind::mixed_horizon},
      {SalesStrategyKind::regression, ProcurementStrategyKind::threshold},
      {SalesStrategyKind::minmax, ProcurementStrategyKind::jit},
      {SalesStrategyKind::undercut, ProcurementStrategyKind::mixed_horizon},
      {SalesStrategyKind::interval, ProcurementStrategyKind::jit},
      {SalesStrategyKind::undercut, ProcurementStrategyKind::threshold},
  };
  std::vector<AgentBinding> out;
  for (int i = 0; i < num_agents; ++i) {
    AgentBinding b;
    b.sales_strategy = base[static_cast<std::size_t>(i) % base.size()].first;
    b.procurement_strategy = base[static_cast<std::size_t>(i) % base.size()].second;
    out.push_back(b);
  }
  return out;
}

GameConfig default_game_config() {
  GameConfig c;
  c.agents = default_lineup(c.num_agents);
  return c;
}

GameConfig config_from_json(const json& doc, const std::string& base_dir) {
  try {
    GameConfig c;
    read(doc, "seed", c.seed);
    read(doc, "horizon_days", c.horizon_days);
    read(doc, "num_agents", c.num_agents);
    read(doc, "daily_cycles", c.daily_cycles);

    if (const json* cat = find(doc, "catalog")) {
      if (cat->is_string()) {
        std::filesystem::path path = cat->get<std::string>();
        if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open catalog file '" + path.string() + "'");
        c.catalog = catalog_from_json(json::parse(in));
        c.catalog_path = cat->get<std::string>();
      } else if (cat->is_object()) {
        c.catalog = catalog_from_json(*cat);
      }
    }

    const json& market = section(doc, "market");
    auto& d = c.market.demand;
    const json& demand = section(market, "demand");
    read(demand, "lambda", d.lambda);
    read_range(demand, "quantity", d.quantity);
    read_range(demand, "lead_days", d.lead_days);
    read_rate_range(demand, "reserve_multiplier", d.reserve_multiplier);
    read(demand, "product_weights", d.product_weights);
    read_rate(section(market, "penalty"), "rate", d.penalty_rate);
    read(section(market, "penalty"), "cancel_after_days", d.cancel_after_days);
    const json& supplier = section(market, "supplier");
    read(supplier, "capacity", c.market.supplier_capacity);
    read_rate(supplier, "discount_delta", c.market.discount_delta);
    if (const json* list = find(supplier, "suppliers")) {
      for (const auto& s : *list) {
        SupplierSpec spec;
        spec.id = SupplierId{s.at("id").get<std::int32_t>()};
        for (const auto& comp : s.at("components")) spec.components.push_back(ComponentId{comp.get<std::int32_t>()});
        spec.daily_capacity = s.value("capacity", c.market.supplier_capacity);
        c.market.suppliers.push_back(std::move(spec));
      }
    }
    read_rate(section(market, "bank"), "debt_rate", c.market.bank.debt_rate);
    read_money(section(market, "storage"), "holding_rate", c.market.bank.holding_rate);

    AgentBinding defaults;
    defaults.sales = sales_params_from_json(section(doc, "sales"));
    defaults.procurement = procurement_params_from_json(section(doc, "procurement"));
    read(section(doc, "inventory"), "horizon_days", defaults.inventory_horizon_days);

    if (const json* agents = find(doc, "agents")) {
      for (const auto& a : *agents) c.agents.push_back(agent_binding_from_json(a, defaults));
    } else {
      c.agents = default_lineup(c.num_agents);
      for (auto& b : c.agents) {
        b.sales = defaults.sales;
        b.procurement = defaults.procurement;
        b.inventory_horizon_days = defaults.inventory_horizon_days;
      }
    }

    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

GameConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc, std::filesystem::path(path).parent_path().string());
}

namespace {

json sales_to_json(const SalesParams& s) {
  return json{
      {"interval",
       {{"bin_width", s.interval_bin_width.amount},
        {"objective", s.interval_objective == IntervalObjective::mode ? "mode" : "expected_margin"}}},
      {"regression", {{"window_days", s.regression_window_days}, {"epsilon", s.regression_epsilon}}},
      {"minmax", {{"alpha", s.minmax_alpha}}},
      {"undercut", {{"window_days", s.undercut_window_days}, {"step", s.undercut_step.amount}}},
      {"margin_floor", s.margin_floor.to_double()},
      {"default_markup", s.default_markup.to_double()},
      {"fixed", {{"price", s.fixed_price.amount}}}};
}

json procurement_to_json(const ProcurementParams& p) {
  return json{{"mixed",
               {{"split", p.mixed_split.to_double()},
                {"short_lead", p.mixed_short_lead},
                {"long_lead", p.mixed_long_lead}}},
              {"threshold", {{"horizon_days", p.threshold_horizon_days}}},
              {"jit", {{"production_lead", p.jit_production_lead}}},
              {"lateness_alpha", p.lateness_alpha},
              {"meta", {{"enabled", p.meta_enabled}, {"storage_fraction", p.meta_storage_fraction.to_double()}}},
              {"forecast_window_days", p.forecast_window_days}};
}

}  // namespace

json agent_binding_to_json(const AgentBinding& a) {
  return json{{"sales_strategy", to_string(a.sales_strategy)},
              {"procurement_strategy", to_string(a.procurement_strategy)},
              {"sales", sales_to_json(a.sales)},
              {"procurement", procurement_to_json(a.procurement)},
              {"inventory", {{"horizon_days", a.inventory_horizon_days}}}};
}

json config_to_json(const GameConfig& c) {
  const auto& d = c.market.demand;
  json suppliers = json::array();
  for (const auto& s : c.market.suppliers) {
    json comps = json::array();
    for (auto comp : s.components) comps.push_back(raw(comp));
    suppliers.push_back({{"id", raw(s.id)}, {"components", comps}, {"capacity", s.daily_capacity}});
  }
  json market{
      {"demand",
       {{"lambda", d.lambda},
        {"quantity", {d.quantity.lo, d.quantity.hi}},
        {"lead_days", {d.lead_days.lo, d.lead_days.hi}},
        {"reserve_multiplier", {d.reserve_multiplier.lo.to_double(), d.reserve_multiplier.hi.to_double()}},
        {"product_weights", d.product_weights}}},
      {"penalty", {{"rate", d.penalty_rate.to_double()}, {"cancel_after_days", d.cancel_after_days}}},
      {"supplier",
       {{"capacity", c.market.supplier_capacity},
        {"discount_delta", c.market.discount_delta.to_double()},
        {"suppliers", suppliers}}},
      {"bank", {{"debt_rate", c.market.bank.debt_rate.to_double()}}},
      {"storage", {{"holding_rate", c.market.bank.holding_rate.amount}}}};

  json agents = json::array();
  for (const auto& a : c.agents) agents.push_back(agent_binding_to_json(a));

  return json{{"seed", c.seed},
              {"horizon_days", c.horizon_days},
              {"num_agents", c.num_agents},
              {"daily_cycles", c.daily_cycles},
              {"catalog", catalog_to_json(c.catalog)},
              {"market", market},
              {"agents", agents}};
}

std::string config_hash(const GameConfig& config) {
  // The seed travels separately in the log header, so `--seed` overrides keep the hash.
  GameConfig unseeded = config;
  unseeded.seed = 0;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_to_json(unseeded).dump())));
  return buf;
}

}  // namespace scm
