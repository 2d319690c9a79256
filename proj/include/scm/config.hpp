#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scm/domain.hpp"
#include "scm/market.hpp"
#include "scm/procurement.hpp"
#include "scm/sales.hpp"

namespace scm {

struct MarketConfig {
  DemandConfig demand;
  BankConfig bank;
  int supplier_capacity = 500;
  Ppm discount_delta{500'000};
  /// Empty selects default_suppliers(catalog, supplier_capacity).
  std::vector<SupplierSpec> suppliers;

  bool operator==(const MarketConfig&) const = default;
};

struct AgentBinding {
  SalesStrategyKind sales_strategy = SalesStrategyKind::interval;
  ProcurementStrategyKind procurement_strategy = ProcurementStrategyKind::mixed_horizon;
  SalesParams sales;
  ProcurementParams procurement;
  /// Look-ahead of the inventory manager's thresholds, in days.
  int inventory_horizon_days = 5;

  bool operator==(const AgentBinding&) const = default;
};

struct GameConfig {
  std::uint64_t seed = 0;
  int horizon_days = 220;
  int num_agents = 6;
  int daily_cycles = 2000;
  std::optional<std::string> catalog_path;
  Catalog catalog = default_catalog();
  MarketConfig market;
  std::vector<AgentBinding> agents;

  /// Supplier roster after defaults are applied.
  std::vector<SupplierSpec> supplier_specs() const;
  /// Throws ConfigError naming the violated invariant.
  void validate() const;

  bool operator==(const GameConfig&) const = default;
};

/// Six competitors covering every strategy at least once.
std::vector<AgentBinding> default_lineup(int num_agents);

GameConfig default_game_config();

/// Missing keys keep defaults. Top-level `sales` / `procurement` sections
/// apply to every agent; `agents[i]` sections override them. A relative
/// `catalog` path resolves against `base_dir`.
GameConfig config_from_json(const nlohmann::json& doc, const std::string& base_dir = ".");
GameConfig load_config(const std::string& path);

/// Canonical, fully-expanded form (catalog inlined). Round-trips through
/// config_from_json.
nlohmann::json config_to_json(const GameConfig& config);

/// Hex FNV-1a of the canonical JSON with the seed zeroed; recorded in event
/// log headers next to the seed.
std::string config_hash(const GameConfig& config);

SalesParams sales_params_from_json(const nlohmann::json& j, SalesParams base = {});
ProcurementParams procurement_params_from_json(const nlohmann::json& j, ProcurementParams base = {});

/// One `agents[i]` entry; keys it leaves out keep the values in `base`.
AgentBinding agent_binding_from_json(const nlohmann::json& j, const AgentBinding& base);
nlohmann::json agent_binding_to_json(const AgentBinding& binding);

}  // namespace scm
