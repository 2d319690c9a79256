#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scm/types.hpp"

namespace scm {

enum class ComponentKind { cpu, motherboard, memory, disk };
enum class Family { pintel, imd, neutral };

std::string_view to_string(ComponentKind kind);
std::string_view to_string(Family family);
ComponentKind component_kind_from(std::string_view name);
Family family_from(std::string_view name);

struct ComponentSku {
  ComponentId id{};
  ComponentKind kind = ComponentKind::cpu;
  Family family = Family::neutral;
  /// GHz for cpus, GB for memory and disks; empty for motherboards.
  std::optional<double> attribute;
  Money base_price;

  bool operator==(const ComponentSku&) const = default;
};

struct ProductSku {
  ProductId id{};
  /// One cpu, one motherboard, one memory, one disk.
  std::array<ComponentId, 4> bom{};
  int cycles = 1;

  bool operator==(const ProductSku&) const = default;
};

/// The parts catalog. Component and product ids are dense (0..n-1) so they
/// double as indexes into inventory vectors. Immutable once validated.
class Catalog {
 public:
  Catalog() = default;
  /// Validates every invariant; throws ConfigError naming the first violation.
  Catalog(std::vector<ComponentSku> components, std::vector<ProductSku> products);

  const std::vector<ComponentSku>& components() const { return components_; }
  const std::vector<ProductSku>& products() const { return products_; }

  const ComponentSku& component(ComponentId id) const;
  const ProductSku& product(ProductId id) const;
  bool has_product(ProductId id) const;

  std::size_t component_count() const { return components_.size(); }
  std::size_t product_count() const { return products_.size(); }
  int max_cycles() const;

  bool operator==(const Catalog&) const = default;

 private:
  std::vector<ComponentSku> components_;
  std::vector<ProductSku> products_;
};

/// 2 families x 2 cpu speeds x 2 memory sizes x 2 disk sizes: 10 components, 16 products.
Catalog default_catalog();

/// Sum of bom base prices. Throws ConfigError for an unknown product.
Money product_cost_floor(ProductId product, const Catalog& catalog);

Catalog catalog_from_json(const nlohmann::json& doc);
nlohmann::json catalog_to_json(const Catalog& catalog);

}  // namespace scm
