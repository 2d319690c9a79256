#include "scm/domain.hpp"

#include <algorithm>
#include <cmath>

#include "scm/errors.hpp"

namespace scm {

Ppm Ppm::from_double(double fraction) {
  if (!std::isfinite(fraction) || fraction < 0.0) {
    throw ConfigError("rate must be a finite non-negative number");
  }
  return Ppm{std::llround(fraction * static_cast<double>(one))};
}

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::cpu: return "cpu";
    case ComponentKind::motherboard: return "motherboard";
    case ComponentKind::memory: return "memory";
    case ComponentKind::disk: return "disk";
  }
  return "?";
}

std::string_view to_string(Family family) {
  switch (family) {
    case Family::pintel: return "pintel";
    case Family::imd: return "imd";
    case Family::neutral: return "neutral";
  }
  return "?";
}

ComponentKind component_kind_from(std::string_view name) {
  for (auto k : {ComponentKind::cpu, ComponentKind::motherboard, ComponentKind::memory,
                 ComponentKind::disk}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown component kind '" + std::string(name) + "'");
}

Family family_from(std::string_view name) {
  for (auto f : {Family::pintel, Family::imd, Family::neutral}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown component family '" + std::string(name) + "'");
}

Catalog::Catalog(std::vector<ComponentSku> components, std::vector<ProductSku> products)
    : components_(std::move(components)), products_(std::move(products)) {
  std::sort(components_.begin(), components_.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  std::sort(products_.begin(), products_.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });

  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    if (index_of(c.id) != i || raw(c.id) < 0) {
      throw ConfigError("catalog: component ids must be unique and dense from 0 (id " +
                        std::to_string(raw(c.id)) + ")");
    }
    const bool branded = c.kind == ComponentKind::cpu || c.kind == ComponentKind::motherboard;
    if (branded && c.family == Family::neutral) {
      throw ConfigError("catalog: cpu/motherboard " + std::to_string(raw(c.id)) +
                        " must belong to pintel or imd");
    }
    if (!branded && c.family != Family::neutral) {
      throw ConfigError("catalog: memory/disk " + std::to_string(raw(c.id)) +
                        " must have neutral family");
    }
    if (c.base_price < Money{0}) {
      throw ConfigError("catalog: component " + std::to_string(raw(c.id)) +
                        " has negative base_price");
    }
  }

  for (std::size_t i = 0; i < products_.size(); ++i) {
    const auto& p = products_[i];
    const std::string pid = std::to_string(raw(p.id));
    if (index_of(p.id) != i || raw(p.id) < 0) {
      throw ConfigError("catalog: product ids must be unique and dense from 0 (id " + pid + ")");
    }
    if (p.cycles < 1) throw ConfigError("catalog: product " + pid + " needs cycles >= 1");

    std::array<int, 4> per_kind{};
    std::optional<Family> cpu_family;
    std::optional<Family> board_family;
    for (ComponentId cid : p.bom) {
      if (raw(cid) < 0 || index_of(cid) >= components_.size()) {
        throw ConfigError("catalog: product " + pid + " references unknown component " +
                          std::to_string(raw(cid)));
      }
      const auto& c = components_[index_of(cid)];
      ++per_kind[static_cast<std::size_t>(c.kind)];
      if (c.kind == ComponentKind::cpu) cpu_family = c.family;
      if (c.kind == ComponentKind::motherboard) board_family = c.family;
    }
    if (std::any_of(per_kind.begin(), per_kind.end(), [](int n) { return n != 1; })) {
      throw ConfigError("catalog: product " + pid +
                        " bom must hold exactly one cpu, motherboard, memory and disk");
    }
    if (cpu_family != board_family) {
      throw ConfigError("catalog: product " + pid + " mixes cpu and motherboard families");
    }
  }
}

const ComponentSku& Catalog::component(ComponentId id) const {
  if (raw(id) < 0 || index_of(id) >= components_.size()) {
    throw ConfigError("unknown component id " + std::to_string(raw(id)));
  }
  return components_[index_of(id)];
}

const ProductSku& Catalog::product(ProductId id) const {
  if (!has_product(id)) throw ConfigError("unknown product id " + std::to_string(raw(id)));
  return products_[index_of(id)];
}

bool Catalog::has_product(ProductId id) const {
  return raw(id) >= 0 && index_of(id) < products_.size();
}

int Catalog::max_cycles() const {
  int m = 0;
  for (const auto& p : products_) m = std::max(m, p.cycles);
  return m;
}

Catalog default_catalog() {
  std::vector<ComponentSku> components;
  auto add = [&](ComponentKind kind, Family family, std::optional<double> attr, std::int64_t price) {
    components.push_back(ComponentSku{ComponentId{static_cast<std::int32_t>(components.size())},
                                      kind, family, attr, Money{price}});
  };
  // ids 0-3: cpus (family-major, then speed)
  add(ComponentKind::cpu, Family::pintel, 2.0, 1000);
  add(ComponentKind::cpu, Family::pintel, 5.0, 1500);
  add(ComponentKind::cpu, Family::imd, 2.0, 1000);
  add(ComponentKind::cpu, Family::imd, 5.0, 1500);
  add(ComponentKind::motherboard, Family::pintel, std::nullopt, 250);
  add(ComponentKind::motherboard, Family::imd, std::nullopt, 250);
  add(ComponentKind::memory, Family::neutral, 1.0, 100);
  add(ComponentKind::memory, Family::neutral, 2.0, 200);
  add(ComponentKind::disk, Family::neutral, 300.0, 150);
  add(ComponentKind::disk, Family::neutral, 500.0, 250);

  std::vector<ProductSku> products;
  for (int family = 0; family < 2; ++family) {
    for (int speed = 0; speed < 2; ++speed) {
      for (int memory = 0; memory < 2; ++memory) {
        for (int disk = 0; disk < 2; ++disk) {
          ProductSku p;
          p.id = ProductId{static_cast<std::int32_t>(products.size())};
          p.bom = {ComponentId{family * 2 + speed}, ComponentId{4 + family},
                   ComponentId{6 + memory}, ComponentId{8 + disk}};
          // one extra cycle per premium part: 4..7
          p.cycles = 4 + speed + memory + disk;
          products.push_back(p);
        }
      }
    }
  }
  return Catalog(std::move(components), std::move(products));
}

Money product_cost_floor(ProductId product, const Catalog& catalog) {
  if (!catalog.has_product(product)) {
    throw ConfigError("corrupt config: cost floor requested for unknown product " +
                      std::to_string(raw(product)));
  }
  Money total;
  for (ComponentId cid : catalog.product(product).bom) total += catalog.component(cid).base_price;
  return total;
}

Catalog catalog_from_json(const nlohmann::json& doc) {
  try {
    std::vector<ComponentSku> components;
    for (const auto& c : doc.at("components")) {
      ComponentSku sku;
      sku.id = ComponentId{c.at("id").get<std::int32_t>()};
      sku.kind = component_kind_from(c.at("kind").get<std::string>());
      sku.family = family_from(c.value("family", std::string("neutral")));
      if (c.contains("attribute") && !c.at("attribute").is_null()) {
        sku.attribute = c.at("attribute").get<double>();
      }
      sku.base_price = Money{c.at("base_price").get<std::int64_t>()};
      components.push_back(sku);
    }
    std::vector<ProductSku> products;
    for (const auto& p : doc.at("products")) {
      ProductSku sku;
      sku.id = ProductId{p.at("id").get<std::int32_t>()};
      const auto& bom = p.at("bom");
      if (!bom.is_array() || bom.size() != 4) {
        throw ConfigError("catalog: product " + std::to_string(raw(sku.id)) +
                          " bom must list exactly 4 component ids");
      }
      for (std::size_t i = 0; i < 4; ++i) sku.bom[i] = ComponentId{bom[i].get<std::int32_t>()};
      sku.cycles = p.at("cycles").get<int>();
      products.push_back(sku);
    }
    return Catalog(std::move(components), std::move(products));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("catalog: malformed document: ") + e.what());
  }
}

nlohmann::json catalog_to_json(const Catalog& catalog) {
  nlohmann::json doc;
  doc["components"] = nlohmann::json::array();
  for (const auto& c : catalog.components()) {
    nlohmann::json j{{"id", raw(c.id)},
                     {"kind", to_string(c.kind)},
                     {"family", to_string(c.family)},
                     {"base_price", c.base_price.amount}};
    j["attribute"] = c.attribute ? nlohmann::json(*c.attribute) : nlohmann::json(nullptr);
    doc["components"].push_back(std::move(j));
  }
  doc["products"] = nlohmann::json::array();
  for (const auto& p : catalog.products()) {
    nlohmann::json bom = nlohmann::json::array();
    for (auto cid : p.bom) bom.push_back(raw(cid));
    doc["products"].push_back({{"id", raw(p.id)}, {"bom", bom}, {"cycles", p.cycles}});
  }
  return doc;
}

}  // namespace scm
