#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "scm/domain.hpp"
#include "scm/errors.hpp"

using namespace scm;

TEST_CASE("default catalog has ten components and sixteen products") {
  const Catalog c = default_catalog();
  CHECK(c.component_count() == 10);
  CHECK(c.product_count() == 16);
  CHECK(c == default_catalog());
}

TEST_CASE("every bom holds one part of each kind with matching cpu and board family") {
  const Catalog c = default_catalog();
  for (const auto& p : c.products()) {
    std::set<ComponentKind> kinds;
    for (auto id : p.bom) kinds.insert(c.component(id).kind);
    CHECK(kinds.size() == 4);

    Family cpu = Family::neutral, board = Family::neutral;
    for (auto id : p.bom) {
      const auto& part = c.component(id);
      if (part.kind == ComponentKind::cpu) cpu = part.family;
      if (part.kind == ComponentKind::motherboard) board = part.family;
    }
    CHECK(cpu != Family::neutral);
    CHECK(cpu == board);
    CHECK(p.cycles >= 4);
    CHECK(p.cycles <= 7);
  }
}

TEST_CASE("cost floor sums bom base prices") {
  const Catalog c = default_catalog();
  CHECK(product_cost_floor(ProductId{0}, c) == Money{1500});
  for (const auto& p : c.products()) {
    CHECK(product_cost_floor(p.id, c) == testing::cost_floor_oracle(c, p.id));
  }

  std::vector<ComponentSku> free_parts;
  for (auto part : c.components()) {
    part.base_price = Money{0};
    free_parts.push_back(part);
  }
  const Catalog zero(free_parts, c.products());
  CHECK(product_cost_floor(ProductId{5}, zero) == Money{0});
  CHECK_THROWS_AS(product_cost_floor(ProductId{99}, c), ConfigError);
}

TEST_CASE("catalog round-trips through json") {
  const Catalog c = default_catalog();
  CHECK(catalog_from_json(catalog_to_json(c)) == c);
}

TEST_CASE("catalog loader rejects broken boms") {
  auto doc = catalog_to_json(default_catalog());

  SUBCASE("family mismatch") {
    doc["products"][0]["bom"][1] = 5;  // imd board under a pintel cpu
    CHECK_THROWS_AS(catalog_from_json(doc), ConfigError);
  }
  SUBCASE("two disks") {
    doc["products"][0]["bom"][2] = 8;
    CHECK_THROWS_AS(catalog_from_json(doc), ConfigError);
  }
  SUBCASE("unknown component") {
    doc["products"][0]["bom"][3] = 42;
    CHECK_THROWS_AS(catalog_from_json(doc), ConfigError);
  }
  SUBCASE("missing field") {
    doc["components"][0].erase("base_price");
    CHECK_THROWS_AS(catalog_from_json(doc), ConfigError);
  }
}
