#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <ostream>
#include <type_traits>

namespace scm {

using Day = std::int32_t;

enum class AgentId : std::int32_t {};
enum class ComponentId : std::int32_t {};
enum class ProductId : std::int32_t {};
enum class SupplierId : std::int32_t {};
enum class RfqId : std::int64_t {};
enum class OrderId : std::int64_t {};
enum class SupplyRfqId : std::int64_t {};

template <typename Id>
constexpr auto raw(Id id) noexcept {
  return static_cast<std::underlying_type_t<Id>>(id);
}

template <typename Id>
constexpr std::size_t index_of(Id id) noexcept {
  return static_cast<std::size_t>(raw(id));
}

/// Exact currency amount in the smallest unit. All ledger arithmetic goes
/// through this type so there is never any floating-point drift.
struct Money {
  std::int64_t amount = 0;

  constexpr Money() = default;
  constexpr explicit Money(std::int64_t a) : amount(a) {}

  constexpr Money operator+(Money o) const { return Money{amount + o.amount}; }
  constexpr Money operator-(Money o) const { return Money{amount - o.amount}; }
  constexpr Money operator-() const { return Money{-amount}; }
  constexpr Money operator*(std::int64_t k) const { return Money{amount * k}; }
  constexpr Money& operator+=(Money o) {
    amount += o.amount;
    return *this;
  }
  constexpr Money& operator-=(Money o) {
    amount -= o.amount;
    return *this;
  }
  constexpr auto operator<=>(const Money&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, Money m) { return os << m.amount; }

/// A non-negative fraction stored as parts per million.
struct Ppm {
  std::int64_t value = 0;
  static constexpr std::int64_t one = 1'000'000;

  static Ppm from_double(double fraction);
  double to_double() const { return static_cast<double>(value) / one; }
  constexpr auto operator<=>(const Ppm&) const = default;
};

/// Integer division rounding half away from zero.
constexpr std::int64_t div_round(std::int64_t num, std::int64_t den) {
  const bool neg = (num < 0) != (den < 0);
  const std::int64_t an = num < 0 ? -num : num;
  const std::int64_t ad = den < 0 ? -den : den;
  const std::int64_t q = (an + ad / 2) / ad;
  return neg ? -q : q;
}

/// m * rate, rounded half away from zero.
constexpr Money scale(Money m, Ppm rate) {
  return Money{div_round(m.amount * rate.value, Ppm::one)};
}

}  // namespace scm
