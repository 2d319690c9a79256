#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include "scm/types.hpp"

namespace scm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration / catalog input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A market operation was called with inputs outside its contract.
class MarketError : public Error {
 public:
  using Error::Error;
};

/// A simulation invariant failed during a tick.
class InvariantViolation : public Error {
 public:
  InvariantViolation(std::string invariant, Day day, const std::string& detail)
      : Error("invariant '" + invariant + "' violated on day " + std::to_string(day) +
              (detail.empty() ? "" : ": " + detail)),
        invariant_(std::move(invariant)),
        day_(day) {}

  const std::string& invariant() const noexcept { return invariant_; }
  Day day() const noexcept { return day_; }

 private:
  std::string invariant_;
  Day day_;
};

/// Replay found a log that does not match the deterministic re-run.
class ReplayDivergence : public Error {
 public:
  ReplayDivergence(std::size_t index, const std::string& detail)
      : Error("event log diverges at event " + std::to_string(index) + ": " + detail),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace scm
