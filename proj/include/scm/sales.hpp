#pragma once

#include <array>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scm/market.hpp"
#include "scm/types.hpp"

namespace scm {

enum class SalesStrategyKind { interval, regression, minmax, undercut, fixed };
std::string_view to_string(SalesStrategyKind kind);
SalesStrategyKind sales_strategy_from(std::string_view name);

/// `expected_margin` maximizes P(win) x margin; `mode` bids the most populated bin.
enum class IntervalObjective { expected_margin, mode };

struct SalesParams {
  Money interval_bin_width{50};
  IntervalObjective interval_objective = IntervalObjective::expected_margin;
  int regression_window_days = 30;
  double regression_epsilon = 0.01;
  double minmax_alpha = 0.3;
  int undercut_window_days = 7;
  Money undercut_step{10};
  Ppm margin_floor{1'000'000};
  Ppm default_markup{1'300'000};
  Money fixed_price{2000};

  bool operator==(const SalesParams&) const = default;
};

// ---------------------------------------------------------------------------
// Observations and learned state

/// Market-level regressors known when the bid is placed.
struct MarketFeatures {
  /// Latest reported mean winning price for the rfq's product (0 if never seen).
  double yesterday_mean = 0.0;
  /// Number of customer RFQs published today.
  double demand_level = 0.0;
  bool operator==(const MarketFeatures&) const = default;
};

inline constexpr std::size_t kRegressionFeatures = 6;
using FeatureVector = std::array<double, kRegressionFeatures>;

/// intercept, quantity, lead days, day index, yesterday's mean price, demand level
FeatureVector regression_features(const CustomerRfq& rfq, const MarketFeatures& market);

/// The outcome of one of our own bids. Rival bids are never observable.
struct OwnOutcome {
  CustomerRfq rfq;
  Money own_bid;
  bool won = false;
  MarketFeatures features;
  bool operator==(const OwnOutcome&) const = default;
};

struct DayObservations {
  Day day = 0;
  std::vector<OwnOutcome> outcomes;
  std::optional<MarketReport> report;
};

struct RegressionSample {
  Day day = 0;
  FeatureVector x{};
  double price = 0.0;
  bool operator==(const RegressionSample&) const = default;
};

struct SmoothedRange {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const SmoothedRange&) const = default;
};

/// Learned state for all four predictors. Only `update_history` changes it.
struct PredictorState {
  /// product -> bin index -> count of observed winning prices
  std::map<ProductId, std::map<std::int64_t, std::int64_t>> histogram;
  std::deque<RegressionSample> samples;
  std::map<ProductId, SmoothedRange> smoothed;
  /// product -> (day, winning price) observations for the undercut frontier
  std::map<ProductId, std::deque<std::pair<Day, Money>>> recent_prices;
  std::map<ProductId, Money> last_mean;

  bool operator==(const PredictorState&) const = default;
};

/// Folds observations in (in order) into every predictor. Pure.
PredictorState update_history(PredictorState state, std::span<const DayObservations> days,
                              const SalesParams& params);

// ---------------------------------------------------------------------------
// Predictors. These return raw (unclamped) prices.

struct PriceEstimate {
  Money price;
  /// Which rule produced the price, e.g. "histogram" or "fallback_markup".
  std::string basis;
};

PriceEstimate interval_predict(ProductId product, const PredictorState& state, Money cost_floor,
                               const SalesParams& params);

/// OLS coefficients, or nothing when the system is under-determined or singular.
std::optional<FeatureVector> fit_price_model(std::span<const RegressionSample> samples);

PriceEstimate regression_predict(const CustomerRfq& rfq, const MarketFeatures& market,
                                 const PredictorState& state, Day today, Money cost_floor,
                                 const SalesParams& params);

PriceEstimate minmax_predict(ProductId product, const PredictorState& state, double urgency,
                             Money cost_floor, const SalesParams& params);

/// Lowest winning price seen for `product` over the last window, if any.
std::optional<Money> undercut_frontier(ProductId product, const PredictorState& state, Day today,
                                       const SalesParams& params);

PriceEstimate undercut_predict(ProductId product, const PredictorState& state, Day today,
                               Money cost_floor, const SalesParams& params);

// ---------------------------------------------------------------------------
// Strategy interface

struct PricingContext {
  Day today = 0;
  Money cost_floor;
  MarketFeatures features;
  /// 0 = no pressure to sell, 1 = sell at any acceptable price.
  double urgency = 0.5;
};

class SalesStrategy {
 public:
  virtual ~SalesStrategy() = default;
  virtual SalesStrategyKind kind() const = 0;
  virtual PriceEstimate estimate(const CustomerRfq& rfq, const PricingContext& ctx,
                                 const PredictorState& state) const = 0;
};

std::unique_ptr<SalesStrategy> make_sales_strategy(SalesStrategyKind kind,
                                                   const SalesParams& params);

struct PricedBid {
  Money unit_price;
  std::string basis;
  /// True when the floor or reserve clamp changed the estimate.
  bool clamped = false;
};

/// Prices an rfq with the bound strategy and applies the bid bounds:
/// floor = cost_floor x margin_floor, ceiling = reserve. Clamping strategies
/// (regression, minmax, undercut) are pulled into bounds; interval is capped at
/// the reserve; fixed and below-floor interval estimates decline.
std::optional<PricedBid> sales_manager_price(const SalesStrategy& strategy,
                                             const CustomerRfq& rfq, const PricingContext& ctx,
                                             const PredictorState& state,
                                             const SalesParams& params);

}  // namespace scm
