#include "scm/sales.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "scm/errors.hpp"

namespace scm {

std::string_view to_string(SalesStrategyKind kind) {
  switch (kind) {
    case SalesStrategyKind::interval: return "interval";
    case SalesStrategyKind::regression: return "regression";
    case SalesStrategyKind::minmax: return "minmax";
    case SalesStrategyKind::undercut: return "undercut";
    case SalesStrategyKind::fixed: return "fixed";
  }
  return "?";
}

SalesStrategyKind sales_strategy_from(std::string_view name) {
  for (auto k : {SalesStrategyKind::interval, SalesStrategyKind::regression,
                 SalesStrategyKind::minmax, SalesStrategyKind::undercut, SalesStrategyKind::fixed}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown sales strategy '" + std::string(name) + "'");
}

FeatureVector regression_features(const CustomerRfq& rfq, const MarketFeatures& market) {
  return {1.0,
          static_cast<double>(rfq.quantity),
          static_cast<double>(rfq.due_day - rfq.issue_day),
          static_cast<double>(rfq.issue_day),
          market.yesterday_mean,
          market.demand_level};
}

namespace {

std::int64_t bin_of(Money price, Money width) {
  // floor division so negative prices (never expected) still bin consistently
  const std::int64_t w = std::max<std::int64_t>(1, width.amount);
  std::int64_t q = price.amount / w;
  if (price.amount % w != 0 && price.amount < 0) --q;
  return q;
}

void smooth(SmoothedRange& s, Money lo, Money hi, double alpha) {
  s.min = alpha * static_cast<double>(lo.amount) + (1.0 - alpha) * s.min;
  s.max = alpha * static_cast<double>(hi.amount) + (1.0 - alpha) * s.max;
}

Money round_money(double value) { return Money{std::llround(value)}; }

PriceEstimate markup_fallback(Money cost_floor, const SalesParams& params) {
  return {scale(cost_floor, params.default_markup), "fallback_markup"};
}

}  // namespace

PredictorState update_history(PredictorState state, std::span<const DayObservations> days,
                              const SalesParams& params) {
  for (const auto& obs : days) {
    if (obs.outcomes.empty() && !obs.report) continue;

    for (const auto& outcome : obs.outcomes) {
      if (!outcome.won) continue;
      const ProductId p = outcome.rfq.product;
      ++state.histogram[p][bin_of(outcome.own_bid, params.interval_bin_width)];
      state.samples.push_back(RegressionSample{obs.day, regression_features(outcome.rfq, outcome.features),
                                               static_cast<double>(outcome.own_bid.amount)});
      state.recent_prices[p].emplace_back(obs.day, outcome.own_bid);
    }

    if (obs.report) {
      for (const auto& stats : obs.report->products) {
        if (stats.count <= 0) continue;
        const ProductId p = stats.product;
        auto& bins = state.histogram[p];
        for (Money price : {stats.min, stats.mean, stats.max}) {
          ++bins[bin_of(price, params.interval_bin_width)];
        }
        auto it = state.smoothed.find(p);
        if (it == state.smoothed.end()) {
          state.smoothed.emplace(p, SmoothedRange{static_cast<double>(stats.min.amount),
                                                  static_cast<double>(stats.max.amount)});
        } else {
          smooth(it->second, stats.min, stats.max, params.minmax_alpha);
        }
        state.recent_prices[p].emplace_back(obs.day, stats.min);
        state.last_mean[p] = stats.mean;
      }
    }

    // drop what no window can reach any more
    const Day regression_cutoff = obs.day - params.regression_window_days;
    while (!state.samples.empty() && state.samples.front().day <= regression_cutoff) {
      state.samples.pop_front();
    }
    const Day undercut_cutoff = obs.day - params.undercut_window_days;
    for (auto& [product, prices] : state.recent_prices) {
      while (!prices.empty() && prices.front().first <= undercut_cutoff) prices.pop_front();
    }
  }
  return state;
}

PriceEstimate interval_predict(ProductId product, const PredictorState& state, Money cost_floor,
                               const SalesParams& params) {
  auto it = state.histogram.find(product);
  if (it == state.histogram.end() || it->second.empty()) return markup_fallback(cost_floor, params);

  const auto& bins = it->second;
  const std::int64_t width = std::max<std::int64_t>(1, params.interval_bin_width.amount);
  auto midpoint = [&](std::int64_t bin) { return Money{bin * width + width / 2}; };

  if (params.interval_objective == IntervalObjective::mode) {
    auto best = bins.begin();
    for (auto b = bins.begin(); b != bins.end(); ++b) {
      if (b->second > best->second) best = b;
    }
    return {midpoint(best->first), "histogram_mode"};
  }

  // P(winning price >= bin) * margin; the total count is a common factor so
  // comparing suffix_count * margin keeps the argmax exact in integers.
  const std::int64_t lo = bins.begin()->first;
  const std::int64_t hi = bins.rbegin()->first;
  std::int64_t suffix = 0;
  for (const auto& [bin, count] : bins) suffix += count;

  std::int64_t best_bin = lo;
  std::int64_t best_value = 0;
  bool have = false;
  for (std::int64_t bin = lo; bin <= hi; ++bin) {
    const std::int64_t value = suffix * (midpoint(bin) - cost_floor).amount;
    if (!have || value > best_value) {
      best_bin = bin;
      best_value = value;
      have = true;
    }
    auto found = bins.find(bin);
    if (found != bins.end()) suffix -= found->second;
  }
  return {midpoint(best_bin), "histogram"};
}

std::optional<FeatureVector> fit_price_model(std::span<const RegressionSample> samples) {
  constexpr auto k = static_cast<Eigen::Index>(kRegressionFeatures);
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n < k) return std::nullopt;

  Eigen::MatrixXd x(n, k);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < k; ++j) x(i, j) = s.x[static_cast<std::size_t>(j)];
    y(i) = s.price;
  }
  // unit-norm columns so the rank test is not fooled by feature scale
  Eigen::VectorXd norms = x.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (norms(j) == 0.0) return std::nullopt;
    x.col(j) /= norms(j);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) return std::nullopt;
  const Eigen::VectorXd beta = qr.solve(y);

  FeatureVector out{};
  for (Eigen::Index j = 0; j < k; ++j) out[static_cast<std::size_t>(j)] = beta(j) / norms(j);
  return out;
}

PriceEstimate regression_predict(const CustomerRfq& rfq, const MarketFeatures& market,
                                 const PredictorState& state, Day today, Money cost_floor,
                                 const SalesParams& params) {
  std::vector<RegressionSample> window;
  for (const auto& s : state.samples) {
    if (s.day > today - params.regression_window_days && s.day <= today) window.push_back(s);
  }
  const auto coef = fit_price_model(window);
  if (!coef) {
    auto fallback = interval_predict(rfq.product, state, cost_floor, params);
    fallback.basis = "fallback_interval";
    return fallback;
  }
  const FeatureVector x = regression_features(rfq, market);
  double predicted = 0.0;
  for (std::size_t j = 0; j < kRegressionFeatures; ++j) predicted += (*coef)[j] * x[j];
  return {round_money(predicted * (1.0 - params.regression_epsilon)), "regression"};
}

PriceEstimate minmax_predict(ProductId product, const PredictorState& state, double urgency,
                             Money cost_floor, const SalesParams& params) {
  auto it = state.smoothed.find(product);
  if (it == state.smoothed.end()) return markup_fallback(cost_floor, params);
  const double u = std::clamp(urgency, 0.0, 1.0);
  const auto& s = it->second;
  return {round_money(s.min + (1.0 - u) * (s.max - s.min)), "smoothed_range"};
}

std::optional<Money> undercut_frontier(ProductId product, const PredictorState& state, Day today,
                                       const SalesParams& params) {
  auto it = state.recent_prices.find(product);
  if (it == state.recent_prices.end()) return std::nullopt;
  std::optional<Money> frontier;
  for (const auto& [day, price] : it->second) {
    if (day <= today - params.undercut_window_days || day > today) continue;
    if (!frontier || price < *frontier) frontier = price;
  }
  return frontier;
}

PriceEstimate undercut_predict(ProductId product, const PredictorState& state, Day today,
                               Money cost_floor, const SalesParams& params) {
  if (auto frontier = undercut_frontier(product, state, today, params)) {
    return {*frontier - params.undercut_step, "frontier"};
  }
  auto fallback = minmax_predict(product, state, 0.5, cost_floor, params);
  if (fallback.basis == "smoothed_range") fallback.basis = "fallback_minmax";
  return fallback;
}

namespace {

class IntervalStrategy final : public SalesStrategy {
 public:
  explicit IntervalStrategy(SalesParams p) : params_(std::move(p)) {}
  SalesStrategyKind kind() const override { return SalesStrategyKind::interval; }
  PriceEstimate estimate(const CustomerRfq& rfq, const PricingContext& ctx,
                         const PredictorState& state) const override {
    return interval_predict(rfq.product, state, ctx.cost_floor, params_);
  }

 private:
  SalesParams params_;
};

class RegressionStrategy final : public SalesStrategy {
 public:
  explicit RegressionStrategy(SalesParams p) : params_(std::move(p)) {}
  SalesStrategyKind kind() const override { return SalesStrategyKind::regression; }
  PriceEstimate estimate(const CustomerRfq& rfq, const PricingContext& ctx,
                         const PredictorState& state) const override {
    return regression_predict(rfq, ctx.features, state, ctx.today, ctx.cost_floor, params_);
  }

 private:
  SalesParams params_;
};

class MinMaxStrategy final : public SalesStrategy {
 public:
  explicit MinMaxStrategy(SalesParams p) : params_(std::move(p)) {}
  SalesStrategyKind kind() const override { return SalesStrategyKind::minmax; }
  PriceEstimate estimate(const CustomerRfq& rfq, const PricingContext& ctx,
                         const PredictorState& state) const override {
    return minmax_predict(rfq.product, state, ctx.urgency, ctx.cost_floor, params_);
  }

 private:
  SalesParams params_;
};

class UndercutStrategy final : public SalesStrategy {
 public:
  explicit UndercutStrategy(SalesParams p) : params_(std::move(p)) {}
  SalesStrategyKind kind() const override { return SalesStrategyKind::undercut; }
  PriceEstimate estimate(const CustomerRfq& rfq, const PricingContext& ctx,
                         const PredictorState& state) const override {
    return undercut_predict(rfq.product, state, ctx.today, ctx.cost_floor, params_);
  }

 private:
  SalesParams params_;
};

class FixedStrategy final : public SalesStrategy {
 public:
  explicit FixedStrategy(SalesParams p) : params_(std::move(p)) {}
  SalesStrategyKind kind() const override { return SalesStrategyKind::fixed; }
  PriceEstimate estimate(const CustomerRfq&, const PricingContext&,
                         const PredictorState&) const override {
    return {params_.fixed_price, "fixed"};
  }

 private:
  SalesParams params_;
};

}  // namespace

std::unique_ptr<SalesStrategy> make_sales_strategy(SalesStrategyKind kind,
                                                   const SalesParams& params) {
  switch (kind) {
    case SalesStrategyKind::interval: return std::make_unique<IntervalStrategy>(params);
    case SalesStrategyKind::regression: return std::make_unique<RegressionStrategy>(params);
    case SalesStrategyKind::minmax: return std::make_unique<MinMaxStrategy>(params);
    case SalesStrategyKind::undercut: return std::make_unique<UndercutStrategy>(params);
    case SalesStrategyKind::fixed: return std::make_unique<FixedStrategy>(params);
  }
  throw ConfigError("unknown sales strategy");
}

std::optional<PricedBid> sales_manager_price(const SalesStrategy& strategy,
                                             const CustomerRfq& rfq, const PricingContext& ctx,
                                             const PredictorState& state,
                                             const SalesParams& params) {
  const PriceEstimate estimate = strategy.estimate(rfq, ctx, state);
  const Money floor = scale(ctx.cost_floor, params.margin_floor);
  const Money reserve = rfq.reserve_unit_price;

  switch (strategy.kind()) {
    case SalesStrategyKind::fixed:
      if (estimate.price > reserve || estimate.price < floor) return std::nullopt;
      return PricedBid{estimate.price, estimate.basis, false};

    case SalesStrategyKind::regression:
    case SalesStrategyKind::minmax:
    case SalesStrategyKind::undercut: {
      if (floor > reserve) return std::nullopt;
      const Money price = std::clamp(estimate.price, floor, reserve);
      return PricedBid{price, estimate.basis, price != estimate.price};
    }

    case SalesStrategyKind::interval:
      break;
  }
  const Money price = std::min(estimate.price, reserve);
  if (price < floor) return std::nullopt;
  return PricedBid{price, estimate.basis, price != estimate.price};
}

}  // namespace scm
