#include "pricelab/policies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pricelab {

double target_demand(double inventory, int epoch, int num_epochs, double rho) {
  if (epoch < 1 || epoch > num_epochs) throw Error("target_demand: epoch out of range");
  if (!(rho > 0.0 && rho < 1.0)) throw Error("target_demand: rho must be in (0, 1)");
  if (inventory <= 0.0) return 0.0;
  return rho * inventory / static_cast<double>(num_epochs - epoch + 1);
}

PriceVector apply_inertia(const PriceVector& p_new, const PriceVector& p_prev, double delta_max,
                          double price_floor, double price_ceiling) {
  if (!(delta_max >= 0.0)) throw Error("apply_inertia: delta_max must be >= 0");
  if (p_new.size() != p_prev.size()) throw Error("apply_inertia: size mismatch");
  PriceVector out(p_new.size());
  for (std::size_t i = 0; i < p_new.size(); ++i) {
    const double banded = std::clamp(p_new[i], p_prev[i] - delta_max, p_prev[i] + delta_max);
    out[i] = std::clamp(banded, price_floor, price_ceiling);
  }
  return out;
}

SolverError::SolverError(const std::string& message, PriceVector best_prices,
                         std::vector<double> residuals)
    : Error(message), best_prices_(std::move(best_prices)), residuals_(std::move(residuals)) {}

double epoch_profit_from_demand(const std::vector<double>& demand,
                                const std::vector<std::size_t>& available,
                                const SkuCatalog& catalog, double lambda_dt,
                                const PriceVector& prices) {
  double profit = 0.0;
  for (std::size_t i : available) {
    const double margin = (1.0 - catalog.effective_commission(i)) * prices[i] -
                          catalog.skus[i].unit_cost;
    profit += lambda_dt * demand[i] * margin;
  }
  return profit;
}

double expected_epoch_profit(const PriceVector& prices,
                             const std::vector<std::size_t>& available,
                             const SkuCatalog& catalog, double lambda_dt) {
  const std::vector<double> demand = expected_item_demand(prices, available, catalog);
  return epoch_profit_from_demand(demand, available, catalog, lambda_dt, prices);
}

std::vector<double> price_grid(double floor, double ceiling, int points) {
  if (points < 1) throw Error("price_grid: points must be >= 1");
  if (!(ceiling >= floor)) throw Error("price_grid: ceiling must be >= floor");
  if (points == 1) return {floor};
  std::vector<double> grid(points);
  const double step = (ceiling - floor) / static_cast<double>(points - 1);
  for (int g = 0; g < points; ++g) grid[g] = floor + step * g;
  grid.back() = ceiling;
  return grid;
}

namespace {

PolicyDiagnostics blank_diagnostics(std::size_t n) {
  PolicyDiagnostics diag;
  diag.achieved_demand.assign(n, 0.0);
  diag.solver_iterations.assign(n, 0);
  diag.clamped_bracket.assign(n, 0);
  diag.clamped_inertia.assign(n, 0);
  return diag;
}

double epoch_start_rate(const ArrivalRateProfile& profile, const InventoryState& state,
                        const EpisodeConfig& config) {
  return rate_at(profile, static_cast<double>(state.epoch) * config.epoch_length);
}

}  // namespace

PolicyDecision solve_price_for_targets(const std::vector<double>& targets,
                                       const InventoryState& state, const SkuCatalog& catalog,
                                       const ArrivalRateProfile& profile,
                                       const EpisodeConfig& config, const PriceVector& p_prev,
                                       const SolverParams& params) {
  const std::size_t n = catalog.size();
  if (targets.size() != n || p_prev.size() != n || state.on_hand.size() != n)
    throw Error("solve_price_for_targets: size mismatch");
  for (double t : targets)
    if (!(t >= 0.0)) throw Error("solve_price_for_targets: targets must be >= 0");

  const double lambda = epoch_start_rate(profile, state, config);
  const double lambda_dt = lambda * config.epoch_length;
  const double tol = params.demand_tol > 0.0 ? params.demand_tol : 1e-6 * lambda_dt;
  const double floor = config.price_floor;
  const double ceiling = config.price_ceiling;
  const std::vector<std::size_t> available = availability_set(state);

  PolicyDecision decision;
  decision.diagnostics = blank_diagnostics(n);
  decision.diagnostics.target_demand = targets;
  decision.prices = p_prev;

  if (!available.empty()) {
    PriceVector prices = p_prev;
    DemandEvaluator evaluator(available, catalog);
    const auto demand_at = [&](std::size_t i, double price) {
      const double saved = prices[i];
      prices[i] = price;
      const double d = evaluator.item_demand(prices)[i];
      prices[i] = saved;
      return lambda_dt * d;
    };

    bool converged = false;
    std::vector<double> residuals(n, 0.0);
    for (int sweep = 0; sweep < params.max_sweeps && !converged; ++sweep) {
      for (std::size_t i : available) {
        const double target = targets[i];
        const double demand_floor = demand_at(i, floor);
        int iters = 0;
        bool clamped = false;
        if (demand_floor <= target) {
          // even the cheapest price cannot generate this much demand
          prices[i] = floor;
          clamped = target - demand_floor > tol;
        } else {
          const double demand_ceiling = demand_at(i, ceiling);
          if (demand_ceiling >= target) {
            // demand stays above the target all the way up (e.g. target 0)
            prices[i] = ceiling;
            clamped = demand_ceiling - target > tol;
          } else {
            double lo = floor;   // demand above target here
            double hi = ceiling; // demand below target here
            double mid = prices[i];
            for (;;) {
              mid = 0.5 * (lo + hi);
              const double d = demand_at(i, mid);
              ++iters;
              if (std::fabs(d - target) <= 0.5 * tol) break;
              if (d > target) {
                lo = mid;
              } else {
                hi = mid;
              }
              if (hi - lo <= 1e-13 * std::max(1.0, std::fabs(hi))) break;
              if (iters >= params.max_bisection_iters) break;
            }
            prices[i] = mid;
          }
        }
        decision.diagnostics.solver_iterations[i] += iters;
        decision.diagnostics.clamped_bracket[i] = clamped ? 1 : 0;
      }

      // Residual-based convergence: a coordinate's bisection can be perturbed
      // by later coordinates in the same sweep, so declare victory only once
      // the joint residuals settle.
      const std::vector<double>& demand = evaluator.item_demand(prices);
      converged = true;
      for (std::size_t i : available) {
        residuals[i] = lambda_dt * demand[i] - targets[i];
        if (!decision.diagnostics.clamped_bracket[i] && std::fabs(residuals[i]) > tol)
          converged = false;
      }
    }
    if (!converged) {
      std::ostringstream msg;
      msg << "solve_price_for_targets: no convergence after " << params.max_sweeps
          << " Gauss-Seidel sweeps (demand_tol " << tol << ")";
      throw SolverError(msg.str(), prices, residuals);
    }
    decision.prices = prices;
  }

  const PriceVector unclamped = decision.prices;
  decision.prices = apply_inertia(decision.prices, p_prev, config.delta_max, floor, ceiling);
  for (std::size_t i = 0; i < n; ++i)
    decision.diagnostics.clamped_inertia[i] = decision.prices[i] != unclamped[i] ? 1 : 0;
  decision.diagnostics.achieved_demand =
      expected_demand(decision.prices, available, catalog, lambda, config.epoch_length);
  return decision;
}

FixedPricePolicy::FixedPricePolicy(PriceVector fixed_prices, SkuCatalog catalog,
                                   EpisodeConfig config)
    : fixed_prices_(std::move(fixed_prices)),
      catalog_(std::move(catalog)),
      config_(std::move(config)) {
  if (fixed_prices_.size() != catalog_.size())
    throw Error("fixed policy: prices must list one value per SKU");
  for (double p : fixed_prices_)
    if (!(p >= 0.0) || !std::isfinite(p)) throw Error("fixed policy: prices must be >= 0");
}

PolicyDecision FixedPricePolicy::decide(const InventoryState& state, const PriceVector& p_prev,
                                        int epoch, Rng& rng) const {
  (void)state;
  (void)epoch;
  (void)rng;
  PolicyDecision decision;
  decision.prices = apply_inertia(fixed_prices_, p_prev, config_.delta_max, config_.price_floor,
                                  config_.price_ceiling);
  decision.diagnostics = blank_diagnostics(catalog_.size());
  for (std::size_t i = 0; i < catalog_.size(); ++i)
    decision.diagnostics.clamped_inertia[i] = decision.prices[i] != fixed_prices_[i] ? 1 : 0;
  return decision;
}

MyopicPolicy::MyopicPolicy(SkuCatalog catalog, ArrivalRateProfile profile, EpisodeConfig config,
                           LatticeParams params)
    : catalog_(std::move(catalog)),
      profile_(std::move(profile)),
      config_(std::move(config)),
      params_(params) {}

PolicyDecision MyopicPolicy::decide(const InventoryState& state, const PriceVector& p_prev,
                                    int epoch, Rng& rng) const {
  (void)epoch;
  (void)rng;
  PolicyDecision decision;
  decision.prices = p_prev;
  decision.diagnostics = blank_diagnostics(catalog_.size());

  const std::vector<std::size_t> available = availability_set(state);
  if (available.empty()) return decision;

  const double lambda = epoch_start_rate(profile_, state, config_);
  const double lambda_dt = lambda * config_.epoch_length;
  const std::vector<double> grid =
      price_grid(config_.price_floor, config_.price_ceiling, params_.grid_points);

  DemandEvaluator evaluator(available, catalog_);
  const PriceVector best = maximize_on_lattice(
      available, p_prev, grid,
      [&](const PriceVector& candidate) {
        return epoch_profit_from_demand(evaluator.item_demand(candidate), available, catalog_,
                                        lambda_dt, candidate);
      },
      params_.ascent_passes);

  decision.prices = apply_inertia(best, p_prev, config_.delta_max, config_.price_floor,
                                  config_.price_ceiling);
  for (std::size_t i = 0; i < catalog_.size(); ++i)
    decision.diagnostics.clamped_inertia[i] = decision.prices[i] != best[i] ? 1 : 0;
  decision.diagnostics.achieved_demand =
      expected_demand(decision.prices, available, catalog_, lambda, config_.epoch_length);
  return decision;
}

GuardrailPolicy::GuardrailPolicy(SkuCatalog catalog, ArrivalRateProfile profile,
                                 EpisodeConfig config, SolverParams params)
    : catalog_(std::move(catalog)),
      profile_(std::move(profile)),
      config_(std::move(config)),
      params_(params) {}

PolicyDecision GuardrailPolicy::decide(const InventoryState& state, const PriceVector& p_prev,
                                       int epoch, Rng& rng) const {
  (void)rng;
  std::vector<double> targets(catalog_.size(), 0.0);
  for (std::size_t i = 0; i < catalog_.size(); ++i) {
    targets[i] = target_demand(static_cast<double>(state.on_hand[i]), epoch,
                               config_.num_epochs, config_.rho);
  }
  return solve_price_for_targets(targets, state, catalog_, profile_, config_, p_prev, params_);
}

}  // namespace pricelab
