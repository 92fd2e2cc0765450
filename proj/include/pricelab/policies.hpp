#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "pricelab/arrivals.hpp"
#include "pricelab/catalog.hpp"
#include "pricelab/choice.hpp"

namespace pricelab {

struct PolicyDiagnostics {
  std::vector<double> target_demand;          // guardrail only, else empty
  std::vector<double> achieved_demand;        // expected demand at the decided prices
  std::vector<int> solver_iterations;         // bisection steps per SKU
  std::vector<std::uint8_t> clamped_bracket;  // target unreachable inside [floor, ceiling]
  std::vector<std::uint8_t> clamped_inertia;  // inertia band moved the solved price
};

struct PolicyDecision {
  PriceVector prices;
  PolicyDiagnostics diagnostics;
};

// Pricing policies are pure: decide() may not mutate shared state, so one
// policy instance can serve many concurrent episodes. `rng` is the calling
// episode's stream; deterministic policies leave it untouched.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const = 0;
  // epoch is 1-based and state.epoch == epoch - 1 on entry.
  virtual PolicyDecision decide(const InventoryState& state, const PriceVector& p_prev,
                                int epoch, Rng& rng) const = 0;
};

// rho * inventory / (K - t + 1); zero at zero stock.
double target_demand(double inventory, int epoch, int num_epochs, double rho);

// Clamp each coordinate into [p_prev - delta_max, p_prev + delta_max], then
// into [price_floor, price_ceiling]. Idempotent.
PriceVector apply_inertia(const PriceVector& p_new, const PriceVector& p_prev, double delta_max,
                          double price_floor, double price_ceiling);

struct SolverParams {
  double demand_tol = 0.0;  // <= 0 means the default 1e-6 * lambda * dt
  int max_sweeps = 50;
  int max_bisection_iters = 200;
};

// Non-convergence carries the best iterate and its demand residuals.
class SolverError : public Error {
 public:
  SolverError(const std::string& message, PriceVector best_prices,
              std::vector<double> residuals);

  const PriceVector& best_prices() const { return best_prices_; }
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  PriceVector best_prices_;
  std::vector<double> residuals_;
};

// Gauss-Seidel over SKUs, one bisection per coordinate on [floor, ceiling]
// (expected demand is strictly decreasing in own price). Converged when every
// available SKU is either within demand_tol of its target or clamped at a
// bracket end; finishes with the inertia clamp toward p_prev.
PolicyDecision solve_price_for_targets(const std::vector<double>& targets,
                                       const InventoryState& state, const SkuCatalog& catalog,
                                       const ArrivalRateProfile& profile,
                                       const EpisodeConfig& config, const PriceVector& p_prev,
                                       const SolverParams& params = {});

// sum_i lambda_dt * d_i * ((1 - eta_i) p_i - c_i); the one-epoch objective.
double epoch_profit_from_demand(const std::vector<double>& demand,
                                const std::vector<std::size_t>& available,
                                const SkuCatalog& catalog, double lambda_dt,
                                const PriceVector& prices);
double expected_epoch_profit(const PriceVector& prices,
                             const std::vector<std::size_t>& available,
                             const SkuCatalog& catalog, double lambda_dt);

// points uniform values on [floor, ceiling]; endpoints exact.
std::vector<double> price_grid(double floor, double ceiling, int points);

struct LatticeParams {
  int grid_points = 101;
  int ascent_passes = 5;  // cyclic coordinate ascent when more than 3 SKUs are active
};

// Argmax of `score` over the lattice restricted to the `active` coordinates;
// inactive coordinates stay at base[i]. Exhaustive for up to 3 active SKUs,
// cyclic coordinate ascent from base (snapped to the grid) otherwise. Ties
// break toward the lexicographically lowest price vector, which both the
// myopic and the value-based policy rely on for reproducible argmax equality.
template <typename ScoreFn>
PriceVector maximize_on_lattice(const std::vector<std::size_t>& active, const PriceVector& base,
                                const std::vector<double>& grid, ScoreFn&& score,
                                int ascent_passes = 5) {
  PriceVector best = base;
  if (active.empty() || grid.empty()) return best;

  if (active.size() <= 3) {
    std::vector<std::size_t> odometer(active.size(), 0);
    PriceVector candidate = base;
    double best_score = -std::numeric_limits<double>::infinity();
    bool first = true;
    for (;;) {
      for (std::size_t k = 0; k < active.size(); ++k) candidate[active[k]] = grid[odometer[k]];
      const double s = score(candidate);
      if (first || s > best_score) {
        best = candidate;
        best_score = s;
        first = false;
      }
      // increment with active[0] most significant: ascending lexicographic
      std::size_t k = active.size();
      while (k > 0) {
        if (++odometer[k - 1] < grid.size()) break;
        odometer[k - 1] = 0;
        --k;
      }
      if (k == 0) break;
    }
    return best;
  }

  PriceVector current = base;
  for (std::size_t k : active) {
    // snap to the nearest grid point, ties toward the lower price
    std::size_t nearest = 0;
    double nearest_dist = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double dist = std::fabs(grid[g] - current[k]);
      if (dist < nearest_dist) {
        nearest_dist = dist;
        nearest = g;
      }
    }
    current[k] = grid[nearest];
  }
  for (int pass = 0; pass < ascent_passes; ++pass) {
    bool moved = false;
    for (std::size_t k : active) {
      double best_score = -std::numeric_limits<double>::infinity();
      double best_value = grid.front();
      PriceVector candidate = current;
      for (double g : grid) {
        candidate[k] = g;
        const double s = score(candidate);
        if (s > best_score) {
          best_score = s;
          best_value = g;
        }
      }
      if (best_value != current[k]) {
        current[k] = best_value;
        moved = true;
      }
    }
    if (!moved) break;
  }
  return current;
}

class FixedPricePolicy : public Policy {
 public:
  FixedPricePolicy(PriceVector fixed_prices, SkuCatalog catalog, EpisodeConfig config);

  std::string_view name() const override { return "fixed"; }
  PolicyDecision decide(const InventoryState& state, const PriceVector& p_prev, int epoch,
                        Rng& rng) const override;

 private:
  PriceVector fixed_prices_;
  SkuCatalog catalog_;
  EpisodeConfig config_;
};

// Grid search maximizing the one-epoch expected profit, then the inertia
// clamp. Deterministic lowest-lexicographic tie-break.
class MyopicPolicy : public Policy {
 public:
  MyopicPolicy(SkuCatalog catalog, ArrivalRateProfile profile, EpisodeConfig config,
               LatticeParams params = {});

  std::string_view name() const override { return "myopic"; }
  PolicyDecision decide(const InventoryState& state, const PriceVector& p_prev, int epoch,
                        Rng& rng) const override;

 private:
  SkuCatalog catalog_;
  ArrivalRateProfile profile_;
  EpisodeConfig config_;
  LatticeParams params_;
};

// Safety-adjusted target demand -> price root-finding -> inertia clamp.
class GuardrailPolicy : public Policy {
 public:
  GuardrailPolicy(SkuCatalog catalog, ArrivalRateProfile profile, EpisodeConfig config,
                  SolverParams params = {});

  std::string_view name() const override { return "guardrail"; }
  PolicyDecision decide(const InventoryState& state, const PriceVector& p_prev, int epoch,
                        Rng& rng) const override;

 private:
  SkuCatalog catalog_;
  ArrivalRateProfile profile_;
  EpisodeConfig config_;
  SolverParams params_;
};

}  // namespace pricelab
