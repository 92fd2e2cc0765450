#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pricelab/policies.hpp"

namespace pricelab {

struct EpochRecord {
  int epoch = 0;  // 1-based
  PriceVector prices;
  std::int64_t arrivals = 0;
  std::vector<Units> realized_sales;
  std::vector<double> expected_sales;  // lambda * dt * d_i at the epoch-start availability
  double revenue = 0.0;                // net of commission
  double profit = 0.0;
  std::vector<Units> inventory_before;
  std::vector<Units> inventory_after;
};

struct EpisodeResult {
  std::vector<EpochRecord> records;
  double salvage_loss = 0.0;
  double total_profit = 0.0;  // sum of epoch profits minus salvage_loss
};

// One epoch: draw the Poisson arrival count, then walk arrivals one by one,
// each choosing a basket from the MNL distribution over the SKUs still in
// stock at that moment. Inventory can never go negative because sold-out SKUs
// drop out of the availability set before the next draw.
std::pair<EpochRecord, InventoryState> simulate_epoch(const InventoryState& state,
                                                      const PriceVector& prices,
                                                      const SkuCatalog& catalog,
                                                      const ArrivalRateProfile& profile,
                                                      const EpisodeConfig& config, Rng& rng);

// sum_i s_i * leftover_i, reported as a loss (negative s_i yields revenue).
double terminal_salvage(const InventoryState& final_state, const SkuCatalog& catalog);

// p_0: the configured initial prices, or the myopic no-inertia solution on
// the default 101-point lattice when the config leaves them out.
PriceVector resolve_initial_prices(const SkuCatalog& catalog, const EpisodeConfig& config,
                                   const ArrivalRateProfile& profile);

EpisodeResult run_episode(const SkuCatalog& catalog, const EpisodeConfig& config,
                          const Policy& policy, const ArrivalRateProfile& profile, Rng& rng);

// Batch kernels. Episode j draws from the stream seeded with
// derive_seed(base_seed, j), and results land in slot j, so the parallel
// kernel is bitwise identical to the serial reference at any thread count.
std::vector<EpisodeResult> run_episode_batch(const SkuCatalog& catalog,
                                             const EpisodeConfig& config, const Policy& policy,
                                             const ArrivalRateProfile& profile, int num_episodes,
                                             std::uint64_t base_seed);
std::vector<EpisodeResult> run_episode_batch_serial(const SkuCatalog& catalog,
                                                    const EpisodeConfig& config,
                                                    const Policy& policy,
                                                    const ArrivalRateProfile& profile,
                                                    int num_episodes, std::uint64_t base_seed);

struct PolicyEvaluation {
  int num_episodes = 0;
  double mean_profit = 0.0;
  double stderr_profit = 0.0;  // sample standard error; 0 for a single episode
  double mean_salvage_loss = 0.0;
  double mean_units_unsold = 0.0;
  std::vector<double> mean_leftover;  // per SKU
};

PolicyEvaluation summarize(const std::vector<EpisodeResult>& results, std::size_t num_skus);

PolicyEvaluation evaluate_policy(const SkuCatalog& catalog, const EpisodeConfig& config,
                                 const Policy& policy, const ArrivalRateProfile& profile,
                                 int num_episodes, std::uint64_t base_seed, bool parallel = true);

}  // namespace pricelab
