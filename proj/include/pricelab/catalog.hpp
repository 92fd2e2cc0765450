#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pricelab/errors.hpp"

namespace pricelab {

using PriceVector = std::vector<double>;
using Units = std::int64_t;

struct Sku {
  std::string id;
  double alpha = 0.0;            // utility intercept
  double beta = 1.0;             // price sensitivity, must be > 0
  double unit_cost = 0.0;
  double salvage_penalty = 0.0;  // per unit unsold at the horizon; negative = salvage revenue
  Units initial_inventory = 0;
  std::optional<double> commission;  // overrides the catalog-wide rate
};

struct SkuCatalog {
  std::vector<Sku> skus;
  double commission = 0.0;  // platform fraction of revenue, [0, 1)
  double gamma = 0.0;       // basket interaction: > 0 complements, < 0 substitutes

  std::size_t size() const { return skus.size(); }

  double effective_commission(std::size_t i) const {
    return skus[i].commission.value_or(commission);
  }
};

// on_hand at the start of epoch (epoch + 1); epoch counts completed epochs.
struct InventoryState {
  int epoch = 0;  // 0..K
  std::vector<Units> on_hand;
};

struct EpisodeConfig {
  int num_epochs = 1;          // K; the horizon is num_epochs * epoch_length
  double epoch_length = 1.0;   // minutes
  double rho = 0.9;            // safety factor, (0, 1)
  double delta_max = 1.0;      // max price move between consecutive epochs
  double price_floor = 0.0;
  double price_ceiling = 1.0;
  std::uint64_t rng_seed = 0;
  // p_0; when absent the myopic no-inertia solution on the default lattice is used
  std::optional<PriceVector> initial_prices;
};

std::vector<std::string> catalog_violations(const SkuCatalog& catalog);

// Returns its argument iff every invariant holds; otherwise throws a
// ValidationError naming every violation.
const SkuCatalog& validate_catalog(const SkuCatalog& catalog);

std::vector<std::string> episode_config_violations(const EpisodeConfig& config,
                                                   std::size_t num_skus);
const EpisodeConfig& validate_episode_config(const EpisodeConfig& config, std::size_t num_skus);

// Indices with on_hand > 0, ascending.
std::vector<std::size_t> availability_set(const InventoryState& state);

InventoryState initial_state(const SkuCatalog& catalog);

// 10x the largest choke price alpha_i / beta_i. May come out non-positive for
// all-negative intercepts; callers must reject that before use.
double default_price_ceiling(const SkuCatalog& catalog);

}  // namespace pricelab
