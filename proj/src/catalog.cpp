#include "pricelab/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <limits>
#include <unordered_set>

namespace pricelab {

ValidationError::ValidationError(std::vector<std::string> issues)
    : Error([&issues] {
        std::ostringstream out;
        out << "validation failed:";
        for (const auto& issue : issues) out << "\n  - " << issue;
        return out.str();
      }()),
      issues_(std::move(issues)) {}

namespace {

std::string sku_label(const Sku& sku, std::size_t index) {
  std::ostringstream out;
  out << "sku[" << index << "]";
  if (!sku.id.empty()) out << " '" << sku.id << "'";
  return out.str();
}

}  // namespace

std::vector<std::string> catalog_violations(const SkuCatalog& catalog) {
  std::vector<std::string> issues;
  if (catalog.skus.empty()) issues.push_back("catalog must contain at least one SKU");
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < catalog.skus.size(); ++i) {
    const Sku& sku = catalog.skus[i];
    const std::string label = sku_label(sku, i);
    if (sku.id.empty()) issues.push_back(label + ": id must be non-empty");
    if (sku.id.find(',') != std::string::npos || sku.id.find('\n') != std::string::npos)
      issues.push_back(label + ": id must not contain ',' or newline");
    if (!sku.id.empty() && !seen.insert(sku.id).second)
      issues.push_back("duplicate id '" + sku.id + "'");
    if (!std::isfinite(sku.alpha)) issues.push_back(label + ": alpha must be finite");
    if (!(sku.beta > 0.0) || !std::isfinite(sku.beta))
      issues.push_back(label + ": beta must be positive");
    if (!(sku.unit_cost >= 0.0) || !std::isfinite(sku.unit_cost))
      issues.push_back(label + ": unit_cost must be >= 0");
    if (!std::isfinite(sku.salvage_penalty))
      issues.push_back(label + ": salvage_penalty must be finite");
    if (sku.initial_inventory < 0)
      issues.push_back(label + ": initial_inventory must be >= 0");
    if (sku.commission) {
      if (!(*sku.commission >= 0.0)) issues.push_back(label + ": commission must be >= 0");
      if (!(*sku.commission < 1.0)) issues.push_back(label + ": commission must be < 1");
    }
  }
  if (!(catalog.commission >= 0.0)) issues.push_back("commission must be >= 0");
  if (!(catalog.commission < 1.0)) issues.push_back("commission must be < 1");
  if (!std::isfinite(catalog.gamma)) issues.push_back("gamma must be finite");
  return issues;
}

const SkuCatalog& validate_catalog(const SkuCatalog& catalog) {
  auto issues = catalog_violations(catalog);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return catalog;
}

std::vector<std::string> episode_config_violations(const EpisodeConfig& config,
                                                   std::size_t num_skus) {
  std::vector<std::string> issues;
  if (config.num_epochs < 1) issues.push_back("num_epochs must be >= 1");
  if (!(config.epoch_length > 0.0) || !std::isfinite(config.epoch_length))
    issues.push_back("epoch_length must be > 0");
  if (!(config.rho > 0.0 && config.rho < 1.0)) issues.push_back("rho must be in (0, 1)");
  if (!(config.delta_max >= 0.0)) issues.push_back("delta_max must be >= 0");
  if (!(config.price_floor >= 0.0)) issues.push_back("price_floor must be >= 0");
  if (!(config.price_ceiling > config.price_floor))
    issues.push_back("price_ceiling must be > price_floor");
  if (config.initial_prices) {
    if (config.initial_prices->size() != num_skus) {
      issues.push_back("initial_prices must list one price per SKU");
    } else {
      for (std::size_t i = 0; i < num_skus; ++i) {
        const double p = (*config.initial_prices)[i];
        if (!(p >= config.price_floor && p <= config.price_ceiling)) {
          std::ostringstream out;
          out << "initial_prices[" << i << "] must lie in [price_floor, price_ceiling]";
          issues.push_back(out.str());
        }
      }
    }
  }
  return issues;
}

const EpisodeConfig& validate_episode_config(const EpisodeConfig& config, std::size_t num_skus) {
  auto issues = episode_config_violations(config, num_skus);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return config;
}

std::vector<std::size_t> availability_set(const InventoryState& state) {
  std::vector<std::size_t> available;
  for (std::size_t i = 0; i < state.on_hand.size(); ++i) {
    if (state.on_hand[i] > 0) available.push_back(i);
  }
  return available;
}

InventoryState initial_state(const SkuCatalog& catalog) {
  InventoryState state;
  state.epoch = 0;
  state.on_hand.reserve(catalog.size());
  for (const Sku& sku : catalog.skus) state.on_hand.push_back(sku.initial_inventory);
  return state;
}

double default_price_ceiling(const SkuCatalog& catalog) {
  double choke = std::numeric_limits<double>::lowest();
  for (const Sku& sku : catalog.skus) choke = std::max(choke, sku.alpha / sku.beta);
  return 10.0 * choke;
}

}  // namespace pricelab
