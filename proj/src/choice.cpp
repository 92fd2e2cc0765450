#include "pricelab/choice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pricelab {

bool Basket::contains(std::size_t i) const {
  return std::binary_search(items.begin(), items.end(), i);
}

double basket_utility(const Basket& basket, const PriceVector& prices,
                      const SkuCatalog& catalog) {
  if (basket.items.empty()) return 0.0;
  double utility = 0.0;
  for (std::size_t i : basket.items) {
    if (i >= catalog.size() || i >= prices.size())
      throw Error("basket_utility: item index " + std::to_string(i) + " out of range");
    const Sku& sku = catalog.skus[i];
    utility += sku.alpha - sku.beta * prices[i];
  }
  utility += catalog.gamma * static_cast<double>(basket.items.size() - 1);
  return utility;
}

std::vector<Basket> enumerate_baskets(const std::vector<std::size_t>& available,
                                      std::optional<int> max_basket_size) {
  std::vector<std::size_t> pool = available;
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  if (max_basket_size && *max_basket_size < 0)
    throw Error("enumerate_baskets: max_basket_size must be >= 0");
  if (!max_basket_size && pool.size() > kMaxExhaustiveSkus)
    throw Error("enumerate_baskets: " + std::to_string(pool.size()) +
                " available SKUs exceeds the exhaustive cap of " +
                std::to_string(kMaxExhaustiveSkus) + "; pass max_basket_size");

  const std::size_t cap =
      max_basket_size ? std::min<std::size_t>(*max_basket_size, pool.size()) : pool.size();

  std::vector<Basket> baskets;
  baskets.push_back(Basket{});  // outside option first

  // Size-by-size combination walk keeps the canonical order: smaller baskets
  // first, lexicographic within a size.
  std::vector<std::size_t> pick;
  for (std::size_t k = 1; k <= cap; ++k) {
    pick.resize(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    for (;;) {
      Basket basket;
      basket.items.reserve(k);
      for (std::size_t idx : pick) basket.items.push_back(pool[idx]);
      baskets.push_back(std::move(basket));

      // advance to the next k-combination of pool indices
      std::size_t slot = k;
      while (slot > 0 && pick[slot - 1] == pool.size() - k + slot - 1) --slot;
      if (slot == 0) break;
      ++pick[slot - 1];
      for (std::size_t i = slot; i < k; ++i) pick[i] = pick[i - 1] + 1;
    }
  }
  return baskets;
}

std::vector<double> stable_softmax(const std::vector<double>& utilities) {
  std::vector<double> probabilities(utilities.size());
  if (utilities.empty()) return probabilities;
  const double shift = *std::max_element(utilities.begin(), utilities.end());
  double total = 0.0;
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    probabilities[i] = std::exp(utilities[i] - shift);
    total += probabilities[i];
  }
  for (double& p : probabilities) p /= total;
  return probabilities;
}

BasketDistribution basket_probabilities(const PriceVector& prices,
                                        const std::vector<std::size_t>& available,
                                        const SkuCatalog& catalog,
                                        std::optional<int> max_basket_size) {
  BasketDistribution dist;
  dist.baskets = enumerate_baskets(available, max_basket_size);
  std::vector<double> utilities(dist.baskets.size());
  for (std::size_t b = 0; b < dist.baskets.size(); ++b)
    utilities[b] = basket_utility(dist.baskets[b], prices, catalog);
  dist.probabilities = stable_softmax(utilities);
  return dist;
}

std::vector<double> expected_item_demand(const PriceVector& prices,
                                         const std::vector<std::size_t>& available,
                                         const SkuCatalog& catalog,
                                         std::optional<int> max_basket_size) {
  DemandEvaluator evaluator(available, catalog, max_basket_size);
  return evaluator.item_demand(prices);
}

DemandEvaluator::DemandEvaluator(const std::vector<std::size_t>& available,
                                 const SkuCatalog& catalog,
                                 std::optional<int> max_basket_size)
    : catalog_(catalog),
      baskets_(enumerate_baskets(available, max_basket_size)),
      utilities_(baskets_.size()),
      demand_(catalog.size()) {}

const std::vector<double>& DemandEvaluator::item_demand(const PriceVector& prices) {
  // same operation order as basket_probabilities + the summation in
  // expected_item_demand, without the per-call allocations
  for (std::size_t b = 0; b < baskets_.size(); ++b)
    utilities_[b] = basket_utility(baskets_[b], prices, catalog_);
  const double shift = *std::max_element(utilities_.begin(), utilities_.end());
  double total = 0.0;
  for (double& u : utilities_) {
    u = std::exp(u - shift);
    total += u;
  }
  std::fill(demand_.begin(), demand_.end(), 0.0);
  for (std::size_t b = 0; b < baskets_.size(); ++b) {
    const double probability = utilities_[b] / total;
    for (std::size_t i : baskets_[b].items) demand_[i] += probability;
  }
  return demand_;
}

std::vector<double> expected_demand(const PriceVector& prices,
                                    const std::vector<std::size_t>& available,
                                    const SkuCatalog& catalog, double lambda, double dt,
                                    std::optional<int> max_basket_size) {
  if (!(lambda >= 0.0)) throw Error("expected_demand: lambda must be >= 0");
  if (!(dt > 0.0)) throw Error("expected_demand: dt must be > 0");
  std::vector<double> demand = expected_item_demand(prices, available, catalog, max_basket_size);
  for (double& d : demand) d *= lambda * dt;
  return demand;
}

}  // namespace pricelab
