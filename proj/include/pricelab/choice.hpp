#pragma once

#include <optional>
#include <vector>

#include "pricelab/catalog.hpp"

namespace pricelab {

// Exhaustive basket enumeration is capped at 16 available SKUs (65536
// subsets); larger availability sets must pass max_basket_size.
inline constexpr std::size_t kMaxExhaustiveSkus = 16;

struct Basket {
  std::vector<std::size_t> items;  // sorted, unique SKU indices; empty = no purchase

  bool contains(std::size_t i) const;
};

struct BasketDistribution {
  std::vector<Basket> baskets;
  std::vector<double> probabilities;
};

// sum_{i in b} (alpha_i - beta_i p_i) + gamma * max(0, |b| - 1).
// The empty basket is the outside option and scores exactly 0.
double basket_utility(const Basket& basket, const PriceVector& prices, const SkuCatalog& catalog);

// Every subset of `available` with |b| <= max_basket_size (all of them when
// absent), in canonical order: by size, then lexicographic. The empty basket
// always comes first.
std::vector<Basket> enumerate_baskets(const std::vector<std::size_t>& available,
                                      std::optional<int> max_basket_size = std::nullopt);

// Max-shifted softmax; invariant under adding a constant to every entry.
std::vector<double> stable_softmax(const std::vector<double>& utilities);

BasketDistribution basket_probabilities(const PriceVector& prices,
                                        const std::vector<std::size_t>& available,
                                        const SkuCatalog& catalog,
                                        std::optional<int> max_basket_size = std::nullopt);

// Per-arrival purchase probability d_i = sum of P(b) over baskets containing
// i. Always one entry per catalog SKU; zero for unavailable SKUs.
std::vector<double> expected_item_demand(const PriceVector& prices,
                                         const std::vector<std::size_t>& available,
                                         const SkuCatalog& catalog,
                                         std::optional<int> max_basket_size = std::nullopt);

// Expected units sold over an epoch: D_i = lambda * dt * d_i.
std::vector<double> expected_demand(const PriceVector& prices,
                                    const std::vector<std::size_t>& available,
                                    const SkuCatalog& catalog, double lambda, double dt,
                                    std::optional<int> max_basket_size = std::nullopt);

// Reusable demand kernel for a fixed availability set: enumerates the baskets
// once and recomputes probabilities in place as prices change. Root-finding
// and lattice searches evaluate demand thousands of times per decision; the
// free functions above would reallocate the power set on every call. Performs
// the exact same operations as expected_item_demand, so results are bitwise
// interchangeable.
class DemandEvaluator {
 public:
  DemandEvaluator(const std::vector<std::size_t>& available, const SkuCatalog& catalog,
                  std::optional<int> max_basket_size = std::nullopt);

  // Per-SKU d_i at these prices; the reference stays valid until the next call.
  const std::vector<double>& item_demand(const PriceVector& prices);

 private:
  const SkuCatalog& catalog_;
  std::vector<Basket> baskets_;
  std::vector<double> utilities_;
  std::vector<double> demand_;
};

}  // namespace pricelab
