#include "doctest.h"

#include <cmath>

#include "pricelab/simulator.hpp"
#include "stat_utils.hpp"

using namespace pricelab;

namespace {

SkuCatalog single_sku(double alpha, double beta, double cost = 0.0, double salvage = 0.0,
                      Units stock = 10, double commission = 0.0) {
  SkuCatalog catalog;
  catalog.commission = commission;
  catalog.skus.push_back({"only", alpha, beta, cost, salvage, stock, std::nullopt});
  return catalog;
}

EpisodeConfig basic_config(int num_epochs, double price_ceiling = 10.0) {
  EpisodeConfig config;
  config.num_epochs = num_epochs;
  config.epoch_length = 1.0;
  config.rho = 0.9;
  config.delta_max = 100.0;
  config.price_floor = 0.0;
  config.price_ceiling = price_ceiling;
  return config;
}

// Deliberately violates the inertia contract at the second epoch.
class RoguePolicy : public Policy {
 public:
  explicit RoguePolicy(std::size_t n) : n_(n) {}
  std::string_view name() const override { return "rogue"; }
  PolicyDecision decide(const InventoryState& state, const PriceVector& p_prev, int,
                        Rng&) const override {
    PolicyDecision decision;
    decision.prices = p_prev;
    if (state.epoch >= 1) decision.prices.assign(n_, p_prev[0] + 1000.0);
    return decision;
  }

 private:
  std::size_t n_;
};

}  // namespace

TEST_CASE("epoch with zero arrival rate changes nothing") {
  const SkuCatalog catalog = single_sku(1.0, 1.0, 0.2, 0.5, 7);
  const EpisodeConfig config = basic_config(3);
  const auto profile = constant_profile(0.0, 3.0);
  Rng rng(1);
  const auto [record, next] =
      simulate_epoch(initial_state(catalog), {2.0}, catalog, profile, config, rng);
  CHECK(record.arrivals == 0);
  CHECK(record.realized_sales == std::vector<Units>{0});
  CHECK(record.profit == 0.0);
  CHECK(record.revenue == 0.0);
  CHECK(next.on_hand == std::vector<Units>{7});
  CHECK(next.epoch == 1);
}

TEST_CASE("arrivals after a stockout buy nothing") {
  // huge alpha: every arrival takes the item while stock lasts
  const SkuCatalog catalog = single_sku(50.0, 1.0, 0.0, 0.0, 1);
  EpisodeConfig config = basic_config(1);
  config.price_ceiling = 60.0;
  const auto profile = constant_profile(5.0, 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto [record, next] =
        simulate_epoch(initial_state(catalog), {1.0}, catalog, profile, config, rng);
    CHECK(record.realized_sales[0] <= 1);
    if (record.arrivals >= 1) CHECK(record.realized_sales[0] == 1);
    CHECK(next.on_hand[0] >= 0);
  }
}

TEST_CASE("epoch profit uses the commission-adjusted margin") {
  // p=2, c=0.5, eta=0.1: margin per unit 0.9*2 - 0.5 = 1.3
  const SkuCatalog catalog = single_sku(8.0, 1.0, 0.5, 0.0, 1000, 0.1);
  EpisodeConfig config = basic_config(1);
  config.price_ceiling = 20.0;
  const auto profile = constant_profile(30.0, 1.0);
  Rng rng(3);
  const auto [record, next] =
      simulate_epoch(initial_state(catalog), {2.0}, catalog, profile, config, rng);
  (void)next;
  const double sold = static_cast<double>(record.realized_sales[0]);
  CHECK(record.profit == sold * (0.9 * 2.0 - 0.5));
  CHECK(record.revenue == sold * 0.9 * 2.0);
  if (record.realized_sales[0] == 3) CHECK(record.profit == doctest::Approx(3.9));
}

TEST_CASE("terminal salvage sign conventions") {
  SkuCatalog catalog = single_sku(1.0, 1.0, 0.0, 0.5, 4);
  InventoryState state = initial_state(catalog);
  state.epoch = 1;
  CHECK(terminal_salvage(state, catalog) == doctest::Approx(2.0));
  state.on_hand = {0};
  CHECK(terminal_salvage(state, catalog) == 0.0);
  catalog.skus[0].salvage_penalty = -1.0;  // salvage yields revenue
  state.on_hand = {2};
  CHECK(terminal_salvage(state, catalog) == doctest::Approx(-2.0));
}

TEST_CASE("episode with no demand is pure salvage") {
  const SkuCatalog catalog = single_sku(1.0, 1.0, 0.0, 0.7, 9);
  EpisodeConfig config = basic_config(1);
  config.initial_prices = PriceVector{1.0};
  const auto profile = constant_profile(0.0, 1.0);
  const FixedPricePolicy policy({1.0}, catalog, config);
  Rng rng(5);
  const EpisodeResult result = run_episode(catalog, config, policy, profile, rng);
  CHECK(result.salvage_loss == doctest::Approx(0.7 * 9));
  CHECK(result.total_profit == doctest::Approx(-0.7 * 9));
}

TEST_CASE("fixed seed reproduces an episode exactly") {
  const SkuCatalog catalog = single_sku(1.5, 0.8, 0.2, 0.3, 40);
  EpisodeConfig config = basic_config(6);
  config.delta_max = 0.4;
  config.initial_prices = PriceVector{1.2};
  const auto profile = constant_profile(4.0, 6.0);
  const GuardrailPolicy policy(catalog, profile, config);
  Rng a(777), b(777);
  const EpisodeResult first = run_episode(catalog, config, policy, profile, a);
  const EpisodeResult second = run_episode(catalog, config, policy, profile, b);
  CHECK(first.total_profit == second.total_profit);
  CHECK(first.salvage_loss == second.salvage_loss);
  REQUIRE(first.records.size() == second.records.size());
  for (std::size_t t = 0; t < first.records.size(); ++t) {
    CHECK(first.records[t].prices == second.records[t].prices);
    CHECK(first.records[t].realized_sales == second.records[t].realized_sales);
    CHECK(first.records[t].arrivals == second.records[t].arrivals);
  }
}

TEST_CASE("per-sku unit conservation and exact accounting") {
  const SkuCatalog base = single_sku(1.5, 0.8, 0.2, 0.3, 25);
  SkuCatalog catalog = base;
  catalog.skus.push_back({"second", 0.8, 1.1, 0.1, 0.2, 12, 0.15});
  catalog.commission = 0.08;
  EpisodeConfig config = basic_config(5);
  config.delta_max = 0.5;
  config.initial_prices = PriceVector{1.0, 0.8};
  const auto profile = constant_profile(6.0, 5.0);
  const GuardrailPolicy policy(catalog, profile, config);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(derive_seed(1234, seed));
    const EpisodeResult result = run_episode(catalog, config, policy, profile, rng);
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      Units sold = 0;
      for (const EpochRecord& record : result.records) {
        CHECK(record.realized_sales[i] <= record.inventory_before[i]);
        CHECK(record.inventory_after[i] ==
              record.inventory_before[i] - record.realized_sales[i]);
        CHECK(record.inventory_after[i] >= 0);
        const double eta = catalog.effective_commission(i);
        (void)eta;
        sold += record.realized_sales[i];
      }
      CHECK(catalog.skus[i].initial_inventory ==
            sold + result.records.back().inventory_after[i]);
    }
    // profit identity per record, exact
    for (const EpochRecord& record : result.records) {
      double expected_profit = 0.0;
      for (std::size_t i = 0; i < catalog.size(); ++i) {
        const double eta = catalog.effective_commission(i);
        expected_profit += static_cast<double>(record.realized_sales[i]) *
                           ((1.0 - eta) * record.prices[i] - catalog.skus[i].unit_cost);
      }
      CHECK(record.profit == expected_profit);
    }
    double total = 0.0;
    for (const EpochRecord& record : result.records) total += record.profit;
    CHECK(result.total_profit == total - result.salvage_loss);
  }
}

TEST_CASE("ample inventory: mean realized sales converge to expected demand") {
  const SkuCatalog catalog = single_sku(0.5, 1.0, 0.0, 0.0, 1000000);
  EpisodeConfig config = basic_config(1);
  config.initial_prices = PriceVector{1.0};
  const auto profile = constant_profile(8.0, 1.0);
  const FixedPricePolicy policy({1.0}, catalog, config);

  const int episodes = 10000;
  const auto results = run_episode_batch(catalog, config, policy, profile, episodes, 99);
  double mean_sales = 0.0;
  for (const auto& r : results)
    mean_sales += static_cast<double>(r.records[0].realized_sales[0]) / episodes;
  const double expected = results[0].records[0].expected_sales[0];
  // sales are a Poisson thinning: variance equals the mean
  const double se = std::sqrt(expected / episodes);
  CHECK(std::fabs(mean_sales - expected) <= 3.0 * se);
}

TEST_CASE("epochs freeze the rate read at their start time") {
  // dead first window, busy second; epochs align with the windows
  const SkuCatalog catalog = single_sku(3.0, 0.5, 0.0, 0.0, 1000000);
  EpisodeConfig config = basic_config(2);
  config.epoch_length = 30.0;
  config.initial_prices = PriceVector{1.0};
  ArrivalRateProfile profile;
  profile.window_length = 30.0;
  profile.rates = {0.0, 4.0};
  const FixedPricePolicy policy({1.0}, catalog, config);

  double second_epoch_arrivals = 0.0;
  const int episodes = 400;
  const auto results = run_episode_batch(catalog, config, policy, profile, episodes, 55);
  for (const auto& r : results) {
    CHECK(r.records[0].arrivals == 0);
    CHECK(r.records[0].expected_sales[0] == 0.0);
    second_epoch_arrivals += static_cast<double>(r.records[1].arrivals);
  }
  const double mean = second_epoch_arrivals / episodes;
  const double expected = 4.0 * 30.0;
  CHECK(std::fabs(mean - expected) <= 3.0 * std::sqrt(expected / episodes));
}

TEST_CASE("the horizon must stay inside the profile coverage") {
  const SkuCatalog catalog = single_sku(1.0, 1.0, 0.0, 0.0, 5);
  EpisodeConfig config = basic_config(3);
  config.epoch_length = 30.0;
  config.initial_prices = PriceVector{1.0};
  ArrivalRateProfile profile;
  profile.window_length = 30.0;
  profile.rates = {1.0, 1.0};  // covers 60 of the 90 minutes
  const FixedPricePolicy policy({1.0}, catalog, config);
  Rng rng(4);
  CHECK_THROWS_WITH_AS(run_episode(catalog, config, policy, profile, rng),
                       doctest::Contains("horizon"), Error);
}

TEST_CASE("a policy breaking the inertia contract aborts the episode") {
  const SkuCatalog catalog = single_sku(1.0, 1.0, 0.0, 0.0, 10);
  EpisodeConfig config = basic_config(3);
  config.delta_max = 0.5;
  config.initial_prices = PriceVector{1.0};
  const auto profile = constant_profile(2.0, 3.0);
  const RoguePolicy rogue(1);
  Rng rng(11);
  CHECK_THROWS_AS(run_episode(catalog, config, rogue, profile, rng), ContractViolation);
}

TEST_CASE("evaluate_policy summarizes degenerate and single runs") {
  const SkuCatalog catalog = single_sku(1.0, 1.0, 0.0, 0.25, 8);
  EpisodeConfig config = basic_config(2);
  config.initial_prices = PriceVector{1.0};
  const auto profile = constant_profile(0.0, 2.0);
  const FixedPricePolicy policy({1.0}, catalog, config);

  const auto eval = evaluate_policy(catalog, config, policy, profile, 40, 5);
  CHECK(eval.mean_profit == -0.25 * 8);  // exact: every episode identical
  CHECK(eval.stderr_profit == 0.0);
  CHECK(eval.mean_leftover[0] == 8.0);
  CHECK(eval.mean_units_unsold == 8.0);

  const auto one = evaluate_policy(catalog, config, policy, profile, 1, 5);
  CHECK(one.mean_profit == -0.25 * 8);
  CHECK(one.stderr_profit == 0.0);
}

TEST_CASE("parallel batch is bitwise identical to the serial reference") {
  SkuCatalog catalog = single_sku(1.2, 0.9, 0.1, 0.2, 30);
  catalog.skus.push_back({"b", 0.9, 1.2, 0.2, 0.1, 20, std::nullopt});
  catalog.gamma = 0.25;
  EpisodeConfig config = basic_config(4);
  config.delta_max = 0.6;
  config.initial_prices = PriceVector{1.1, 0.9};
  const auto profile = constant_profile(5.0, 4.0);
  const GuardrailPolicy policy(catalog, profile, config);

  const auto serial = run_episode_batch_serial(catalog, config, policy, profile, 64, 2718);
  const auto parallel = run_episode_batch(catalog, config, policy, profile, 64, 2718);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t j = 0; j < serial.size(); ++j) {
    CHECK(serial[j].total_profit == parallel[j].total_profit);
    CHECK(serial[j].salvage_loss == parallel[j].salvage_loss);
    REQUIRE(serial[j].records.size() == parallel[j].records.size());
    for (std::size_t t = 0; t < serial[j].records.size(); ++t) {
      CHECK(serial[j].records[t].prices == parallel[j].records[t].prices);
      CHECK(serial[j].records[t].realized_sales == parallel[j].records[t].realized_sales);
      CHECK(serial[j].records[t].profit == parallel[j].records[t].profit);
    }
  }
}
