#include "doctest.h"

#include <cmath>

#include "pricelab/policies.hpp"
#include "oracles.hpp"

using namespace pricelab;

namespace {

SkuCatalog logistic_sku(double alpha = 0.0, double beta = 1.0, Units stock = 100) {
  SkuCatalog catalog;
  catalog.skus.push_back({"x", alpha, beta, 0.0, 0.0, stock, std::nullopt});
  return catalog;
}

EpisodeConfig solver_config(double ceiling = 12.0) {
  EpisodeConfig config;
  config.num_epochs = 10;
  config.epoch_length = 1.0;
  config.rho = 0.9;
  config.delta_max = 1e9;  // keep inertia out of solver checks
  config.price_floor = 0.0;
  config.price_ceiling = ceiling;
  return config;
}

}  // namespace

TEST_CASE("target demand formula") {
  CHECK(target_demand(100.0, 1, 10, 0.9) == doctest::Approx(9.0));
  CHECK(target_demand(0.0, 3, 10, 0.9) == 0.0);
  CHECK(target_demand(7.0, 10, 10, 0.5) == doctest::Approx(3.5));
  CHECK_THROWS_AS(target_demand(5.0, 0, 10, 0.9), Error);
  CHECK_THROWS_AS(target_demand(5.0, 11, 10, 0.9), Error);
  CHECK_THROWS_AS(target_demand(5.0, 1, 10, 1.0), Error);
}

TEST_CASE("scheduled targets never oversell the current stock") {
  // (K - t + 1) * target == rho * I <= I, so the schedule alone cannot plan
  // to sell more than what is on hand
  for (int k : {1, 4, 12}) {
    for (int t = 1; t <= k; ++t) {
      for (double stock : {1.0, 17.0, 400.0}) {
        const double per_epoch = target_demand(stock, t, k, 0.77);
        const double scheduled = per_epoch * static_cast<double>(k - t + 1);
        CHECK(scheduled == doctest::Approx(0.77 * stock));
        CHECK(scheduled <= stock);
      }
    }
  }
}

TEST_CASE("apply_inertia clamps and is idempotent") {
  CHECK(apply_inertia({6.0}, {5.0}, 2.0, 0.0, 100.0)[0] == 6.0);
  CHECK(apply_inertia({9.0}, {5.0}, 2.0, 0.0, 100.0)[0] == 7.0);
  CHECK(apply_inertia({1.0}, {5.0}, 2.0, 0.0, 100.0)[0] == 3.0);
  CHECK(apply_inertia({9.0}, {5.0}, 0.0, 0.0, 100.0)[0] == 5.0);
  // floor/ceiling applies after the band
  CHECK(apply_inertia({9.0}, {5.0}, 2.0, 0.0, 6.5)[0] == 6.5);

  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double prev = rng.uniform(0.0, 10.0);
    const double next = rng.uniform(-2.0, 14.0);
    const double delta = rng.uniform(0.0, 3.0);
    const auto once = apply_inertia({next}, {prev}, delta, 0.0, 10.0);
    const auto twice = apply_inertia(once, {prev}, delta, 0.0, 10.0);
    CHECK(once == twice);
    CHECK(std::fabs(once[0] - prev) <= delta + 1e-12);
  }
}

TEST_CASE("price solver inverts the single-sku logistic closed form") {
  const SkuCatalog catalog = logistic_sku();
  const EpisodeConfig config = solver_config();
  const auto profile = constant_profile(10.0, 10.0);
  InventoryState state = initial_state(catalog);

  SUBCASE("target half the arrivals lands at price zero") {
    const auto decision =
        solve_price_for_targets({5.0}, state, catalog, profile, config, {1.0});
    CHECK(decision.prices[0] == doctest::Approx(0.0).epsilon(1e-4));
  }
  SUBCASE("random feasible targets match the analytic inversion") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
      const double target = rng.uniform(0.5, 4.5);  // d* in [0.05, 0.45]
      const double analytic = testutil::logit_price_for_target(0.0, 1.0, 10.0, target);
      const auto decision =
          solve_price_for_targets({target}, state, catalog, profile, config, {1.0});
      CHECK(decision.prices[0] == doctest::Approx(analytic).epsilon(1e-4));
      CHECK(decision.diagnostics.clamped_bracket[0] == 0);
      CHECK(std::fabs(decision.diagnostics.achieved_demand[0] - target) <= 1e-5 * 10.0);
    }
  }
}

TEST_CASE("unreachable targets clamp at the bracket ends") {
  const SkuCatalog catalog = logistic_sku();
  const EpisodeConfig config = solver_config();
  const auto profile = constant_profile(10.0, 10.0);
  InventoryState state = initial_state(catalog);

  // target 0: demand stays positive at any finite price -> ceiling
  auto decision = solve_price_for_targets({0.0}, state, catalog, profile, config, {1.0});
  CHECK(decision.prices[0] == config.price_ceiling);
  CHECK(decision.diagnostics.clamped_bracket[0] == 1);

  // target above lambda*dt*d(floor): floor
  decision = solve_price_for_targets({9.0}, state, catalog, profile, config, {1.0});
  CHECK(decision.prices[0] == config.price_floor);
  CHECK(decision.diagnostics.clamped_bracket[0] == 1);
}

TEST_CASE("monotone response: higher target, weakly lower price") {
  const SkuCatalog catalog = logistic_sku(0.4, 0.9);
  const EpisodeConfig config = solver_config();
  const auto profile = constant_profile(10.0, 10.0);
  InventoryState state = initial_state(catalog);
  double last_price = config.price_ceiling;
  for (double target : {0.5, 1.0, 2.0, 3.0, 4.0}) {
    const auto decision =
        solve_price_for_targets({target}, state, catalog, profile, config, {1.0});
    CHECK(decision.prices[0] <= last_price + 1e-9);
    last_price = decision.prices[0];
  }
}

TEST_CASE("guardrail policy composes targets, solver and inertia") {
  SkuCatalog catalog;
  catalog.skus.push_back({"a", 1.0, 1.0, 0.1, 0.1, 60, std::nullopt});
  catalog.skus.push_back({"b", 1.0, 1.0, 0.1, 0.1, 60, std::nullopt});
  EpisodeConfig config = solver_config();
  config.num_epochs = 6;
  config.delta_max = 1e9;
  const auto profile = constant_profile(8.0, 6.0);
  const GuardrailPolicy policy(catalog, profile, config);
  Rng rng(1);

  SUBCASE("symmetric SKUs get identical prices") {
    const auto decision = policy.decide(initial_state(catalog), {1.0, 1.0}, 1, rng);
    CHECK(decision.prices[0] == decision.prices[1]);
    CHECK(decision.diagnostics.target_demand[0] ==
          doctest::Approx(0.9 * 60.0 / 6.0));
  }
  SUBCASE("stocked-out SKUs keep the previous price") {
    InventoryState state = initial_state(catalog);
    state.on_hand = {0, 0};
    const auto decision = policy.decide(state, {1.3, 0.8}, 1, rng);
    CHECK(decision.prices == PriceVector{1.3, 0.8});
    CHECK(decision.diagnostics.target_demand == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("a single-sku guardrail matches the closed form") {
    SkuCatalog solo = logistic_sku(0.0, 1.0, 30);
    EpisodeConfig cfg = solver_config();
    cfg.num_epochs = 10;
    cfg.rho = 0.8;
    const auto prof = constant_profile(10.0, 10.0);
    const GuardrailPolicy guard(solo, prof, cfg);
    const auto decision = guard.decide(initial_state(solo), {1.0}, 1, rng);
    // target 0.8 * 30 / 10 = 2.4
    const double analytic = testutil::logit_price_for_target(0.0, 1.0, 10.0, 2.4);
    CHECK(decision.prices[0] == doctest::Approx(analytic).epsilon(1e-4));
  }
}

TEST_CASE("coupled SKUs: joint residuals meet the tolerance") {
  // cross-price effects flow through the shared denominator, so the
  // Gauss-Seidel sweeps must settle jointly, not coordinate by coordinate
  SkuCatalog catalog;
  catalog.gamma = 0.5;
  catalog.skus.push_back({"a", 1.6, 0.7, 0.0, 0.0, 50, std::nullopt});
  catalog.skus.push_back({"b", 0.9, 1.3, 0.0, 0.0, 35, std::nullopt});
  catalog.skus.push_back({"c", 0.4, 1.0, 0.0, 0.0, 20, std::nullopt});
  const EpisodeConfig config = solver_config(15.0);
  const double lambda = 12.0;
  const auto profile = constant_profile(lambda, 10.0);
  const InventoryState state = initial_state(catalog);

  const std::vector<double> targets = {3.0, 2.0, 1.2};
  const auto decision =
      solve_price_for_targets(targets, state, catalog, profile, config, {1.0, 1.0, 1.0});
  const double tol = 1e-6 * lambda * config.epoch_length;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(decision.diagnostics.clamped_bracket[i] == 0);
    CHECK(std::fabs(decision.diagnostics.achieved_demand[i] - targets[i]) <= tol);
  }
}

TEST_CASE("inertia caps the guardrail move") {
  const SkuCatalog catalog = logistic_sku(0.0, 1.0, 100);
  EpisodeConfig config = solver_config();
  config.delta_max = 0.25;
  const auto profile = constant_profile(10.0, 10.0);
  const GuardrailPolicy policy(catalog, profile, config);
  Rng rng(1);
  const auto decision = policy.decide(initial_state(catalog), {3.0}, 1, rng);
  CHECK(std::fabs(decision.prices[0] - 3.0) <= 0.25 + 1e-12);
  CHECK(decision.diagnostics.clamped_inertia[0] == 1);
}

TEST_CASE("myopic grid argmax agrees with a ten-times finer grid") {
  // eta = 0, c = 0: maximize p * lambda_dt * d(p)
  const SkuCatalog catalog = logistic_sku(1.2, 1.0, 50);
  EpisodeConfig config = solver_config(8.0);
  const auto profile = constant_profile(6.0, 10.0);
  const MyopicPolicy policy(catalog, profile, config, LatticeParams{101, 5});
  Rng rng(1);
  const auto decision = policy.decide(initial_state(catalog), {1.0}, 1, rng);

  const auto fine = price_grid(0.0, 8.0, 1001);
  double best_score = -1e300;
  double best_price = 0.0;
  for (double p : fine) {
    const double score = p * 6.0 * testutil::logit_demand(1.2, 1.0, p);
    if (score > best_score) {
      best_score = score;
      best_price = p;
    }
  }
  const double coarse_step = 8.0 / 100.0;
  CHECK(std::fabs(decision.prices[0] - best_price) <= coarse_step + 1e-12);
}

TEST_CASE("myopic tie-break picks the lowest lattice point") {
  // zero arrival rate makes every lattice point score exactly 0
  const SkuCatalog catalog = logistic_sku(1.0, 1.0, 10);
  EpisodeConfig config = solver_config(4.0);
  const auto profile = constant_profile(0.0, 10.0);
  const MyopicPolicy policy(catalog, profile, config, LatticeParams{21, 5});
  Rng rng(1);
  const auto decision = policy.decide(initial_state(catalog), {2.0}, 1, rng);
  CHECK(decision.prices[0] == 0.0);
}

TEST_CASE("myopic handles all-negative margins via the same tie-break") {
  SkuCatalog catalog = logistic_sku(1.0, 1.0, 10);
  catalog.skus[0].unit_cost = 100.0;  // margin < 0 everywhere on the grid
  EpisodeConfig config = solver_config(4.0);
  const auto profile = constant_profile(5.0, 10.0);
  const MyopicPolicy policy(catalog, profile, config, LatticeParams{41, 5});
  Rng rng(1);
  const auto decision = policy.decide(initial_state(catalog), {2.0}, 1, rng);
  // the least-bad point is the ceiling (demand smallest); distinct scores, no tie
  CHECK(decision.prices[0] == 4.0);
}

TEST_CASE("fixed policy with roomy inertia holds the price path") {
  const SkuCatalog catalog = logistic_sku(1.0, 1.0, 10);
  EpisodeConfig config = solver_config(9.0);
  const FixedPricePolicy policy({2.5}, catalog, config);
  Rng rng(1);
  PriceVector prev = {2.5};
  for (int epoch = 1; epoch <= 5; ++epoch) {
    const auto decision = policy.decide(initial_state(catalog), prev, epoch, rng);
    CHECK(decision.prices[0] == 2.5);
    prev = decision.prices;
  }
}

TEST_CASE("full-lattice search honors ascending lexicographic tie-breaks") {
  const std::vector<double> grid = {0.0, 1.0, 2.0};
  const auto flat = [](const PriceVector&) { return 1.0; };
  const PriceVector base = {9.0, 9.0};
  const PriceVector best = maximize_on_lattice({0, 1}, base, grid, flat);
  CHECK(best == PriceVector{0.0, 0.0});

  // prefers lower first coordinate, then lower second
  const auto first_heavy = [](const PriceVector& p) { return -p[0]; };
  CHECK(maximize_on_lattice({0, 1}, base, grid, first_heavy) == PriceVector{0.0, 0.0});
}

TEST_CASE("coordinate ascent lands on a coordinate-wise optimum") {
  SkuCatalog catalog;
  for (int i = 0; i < 5; ++i)
    catalog.skus.push_back(
        {"s" + std::to_string(i), 0.8 + 0.1 * i, 1.0, 0.1, 0.0, 10, std::nullopt});
  EpisodeConfig config = solver_config(4.0);
  const auto profile = constant_profile(5.0, 10.0);
  const MyopicPolicy policy(catalog, profile, config, LatticeParams{11, 8});
  Rng rng(1);
  const auto decision =
      policy.decide(initial_state(catalog), PriceVector(5, 2.0), 1, rng);

  const auto grid = price_grid(0.0, 4.0, 11);
  const std::vector<std::size_t> available = {0, 1, 2, 3, 4};
  const double chosen = expected_epoch_profit(decision.prices, available, catalog, 5.0);
  for (std::size_t k = 0; k < 5; ++k) {
    PriceVector candidate = decision.prices;
    for (double g : grid) {
      candidate[k] = g;
      CHECK(expected_epoch_profit(candidate, available, catalog, 5.0) <= chosen + 1e-12);
    }
  }
}

TEST_CASE("solver error carries the best iterate") {
  const SkuCatalog catalog = logistic_sku();
  EpisodeConfig config = solver_config();
  const auto profile = constant_profile(10.0, 10.0);
  InventoryState state = initial_state(catalog);
  SolverParams params;
  params.max_sweeps = 0;  // force the failure path
  try {
    solve_price_for_targets({2.0}, state, catalog, profile, config, {1.0}, params);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.best_prices().size() == 1);
    CHECK(e.residuals().size() == 1);
  }
}
