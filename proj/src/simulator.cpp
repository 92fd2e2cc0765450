#include "pricelab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

namespace pricelab {

namespace {

std::vector<double> cumulative(const std::vector<double>& probabilities) {
  std::vector<double> cdf(probabilities.size());
  double total = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    total += probabilities[i];
    cdf[i] = total;
  }
  if (!cdf.empty()) cdf.back() = 1.0;  // guard the last bucket against rounding
  return cdf;
}

}  // namespace

std::pair<EpochRecord, InventoryState> simulate_epoch(const InventoryState& state,
                                                      const PriceVector& prices,
                                                      const SkuCatalog& catalog,
                                                      const ArrivalRateProfile& profile,
                                                      const EpisodeConfig& config, Rng& rng) {
  const std::size_t n = catalog.size();
  if (state.on_hand.size() != n || prices.size() != n)
    throw Error("simulate_epoch: size mismatch");
  if (state.epoch < 0 || state.epoch >= config.num_epochs)
    throw Error("simulate_epoch: state is already at the horizon");

  const double lambda = rate_at(profile, static_cast<double>(state.epoch) * config.epoch_length);

  EpochRecord record;
  record.epoch = state.epoch + 1;
  record.prices = prices;
  record.inventory_before = state.on_hand;
  record.realized_sales.assign(n, 0);
  record.expected_sales =
      expected_demand(prices, availability_set(state), catalog, lambda, config.epoch_length);

  InventoryState next = state;
  next.epoch = state.epoch + 1;

  record.arrivals = sample_arrival_count(lambda, config.epoch_length, rng);

  // The basket distribution only changes when some SKU sells out, so cache it
  // between arrivals.
  BasketDistribution dist;
  std::vector<double> cdf;
  bool stale = true;
  for (std::int64_t a = 0; a < record.arrivals; ++a) {
    if (stale) {
      dist = basket_probabilities(prices, availability_set(next), catalog);
      cdf = cumulative(dist.probabilities);
      stale = false;
    }
    const double u = rng.uniform();
    const std::size_t pick = static_cast<std::size_t>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    for (std::size_t i : dist.baskets[pick].items) {
      --next.on_hand[i];
      ++record.realized_sales[i];
      if (next.on_hand[i] == 0) stale = true;
    }
  }

  // Profit is recomputed from the unit counts so the accounting identity
  // profit = sum_i sales_i * ((1 - eta_i) p_i - c_i) holds exactly.
  double revenue = 0.0;
  double profit = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double eta = catalog.effective_commission(i);
    const double sold = static_cast<double>(record.realized_sales[i]);
    revenue += sold * (1.0 - eta) * prices[i];
    profit += sold * ((1.0 - eta) * prices[i] - catalog.skus[i].unit_cost);
  }
  record.revenue = revenue;
  record.profit = profit;
  record.inventory_after = next.on_hand;
  return {std::move(record), std::move(next)};
}

double terminal_salvage(const InventoryState& final_state, const SkuCatalog& catalog) {
  if (final_state.on_hand.size() != catalog.size())
    throw Error("terminal_salvage: size mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < catalog.size(); ++i)
    loss += catalog.skus[i].salvage_penalty * static_cast<double>(final_state.on_hand[i]);
  return loss;
}

PriceVector resolve_initial_prices(const SkuCatalog& catalog, const EpisodeConfig& config,
                                   const ArrivalRateProfile& profile) {
  if (config.initial_prices) {
    validate_episode_config(config, catalog.size());
    return *config.initial_prices;
  }
  EpisodeConfig relaxed = config;
  relaxed.delta_max = config.price_ceiling - config.price_floor;  // inertia can't bind
  const MyopicPolicy myopic(catalog, profile, relaxed);
  Rng unused(0);
  return myopic
      .decide(initial_state(catalog), PriceVector(catalog.size(), config.price_floor), 1, unused)
      .prices;
}

namespace {

void check_decision_contract(const PriceVector& prices, const PriceVector& p_prev,
                             const EpisodeConfig& config, std::size_t n, int epoch) {
  if (prices.size() != n) {
    std::ostringstream msg;
    msg << "policy contract violation at epoch " << epoch << ": expected " << n << " prices, got "
        << prices.size();
    throw ContractViolation(msg.str());
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(prices[i] >= 0.0) || !std::isfinite(prices[i])) {
      std::ostringstream msg;
      msg << "policy contract violation at epoch " << epoch << ": price[" << i
          << "] = " << prices[i] << " is negative or non-finite";
      throw ContractViolation(msg.str());
    }
    if (std::fabs(prices[i] - p_prev[i]) > config.delta_max + 1e-9) {
      std::ostringstream msg;
      msg << "policy contract violation at epoch " << epoch << ": |price[" << i
          << "] - previous| = " << std::fabs(prices[i] - p_prev[i]) << " exceeds delta_max "
          << config.delta_max;
      throw ContractViolation(msg.str());
    }
  }
}

}  // namespace

EpisodeResult run_episode(const SkuCatalog& catalog, const EpisodeConfig& config,
                          const Policy& policy, const ArrivalRateProfile& profile, Rng& rng) {
  const std::size_t n = catalog.size();
  InventoryState state = initial_state(catalog);
  PriceVector p_prev = resolve_initial_prices(catalog, config, profile);

  EpisodeResult result;
  result.records.reserve(static_cast<std::size_t>(config.num_epochs));
  double profit_sum = 0.0;
  for (int epoch = 1; epoch <= config.num_epochs; ++epoch) {
    const PolicyDecision decision = policy.decide(state, p_prev, epoch, rng);
    check_decision_contract(decision.prices, p_prev, config, n, epoch);
    auto [record, next] = simulate_epoch(state, decision.prices, catalog, profile, config, rng);
    profit_sum += record.profit;
    p_prev = record.prices;
    result.records.push_back(std::move(record));
    state = std::move(next);
  }
  result.salvage_loss = terminal_salvage(state, catalog);
  result.total_profit = profit_sum - result.salvage_loss;
  return result;
}

namespace {

EpisodeConfig pin_initial_prices(const SkuCatalog& catalog, const EpisodeConfig& config,
                                 const ArrivalRateProfile& profile) {
  // Resolve p_0 once; otherwise every episode would repeat the lattice search.
  EpisodeConfig pinned = config;
  pinned.initial_prices = resolve_initial_prices(catalog, config, profile);
  return pinned;
}

}  // namespace

std::vector<EpisodeResult> run_episode_batch(const SkuCatalog& catalog,
                                             const EpisodeConfig& config, const Policy& policy,
                                             const ArrivalRateProfile& profile, int num_episodes,
                                             std::uint64_t base_seed) {
  if (num_episodes < 0) throw Error("run_episode_batch: num_episodes must be >= 0");
  const EpisodeConfig pinned = pin_initial_prices(catalog, config, profile);
  std::vector<EpisodeResult> results(static_cast<std::size_t>(num_episodes));
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < num_episodes; ++j) {
    try {
      Rng rng(derive_seed(base_seed, static_cast<std::uint64_t>(j)));
      results[static_cast<std::size_t>(j)] = run_episode(catalog, pinned, policy, profile, rng);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

// Plain loop kept as the reference the parallel kernel is checked against.
std::vector<EpisodeResult> run_episode_batch_serial(const SkuCatalog& catalog,
                                                    const EpisodeConfig& config,
                                                    const Policy& policy,
                                                    const ArrivalRateProfile& profile,
                                                    int num_episodes, std::uint64_t base_seed) {
  if (num_episodes < 0) throw Error("run_episode_batch: num_episodes must be >= 0");
  const EpisodeConfig pinned = pin_initial_prices(catalog, config, profile);
  std::vector<EpisodeResult> results;
  results.reserve(static_cast<std::size_t>(num_episodes));
  for (int j = 0; j < num_episodes; ++j) {
    Rng rng(derive_seed(base_seed, static_cast<std::uint64_t>(j)));
    results.push_back(run_episode(catalog, pinned, policy, profile, rng));
  }
  return results;
}

PolicyEvaluation summarize(const std::vector<EpisodeResult>& results, std::size_t num_skus) {
  PolicyEvaluation eval;
  eval.num_episodes = static_cast<int>(results.size());
  eval.mean_leftover.assign(num_skus, 0.0);
  if (results.empty()) return eval;

  const auto count = static_cast<double>(results.size());
  bool all_equal = true;
  double salvage_sum = 0.0;
  std::vector<double> leftover_sum(num_skus, 0.0);
  for (const EpisodeResult& r : results) {
    if (r.total_profit != results.front().total_profit) all_equal = false;
    salvage_sum += r.salvage_loss;
    const auto& leftover = r.records.empty() ? std::vector<Units>(num_skus, 0)
                                             : r.records.back().inventory_after;
    for (std::size_t i = 0; i < num_skus; ++i)
      leftover_sum[i] += static_cast<double>(leftover[i]);
  }
  eval.mean_salvage_loss = salvage_sum / count;
  for (std::size_t i = 0; i < num_skus; ++i) {
    eval.mean_leftover[i] = leftover_sum[i] / count;
    eval.mean_units_unsold += leftover_sum[i];
  }
  eval.mean_units_unsold /= count;

  if (all_equal) {
    // Degenerate runs (e.g. zero arrival rate) report the exact common value.
    eval.mean_profit = results.front().total_profit;
    eval.stderr_profit = 0.0;
    return eval;
  }
  double sum = 0.0;
  for (const EpisodeResult& r : results) sum += r.total_profit;
  eval.mean_profit = sum / count;
  double ss = 0.0;
  for (const EpisodeResult& r : results) {
    const double d = r.total_profit - eval.mean_profit;
    ss += d * d;
  }
  if (results.size() > 1)
    eval.stderr_profit = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
  return eval;
}

PolicyEvaluation evaluate_policy(const SkuCatalog& catalog, const EpisodeConfig& config,
                                 const Policy& policy, const ArrivalRateProfile& profile,
                                 int num_episodes, std::uint64_t base_seed, bool parallel) {
  if (num_episodes < 1) throw Error("evaluate_policy: num_episodes must be >= 1");
  const std::vector<EpisodeResult> results =
      parallel ? run_episode_batch(catalog, config, policy, profile, num_episodes, base_seed)
               : run_episode_batch_serial(catalog, config, policy, profile, num_episodes,
                                          base_seed);
  return summarize(results, catalog.size());
}

}  // namespace pricelab
