#include "pricelab/adp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pricelab {

const std::vector<double>& ValueWeights::at(int epoch) const {
  if (epoch < 1 || epoch > num_epochs + 1)
    throw Error("value weights: epoch " + std::to_string(epoch) + " out of range [1, " +
                std::to_string(num_epochs + 1) + "]");
  return weights[static_cast<std::size_t>(epoch - 1)];
}

ValueWeights zero_weights(int num_epochs, std::size_t num_skus) {
  ValueWeights weights;
  weights.num_epochs = num_epochs;
  weights.weights.assign(static_cast<std::size_t>(num_epochs) + 1,
                         std::vector<double>(num_skus, 0.0));
  return weights;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += a[i] * b[i];
  return total;
}

// In-place Cholesky solve of (A + already-added ridge) w = b; A row-major n*n.
std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
    if (!(diag > 0.0)) throw Error("fit_weights: design matrix is not positive definite");
    diag = std::sqrt(diag);
    a[j * n + j] = diag;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = v / diag;
    }
  }
  // forward then backward substitution
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= a[i * n + k] * b[k];
    b[i] = v / a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double v = b[i];
    for (std::size_t k = i + 1; k < n; ++k) v -= a[k * n + i] * b[k];
    b[i] = v / a[i * n + i];
  }
  return b;
}

}  // namespace

double value_estimate(const ValueWeights& weights, int epoch,
                      const std::vector<double>& inventory) {
  const std::vector<double>& w = weights.at(epoch);
  if (w.size() != inventory.size()) throw Error("value_estimate: size mismatch");
  return dot(w, inventory);
}

double value_estimate(const ValueWeights& weights, int epoch,
                      const std::vector<Units>& inventory) {
  std::vector<double> real(inventory.begin(), inventory.end());
  return value_estimate(weights, epoch, real);
}

ValueWeights fit_weights(const std::vector<std::vector<TrajectorySample>>& samples_by_epoch,
                         const SkuCatalog& catalog, double ridge, FitReport* report) {
  const int num_epochs = static_cast<int>(samples_by_epoch.size());
  if (num_epochs < 1) throw Error("fit_weights: need samples for at least one epoch");
  if (!(ridge >= 0.0)) throw Error("fit_weights: ridge must be >= 0");
  const std::size_t n = catalog.size();

  ValueWeights weights = zero_weights(num_epochs, n);
  // Terminal anchor: leftover stock is worth exactly its salvage loss.
  for (std::size_t i = 0; i < n; ++i)
    weights.weights[static_cast<std::size_t>(num_epochs)][i] = -catalog.skus[i].salvage_penalty;

  if (report) report->residual_rms.assign(static_cast<std::size_t>(num_epochs), 0.0);

  for (int t = num_epochs; t >= 1; --t) {
    const auto& samples = samples_by_epoch[static_cast<std::size_t>(t - 1)];
    if (samples.empty())
      throw Error("fit_weights: epoch " + std::to_string(t) + " has no samples");
    const std::vector<double>& w_next = weights.weights[static_cast<std::size_t>(t)];

    std::vector<double> gram(n * n, 0.0);
    std::vector<double> moment(n, 0.0);
    std::vector<double> targets(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const TrajectorySample& sample = samples[s];
      if (sample.inventory.size() != n || sample.next_inventory.size() != n)
        throw Error("fit_weights: sample size mismatch at epoch " + std::to_string(t));
      const double y = sample.reward + dot(w_next, sample.next_inventory);
      if (!std::isfinite(y))
        throw Error("fit_weights: non-finite regression target at epoch " + std::to_string(t));
      targets[s] = y;
      for (std::size_t r = 0; r < n; ++r) {
        moment[r] += sample.inventory[r] * y;
        for (std::size_t c = 0; c < n; ++c)
          gram[r * n + c] += sample.inventory[r] * sample.inventory[c];
      }
    }
    for (std::size_t r = 0; r < n; ++r) gram[r * n + r] += ridge;

    std::vector<double> w = solve_spd(std::move(gram), std::move(moment), n);
    for (double v : w)
      if (!std::isfinite(v))
        throw Error("fit_weights: non-finite weight at epoch " + std::to_string(t));

    if (report) {
      double ss = 0.0;
      for (std::size_t s = 0; s < samples.size(); ++s) {
        const double r = targets[s] - dot(w, samples[s].inventory);
        ss += r * r;
      }
      report->residual_rms[static_cast<std::size_t>(t - 1)] =
          std::sqrt(ss / static_cast<double>(samples.size()));
    }
    weights.weights[static_cast<std::size_t>(t - 1)] = std::move(w);
  }
  return weights;
}

std::vector<std::vector<TrajectorySample>> collect_samples(
    const std::vector<EpisodeResult>& results, int num_epochs) {
  std::vector<std::vector<TrajectorySample>> by_epoch(static_cast<std::size_t>(num_epochs));
  for (const EpisodeResult& episode : results) {
    for (const EpochRecord& record : episode.records) {
      if (record.epoch < 1 || record.epoch > num_epochs)
        throw Error("collect_samples: record epoch out of range");
      TrajectorySample sample;
      sample.epoch = record.epoch;
      sample.inventory.assign(record.inventory_before.begin(), record.inventory_before.end());
      sample.prices = record.prices;
      sample.reward = record.profit;
      sample.next_inventory.assign(record.inventory_after.begin(),
                                   record.inventory_after.end());
      by_epoch[static_cast<std::size_t>(record.epoch - 1)].push_back(std::move(sample));
    }
  }
  return by_epoch;
}

AdpGreedyPolicy::AdpGreedyPolicy(SkuCatalog catalog, ArrivalRateProfile profile,
                                 EpisodeConfig config, ValueWeights weights, AdpParams params)
    : catalog_(std::move(catalog)),
      profile_(std::move(profile)),
      config_(std::move(config)),
      weights_(std::move(weights)),
      params_(params) {}

PolicyDecision AdpGreedyPolicy::decide(const InventoryState& state, const PriceVector& p_prev,
                                       int epoch, Rng& rng) const {
  PolicyDecision decision;
  decision.prices = p_prev;
  decision.diagnostics.achieved_demand.assign(catalog_.size(), 0.0);
  decision.diagnostics.solver_iterations.assign(catalog_.size(), 0);
  decision.diagnostics.clamped_bracket.assign(catalog_.size(), 0);
  decision.diagnostics.clamped_inertia.assign(catalog_.size(), 0);

  const std::vector<std::size_t> available = availability_set(state);
  if (available.empty()) return decision;  // nothing to sell, hold prices

  const std::vector<double>& w_next = weights_.at(epoch + 1);
  const double lambda =
      rate_at(profile_, static_cast<double>(state.epoch) * config_.epoch_length);
  const double lambda_dt = lambda * config_.epoch_length;
  const std::vector<double> grid =
      price_grid(config_.price_floor, config_.price_ceiling, params_.grid_points);

  DemandEvaluator evaluator(available, catalog_);
  const auto score = [&](const PriceVector& candidate) {
    if (params_.transition == AdpTransition::kMonteCarlo) {
      double continuation = 0.0;
      for (int m = 0; m < params_.mc_samples; ++m) {
        auto [record, next] =
            simulate_epoch(state, candidate, catalog_, profile_, config_, rng);
        (void)record;
        continuation += value_estimate(weights_, epoch + 1, next.on_hand);
      }
      return expected_epoch_profit(candidate, available, catalog_, lambda_dt) +
             continuation / static_cast<double>(params_.mc_samples);
    }
    // Certainty equivalent: linear value at the expected next inventory. The
    // profit term reuses the same demand vector and the same arithmetic as the
    // myopic score, so zero weights reproduce the myopic argmax exactly.
    const std::vector<double>& demand = evaluator.item_demand(candidate);
    const double profit =
        epoch_profit_from_demand(demand, available, catalog_, lambda_dt, candidate);
    double continuation = 0.0;
    for (std::size_t i = 0; i < catalog_.size(); ++i) {
      const double next_inventory =
          std::max(0.0, static_cast<double>(state.on_hand[i]) - lambda_dt * demand[i]);
      continuation += w_next[i] * next_inventory;
    }
    return profit + continuation;
  };

  const PriceVector best =
      maximize_on_lattice(available, p_prev, grid, score, params_.ascent_passes);

  decision.prices = apply_inertia(best, p_prev, config_.delta_max, config_.price_floor,
                                  config_.price_ceiling);
  for (std::size_t i = 0; i < catalog_.size(); ++i)
    decision.diagnostics.clamped_inertia[i] = decision.prices[i] != best[i] ? 1 : 0;
  decision.diagnostics.achieved_demand =
      expected_demand(decision.prices, available, catalog_, lambda, config_.epoch_length);
  return decision;
}

ExplorationPolicy::ExplorationPolicy(const Policy& inner, EpisodeConfig config,
                                     double half_width)
    : inner_(inner), config_(std::move(config)), half_width_(half_width) {
  if (!(half_width >= 0.0)) throw Error("exploration half-width must be >= 0");
}

PolicyDecision ExplorationPolicy::decide(const InventoryState& state, const PriceVector& p_prev,
                                         int epoch, Rng& rng) const {
  PolicyDecision decision = inner_.decide(state, p_prev, epoch, rng);
  PriceVector noisy = decision.prices;
  for (double& p : noisy) p += rng.uniform(-half_width_, half_width_);
  decision.prices = apply_inertia(noisy, p_prev, config_.delta_max, config_.price_floor,
                                  config_.price_ceiling);
  return decision;
}

ValueWeights train_adp(const SkuCatalog& catalog, const EpisodeConfig& config,
                       const ArrivalRateProfile& profile, const Policy& behavior,
                       int num_training_episodes, std::uint64_t seed, double ridge,
                       FitReport* report, bool parallel) {
  if (num_training_episodes < 1)
    throw Error("train_adp: num_training_episodes must be >= 1");
  const std::vector<EpisodeResult> results =
      parallel
          ? run_episode_batch(catalog, config, behavior, profile, num_training_episodes, seed)
          : run_episode_batch_serial(catalog, config, behavior, profile, num_training_episodes,
                                     seed);
  return fit_weights(collect_samples(results, config.num_epochs), catalog, ridge, report);
}

ValueWeights train_adp(const SkuCatalog& catalog, const EpisodeConfig& config,
                       const ArrivalRateProfile& profile, const AdpParams& params,
                       std::uint64_t seed, FitReport* report, bool parallel) {
  const double half_width =
      params.exploration < 0.0 ? config.delta_max / 2.0 : params.exploration;
  const GuardrailPolicy guardrail(catalog, profile, config);
  const ExplorationPolicy behavior(guardrail, config, half_width);
  ValueWeights weights = train_adp(catalog, config, profile, behavior,
                                   params.training_episodes, seed, params.ridge, report,
                                   parallel);
  for (int round = 1; round < params.refit_rounds; ++round) {
    // Optional iterated pass: regenerate trajectories under the current
    // greedy policy (still with exploration noise) and refit.
    const AdpGreedyPolicy greedy(catalog, profile, config, weights, params);
    const ExplorationPolicy explore(greedy, config, half_width);
    weights = train_adp(catalog, config, profile, explore, params.training_episodes,
                        derive_seed(seed, 0xADB0000ULL + static_cast<std::uint64_t>(round)),
                        params.ridge, report, parallel);
  }
  return weights;
}

}  // namespace pricelab
