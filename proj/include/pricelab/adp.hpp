#pragma once

#include <cstdint>
#include <vector>

#include "pricelab/simulator.hpp"

namespace pricelab {

struct TrajectorySample {
  int epoch = 0;  // 1-based
  std::vector<double> inventory;
  PriceVector prices;
  double reward = 0.0;  // epoch profit, salvage excluded
  std::vector<double> next_inventory;
};

// Per-epoch linear value coefficients: value of inventory I at epoch t is
// at(t) dot I. Row K+1 is the terminal vector -s and is never fitted.
struct ValueWeights {
  int num_epochs = 0;                        // K
  std::vector<std::vector<double>> weights;  // weights[t-1] holds w_t, t = 1..K+1

  const std::vector<double>& at(int epoch) const;
};

ValueWeights zero_weights(int num_epochs, std::size_t num_skus);

double value_estimate(const ValueWeights& weights, int epoch,
                      const std::vector<double>& inventory);
double value_estimate(const ValueWeights& weights, int epoch, const std::vector<Units>& inventory);

struct FitReport {
  std::vector<double> residual_rms;  // per epoch t = 1..K
};

// Backward fitted value iteration: for t = K..1, regress
// reward + w_{t+1} dot next_inventory onto inventory with a ridge term.
// samples_by_epoch[t-1] holds the epoch-t samples; every epoch needs at
// least one.
ValueWeights fit_weights(const std::vector<std::vector<TrajectorySample>>& samples_by_epoch,
                         const SkuCatalog& catalog, double ridge = 1e-8,
                         FitReport* report = nullptr);

std::vector<std::vector<TrajectorySample>> collect_samples(
    const std::vector<EpisodeResult>& results, int num_epochs);

enum class AdpTransition {
  kCertaintyEquivalent,  // next inventory = max(0, I - D(p))
  kMonteCarlo,           // average over sampled epochs; validation mode
};

struct AdpParams {
  int grid_points = 101;
  int ascent_passes = 5;
  int training_episodes = 200;
  double ridge = 1e-8;
  double exploration = -1.0;  // behavior-policy noise half-width; < 0 means delta_max / 2
  int refit_rounds = 1;       // 1 = single backward fitting pass
  AdpTransition transition = AdpTransition::kCertaintyEquivalent;
  int mc_samples = 32;
};

// Greedy one-step lookahead: same price lattice as the myopic policy, scored
// by expected epoch profit plus w_{t+1} dot expected next inventory. With
// all-zero continuation weights the scores differ from myopic by exactly
// +0.0, so the argmax (including tie-breaks) is identical.
class AdpGreedyPolicy : public Policy {
 public:
  AdpGreedyPolicy(SkuCatalog catalog, ArrivalRateProfile profile, EpisodeConfig config,
                  ValueWeights weights, AdpParams params = {});

  std::string_view name() const override { return "adp"; }
  PolicyDecision decide(const InventoryState& state, const PriceVector& p_prev, int epoch,
                        Rng& rng) const override;

 private:
  SkuCatalog catalog_;
  ArrivalRateProfile profile_;
  EpisodeConfig config_;
  ValueWeights weights_;
  AdpParams params_;
};

// Adds uniform price noise of the given half-width to the wrapped policy's
// decision, then re-applies the inertia clamp so trajectories stay feasible.
// The noise is what makes the regression design identifiable.
class ExplorationPolicy : public Policy {
 public:
  ExplorationPolicy(const Policy& inner, EpisodeConfig config, double half_width);

  std::string_view name() const override { return "exploration"; }
  PolicyDecision decide(const InventoryState& state, const PriceVector& p_prev, int epoch,
                        Rng& rng) const override;

 private:
  const Policy& inner_;
  EpisodeConfig config_;
  double half_width_;
};

// Trajectories under `behavior`, then one backward fitting pass.
ValueWeights train_adp(const SkuCatalog& catalog, const EpisodeConfig& config,
                       const ArrivalRateProfile& profile, const Policy& behavior,
                       int num_training_episodes, std::uint64_t seed, double ridge = 1e-8,
                       FitReport* report = nullptr, bool parallel = true);

// Default behavior policy (guardrail plus exploration noise); optional refit
// rounds regenerate trajectories under the freshly greedy policy.
ValueWeights train_adp(const SkuCatalog& catalog, const EpisodeConfig& config,
                       const ArrivalRateProfile& profile, const AdpParams& params,
                       std::uint64_t seed, FitReport* report = nullptr, bool parallel = true);

}  // namespace pricelab
