#pragma once

#include <memory>
#include <optional>
#include <string>

#include "pricelab/adp.hpp"

namespace pricelab {

// Exactly one of the two sources must be configured.
struct ArrivalSource {
  std::optional<double> constant_lambda;   // orders per minute over the whole horizon
  std::optional<std::string> order_log;    // CSV path; rates estimated per time-of-day window
  std::optional<double> window_length;     // minutes, required with order_log
};

struct PolicyConfig {
  std::string name = "guardrail";  // fixed | myopic | guardrail | adp
  PriceVector fixed_prices;        // "fixed" only; empty means hold p_0
  LatticeParams lattice;
  SolverParams solver;
  AdpParams adp;
  std::optional<std::string> weights_csv;  // "adp": load these instead of training
};

struct ExperimentConfig {
  int num_episodes = 1;
  std::uint64_t base_seed = 0;
  std::string trajectory_csv = "trajectories.csv";
  std::string episodes_csv = "episodes.csv";
  std::string summary_csv = "summary.csv";
};

struct ScenarioConfig {
  SkuCatalog catalog;
  EpisodeConfig episode;
  ArrivalSource arrivals;
  PolicyConfig policy;
  ExperimentConfig experiment;
  // Parameter blocks for policies other than the main one, used by `compare`.
  std::vector<PolicyConfig> extra_policies;
};

// Parses and validates a JSON scenario (// comments allowed). Relative paths
// inside the file resolve against the file's directory, and referenced files
// must exist at load time.
ScenarioConfig load_scenario(const std::string& path);

// Catalog JSON round-trip, same schema as the scenario's catalog block.
std::string catalog_to_json(const SkuCatalog& catalog);
SkuCatalog catalog_from_json(const std::string& text);

// Builds the profile the scenario asks for and checks it covers the horizon.
ArrivalRateProfile resolve_profile(const ScenarioConfig& scenario);

// `weights` is only consulted for the adp policy and must be present for it.
std::unique_ptr<Policy> make_policy(const PolicyConfig& policy, const SkuCatalog& catalog,
                                    const EpisodeConfig& episode,
                                    const ArrivalRateProfile& profile,
                                    const std::optional<ValueWeights>& weights = std::nullopt);

// The parameter block for `name`: the scenario's main block if it matches,
// else a matching extra block, else defaults.
PolicyConfig policy_config_for(const ScenarioConfig& scenario, const std::string& name);

// epoch,sku_id,weight rows for t = 1..K+1; the terminal row must equal the
// negated salvage penalties and is verified on load.
void save_weights_csv(const std::string& path, const ValueWeights& weights,
                      const SkuCatalog& catalog);
ValueWeights load_weights_csv(const std::string& path, const SkuCatalog& catalog);

// Reads a window_start,lambda table as written by estimate-lambda; the
// window length is recovered from the row count (windows tile a day).
ArrivalRateProfile load_rate_profile_csv(const std::string& path);

}  // namespace pricelab
