#include "pricelab/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <utility>

#include "json.hpp"
#include "pricelab/csv.hpp"

namespace pricelab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error("config: " + where + " " + what);
}

const json& require(const json& node, const std::string& key, const std::string& where) {
  if (!node.is_object() || !node.contains(key)) fail(where + "." + key, "is required");
  return node.at(key);
}

double require_number(const json& node, const std::string& key, const std::string& where) {
  const json& value = require(node, key, where);
  if (!value.is_number()) fail(where + "." + key, "must be a number");
  return value.get<double>();
}

double number_or(const json& node, const std::string& key, const std::string& where,
                 double fallback) {
  if (!node.is_object() || !node.contains(key)) return fallback;
  if (!node.at(key).is_number()) fail(where + "." + key, "must be a number");
  return node.at(key).get<double>();
}

std::int64_t integer_or(const json& node, const std::string& key, const std::string& where,
                        std::int64_t fallback) {
  if (!node.is_object() || !node.contains(key)) return fallback;
  if (!node.at(key).is_number_integer()) fail(where + "." + key, "must be an integer");
  return node.at(key).get<std::int64_t>();
}

std::int64_t require_integer(const json& node, const std::string& key, const std::string& where) {
  const json& value = require(node, key, where);
  if (!value.is_number_integer()) fail(where + "." + key, "must be an integer");
  return value.get<std::int64_t>();
}

std::string require_string(const json& node, const std::string& key, const std::string& where) {
  const json& value = require(node, key, where);
  if (!value.is_string()) fail(where + "." + key, "must be a string");
  return value.get<std::string>();
}

SkuCatalog parse_catalog(const json& node) {
  SkuCatalog catalog;
  catalog.commission = number_or(node, "commission", "catalog", 0.0);
  catalog.gamma = number_or(node, "gamma", "catalog", 0.0);
  const json& skus = require(node, "skus", "catalog");
  if (!skus.is_array()) fail("catalog.skus", "must be an array");
  for (std::size_t i = 0; i < skus.size(); ++i) {
    const json& entry = skus[i];
    const std::string where = "catalog.skus[" + std::to_string(i) + "]";
    Sku sku;
    sku.id = require_string(entry, "id", where);
    sku.alpha = require_number(entry, "alpha", where);
    sku.beta = require_number(entry, "beta", where);
    sku.unit_cost = number_or(entry, "unit_cost", where, 0.0);
    sku.salvage_penalty = number_or(entry, "salvage_penalty", where, 0.0);
    sku.initial_inventory = require_integer(entry, "initial_inventory", where);
    if (entry.contains("commission")) sku.commission = require_number(entry, "commission", where);
    catalog.skus.push_back(std::move(sku));
  }
  return catalog;
}

json catalog_to_json_impl(const SkuCatalog& catalog) {
  json node;
  node["commission"] = catalog.commission;
  node["gamma"] = catalog.gamma;
  node["skus"] = json::array();
  for (const Sku& sku : catalog.skus) {
    json entry;
    entry["id"] = sku.id;
    entry["alpha"] = sku.alpha;
    entry["beta"] = sku.beta;
    entry["unit_cost"] = sku.unit_cost;
    entry["salvage_penalty"] = sku.salvage_penalty;
    entry["initial_inventory"] = sku.initial_inventory;
    if (sku.commission) entry["commission"] = *sku.commission;
    node["skus"].push_back(std::move(entry));
  }
  return node;
}

EpisodeConfig parse_episode(const json& node, const SkuCatalog& catalog) {
  EpisodeConfig config;
  config.num_epochs = static_cast<int>(require_integer(node, "num_epochs", "episode"));
  config.epoch_length = require_number(node, "epoch_length", "episode");
  config.rho = number_or(node, "rho", "episode", 0.9);
  config.delta_max = require_number(node, "delta_max", "episode");
  config.price_floor = number_or(node, "price_floor", "episode", 0.0);
  if (node.contains("price_ceiling")) {
    config.price_ceiling = require_number(node, "price_ceiling", "episode");
  } else {
    config.price_ceiling = default_price_ceiling(catalog);
    if (!(config.price_ceiling > config.price_floor))
      fail("episode.price_ceiling",
           "cannot be derived (10 * max(alpha/beta) <= price_floor); set it explicitly");
  }
  config.rng_seed = static_cast<std::uint64_t>(integer_or(node, "rng_seed", "episode", 0));
  if (node.contains("initial_prices")) {
    const json& prices = node.at("initial_prices");
    if (!prices.is_array()) fail("episode.initial_prices", "must be an array");
    PriceVector p0;
    for (const json& v : prices) {
      if (!v.is_number()) fail("episode.initial_prices", "must contain numbers");
      p0.push_back(v.get<double>());
    }
    config.initial_prices = std::move(p0);
  }
  return config;
}

PolicyConfig parse_policy(const json& node, const std::string& where,
                          const std::filesystem::path& base_dir) {
  PolicyConfig policy;
  policy.name = require_string(node, "name", where);
  if (node.contains("prices")) {
    const json& prices = node.at("prices");
    if (!prices.is_array()) fail(where + ".prices", "must be an array");
    for (const json& v : prices) {
      if (!v.is_number()) fail(where + ".prices", "must contain numbers");
      policy.fixed_prices.push_back(v.get<double>());
    }
  }
  policy.lattice.grid_points =
      static_cast<int>(integer_or(node, "grid_points", where, policy.lattice.grid_points));
  policy.lattice.ascent_passes =
      static_cast<int>(integer_or(node, "ascent_passes", where, policy.lattice.ascent_passes));
  policy.solver.demand_tol = number_or(node, "demand_tol", where, policy.solver.demand_tol);
  policy.solver.max_sweeps =
      static_cast<int>(integer_or(node, "max_sweeps", where, policy.solver.max_sweeps));
  policy.adp.grid_points = policy.lattice.grid_points;
  policy.adp.ascent_passes = policy.lattice.ascent_passes;
  policy.adp.training_episodes = static_cast<int>(
      integer_or(node, "training_episodes", where, policy.adp.training_episodes));
  policy.adp.ridge = number_or(node, "ridge", where, policy.adp.ridge);
  policy.adp.exploration = number_or(node, "exploration", where, policy.adp.exploration);
  policy.adp.refit_rounds =
      static_cast<int>(integer_or(node, "refit_rounds", where, policy.adp.refit_rounds));
  if (node.contains("mc_transition") && node.at("mc_transition").get<bool>())
    policy.adp.transition = AdpTransition::kMonteCarlo;
  policy.adp.mc_samples =
      static_cast<int>(integer_or(node, "mc_samples", where, policy.adp.mc_samples));
  if (node.contains("weights_csv"))
    policy.weights_csv = (base_dir / require_string(node, "weights_csv", where)).string();

  if (policy.name != "fixed" && policy.name != "myopic" && policy.name != "guardrail" &&
      policy.name != "adp")
    fail(where + ".name", "'" + policy.name + "' is not one of fixed|myopic|guardrail|adp");
  return policy;
}

}  // namespace

std::string catalog_to_json(const SkuCatalog& catalog) {
  return catalog_to_json_impl(catalog).dump(2);
}

SkuCatalog catalog_from_json(const std::string& text) {
  json node;
  try {
    node = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw Error(std::string("catalog JSON parse error: ") + e.what());
  }
  SkuCatalog catalog = parse_catalog(node);
  validate_catalog(catalog);
  return catalog;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  json root;
  try {
    root = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw Error("config '" + path + "': " + e.what());
  }
  const std::filesystem::path base_dir = std::filesystem::path(path).parent_path();

  ScenarioConfig scenario;
  scenario.catalog = parse_catalog(require(root, "catalog", "config"));
  validate_catalog(scenario.catalog);
  scenario.episode = parse_episode(require(root, "episode", "config"), scenario.catalog);
  validate_episode_config(scenario.episode, scenario.catalog.size());

  const json& arrivals = require(root, "arrivals", "config");
  if (arrivals.contains("constant_lambda"))
    scenario.arrivals.constant_lambda = require_number(arrivals, "constant_lambda", "arrivals");
  if (arrivals.contains("order_log")) {
    scenario.arrivals.order_log =
        (base_dir / require_string(arrivals, "order_log", "arrivals")).string();
    scenario.arrivals.window_length = require_number(arrivals, "window_length", "arrivals");
  }
  const bool has_constant = scenario.arrivals.constant_lambda.has_value();
  const bool has_log = scenario.arrivals.order_log.has_value();
  if (has_constant == has_log)
    fail("arrivals", "must specify exactly one source: constant_lambda or order_log");
  if (has_constant && !(*scenario.arrivals.constant_lambda >= 0.0))
    fail("arrivals.constant_lambda", "must be >= 0");
  if (has_log && !std::filesystem::exists(*scenario.arrivals.order_log))
    fail("arrivals.order_log", "file '" + *scenario.arrivals.order_log + "' does not exist");

  scenario.policy = parse_policy(require(root, "policy", "config"), "policy", base_dir);
  if (scenario.policy.weights_csv && !std::filesystem::exists(*scenario.policy.weights_csv))
    fail("policy.weights_csv", "file '" + *scenario.policy.weights_csv + "' does not exist");

  if (root.contains("policies")) {
    const json& extras = root.at("policies");
    if (!extras.is_array()) fail("policies", "must be an array");
    for (std::size_t i = 0; i < extras.size(); ++i)
      scenario.extra_policies.push_back(
          parse_policy(extras[i], "policies[" + std::to_string(i) + "]", base_dir));
  }

  const json& experiment = require(root, "experiment", "config");
  scenario.experiment.num_episodes =
      static_cast<int>(require_integer(experiment, "num_episodes", "experiment"));
  if (scenario.experiment.num_episodes < 1) fail("experiment.num_episodes", "must be >= 1");
  scenario.experiment.base_seed =
      static_cast<std::uint64_t>(integer_or(experiment, "base_seed", "experiment", 0));
  if (experiment.contains("trajectory_csv"))
    scenario.experiment.trajectory_csv = require_string(experiment, "trajectory_csv", "experiment");
  if (experiment.contains("episodes_csv"))
    scenario.experiment.episodes_csv = require_string(experiment, "episodes_csv", "experiment");
  if (experiment.contains("summary_csv"))
    scenario.experiment.summary_csv = require_string(experiment, "summary_csv", "experiment");
  return scenario;
}

ArrivalRateProfile resolve_profile(const ScenarioConfig& scenario) {
  const double horizon =
      static_cast<double>(scenario.episode.num_epochs) * scenario.episode.epoch_length;
  ArrivalRateProfile profile;
  if (scenario.arrivals.constant_lambda) {
    profile = constant_profile(*scenario.arrivals.constant_lambda, horizon);
  } else {
    profile = estimate_rate_profile(load_order_log(*scenario.arrivals.order_log),
                                    *scenario.arrivals.window_length);
  }
  if (profile.horizon() < horizon - 1e-9)
    throw Error("config: the arrival profile covers " + format_double(profile.horizon()) +
                " minutes but the horizon needs " + format_double(horizon));
  return profile;
}

std::unique_ptr<Policy> make_policy(const PolicyConfig& policy, const SkuCatalog& catalog,
                                    const EpisodeConfig& episode,
                                    const ArrivalRateProfile& profile,
                                    const std::optional<ValueWeights>& weights) {
  if (policy.name == "fixed") {
    PriceVector prices = policy.fixed_prices.empty()
                             ? resolve_initial_prices(catalog, episode, profile)
                             : policy.fixed_prices;
    return std::make_unique<FixedPricePolicy>(std::move(prices), catalog, episode);
  }
  if (policy.name == "myopic")
    return std::make_unique<MyopicPolicy>(catalog, profile, episode, policy.lattice);
  if (policy.name == "guardrail")
    return std::make_unique<GuardrailPolicy>(catalog, profile, episode, policy.solver);
  if (policy.name == "adp") {
    if (!weights) throw Error("adp policy requires fitted value weights");
    return std::make_unique<AdpGreedyPolicy>(catalog, profile, episode, *weights, policy.adp);
  }
  throw Error("unknown policy '" + policy.name + "'");
}

PolicyConfig policy_config_for(const ScenarioConfig& scenario, const std::string& name) {
  if (scenario.policy.name == name) return scenario.policy;
  for (const PolicyConfig& extra : scenario.extra_policies)
    if (extra.name == name) return extra;
  PolicyConfig defaults;
  defaults.name = name;
  return defaults;
}

void save_weights_csv(const std::string& path, const ValueWeights& weights,
                      const SkuCatalog& catalog) {
  CsvWriter out(path);
  out.row({"epoch", "sku_id", "weight"});
  for (int t = 1; t <= weights.num_epochs + 1; ++t) {
    const std::vector<double>& w = weights.at(t);
    if (w.size() != catalog.size()) throw Error("save_weights_csv: size mismatch");
    for (std::size_t i = 0; i < catalog.size(); ++i)
      out.row({std::to_string(t), catalog.skus[i].id, format_double(w[i])});
  }
}

ValueWeights load_weights_csv(const std::string& path, const SkuCatalog& catalog) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows.front() != std::vector<std::string>{"epoch", "sku_id", "weight"})
    throw Error("weights file '" + path + "': expected header epoch,sku_id,weight");

  std::map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < catalog.size(); ++i) index_of[catalog.skus[i].id] = i;

  std::map<int, std::vector<std::optional<double>>> by_epoch;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 3)
      throw Error("weights file '" + path + "' row " + std::to_string(r + 1) + ": need 3 cells");
    int epoch = 0;
    double weight = 0.0;
    try {
      epoch = std::stoi(row[0]);
      weight = std::stod(row[2]);
    } catch (const std::exception&) {
      throw Error("weights file '" + path + "' row " + std::to_string(r + 1) + ": bad number");
    }
    const auto found = index_of.find(row[1]);
    if (found == index_of.end())
      throw Error("weights file '" + path + "': unknown sku_id '" + row[1] + "'");
    auto& epoch_weights = by_epoch[epoch];
    epoch_weights.resize(catalog.size());
    epoch_weights[found->second] = weight;
  }
  if (by_epoch.empty()) throw Error("weights file '" + path + "': no rows");
  const int max_epoch = by_epoch.rbegin()->first;
  if (max_epoch < 2) throw Error("weights file '" + path + "': needs epochs 1..K+1");

  ValueWeights weights = zero_weights(max_epoch - 1, catalog.size());
  for (int t = 1; t <= max_epoch; ++t) {
    const auto found = by_epoch.find(t);
    if (found == by_epoch.end())
      throw Error("weights file '" + path + "': missing epoch " + std::to_string(t));
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      if (!found->second[i])
        throw Error("weights file '" + path + "': missing weight for sku '" +
                    catalog.skus[i].id + "' at epoch " + std::to_string(t));
      weights.weights[static_cast<std::size_t>(t - 1)][i] = *found->second[i];
    }
  }
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (weights.weights.back()[i] != -catalog.skus[i].salvage_penalty)
      throw Error("weights file '" + path +
                  "': terminal weights must equal the negated salvage penalties");
  }
  return weights;
}

ArrivalRateProfile load_rate_profile_csv(const std::string& path) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows.front() != std::vector<std::string>{"window_start", "lambda"})
    throw Error("profile file '" + path + "': expected header window_start,lambda");
  const std::size_t windows = rows.size() - 1;
  if (windows == 0) throw Error("profile file '" + path + "': no windows");
  ArrivalRateProfile profile;
  profile.window_length = 1440.0 / static_cast<double>(windows);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2)
      throw Error("profile file '" + path + "' row " + std::to_string(r + 1) +
                  ": need 2 cells");
    try {
      profile.rates.push_back(std::stod(rows[r][1]));
    } catch (const std::exception&) {
      throw Error("profile file '" + path + "' row " + std::to_string(r + 1) +
                  ": bad lambda");
    }
  }
  return profile;
}

}  // namespace pricelab
