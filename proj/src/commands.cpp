#include "pricelab/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "pricelab/csv.hpp"
#include "pricelab/scenario.hpp"

namespace pricelab {

namespace {

// PRICELAB_LOG=quiet|info|debug gates stderr chatter; contract output
// (summaries, tables) always goes to stdout.
int log_level() {
  static const int level = [] {
    const char* env = std::getenv("PRICELAB_LOG");
    if (!env) return 1;
    const std::string value(env);
    if (value == "quiet") return 0;
    if (value == "debug") return 2;
    return 1;
  }();
  return level;
}

void log_info(const std::string& message) {
  if (log_level() >= 1) std::cerr << message << '\n';
}

void log_debug(const std::string& message) {
  if (log_level() >= 2) std::cerr << message << '\n';
}

std::string hhmm(double minute_of_day) {
  const int total = static_cast<int>(minute_of_day);
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%02d:%02d", total / 60, total % 60);
  return buffer;
}

// Trains when the block asks for training, loads when it names a weights file.
std::optional<ValueWeights> prepare_weights(const PolicyConfig& policy,
                                            const ScenarioConfig& scenario,
                                            const ArrivalRateProfile& profile) {
  if (policy.name != "adp") return std::nullopt;
  if (policy.weights_csv) {
    log_debug("loading value weights from " + *policy.weights_csv);
    return load_weights_csv(*policy.weights_csv, scenario.catalog);
  }
  log_info("training adp value weights (" + std::to_string(policy.adp.training_episodes) +
           " episodes)");
  return train_adp(scenario.catalog, scenario.episode, profile, policy.adp,
                   scenario.episode.rng_seed);
}

}  // namespace

int cmd_estimate_lambda(const std::string& log_path, double window_minutes,
                        const std::string& out_path) {
  const OrderLog log = load_order_log(log_path);
  const ArrivalRateProfile profile = estimate_rate_profile(log, window_minutes);

  CsvWriter out(out_path);
  out.row({"window_start", "lambda"});
  for (std::size_t w = 0; w < profile.rates.size(); ++w)
    out.row({hhmm(static_cast<double>(w) * profile.window_length),
             format_double(profile.rates[w])});

  if (log.timestamps.empty()) log_info("warning: order log is empty; profile is all zero");

  std::size_t peak = 0;
  for (std::size_t w = 1; w < profile.rates.size(); ++w)
    if (profile.rates[w] > profile.rates[peak]) peak = w;
  const double days =
      log.timestamps.empty()
          ? 0.0
          : std::floor(log.timestamps.back() / 86400.0) -
                std::floor(log.timestamps.front() / 86400.0) + 1.0;
  std::cout << "orders: " << log.timestamps.size() << "\n"
            << "days covered: " << format_double(days) << "\n"
            << "windows: " << profile.rates.size() << " x "
            << format_double(profile.window_length) << " min\n"
            << "peak window: " << hhmm(static_cast<double>(peak) * profile.window_length)
            << " (lambda " << format_double(profile.rates[peak]) << "/min)\n";
  return 0;
}

namespace {

void write_trajectories(const std::string& path, const std::vector<EpisodeResult>& results,
                        const SkuCatalog& catalog) {
  CsvWriter out(path);
  out.row({"episode", "epoch", "sku_id", "price", "expected_sales", "realized_sales",
           "inventory_after", "epoch_profit"});
  for (std::size_t episode = 0; episode < results.size(); ++episode) {
    for (const EpochRecord& record : results[episode].records) {
      for (std::size_t i = 0; i < catalog.size(); ++i) {
        out.row({std::to_string(episode), std::to_string(record.epoch), catalog.skus[i].id,
                 format_double(record.prices[i]), format_double(record.expected_sales[i]),
                 std::to_string(record.realized_sales[i]),
                 std::to_string(record.inventory_after[i]), format_double(record.profit)});
      }
    }
  }
}

void write_episode_summaries(const std::string& path,
                             const std::vector<EpisodeResult>& results) {
  CsvWriter out(path);
  out.row({"episode", "total_profit", "salvage_loss"});
  for (std::size_t episode = 0; episode < results.size(); ++episode)
    out.row({std::to_string(episode), format_double(results[episode].total_profit),
             format_double(results[episode].salvage_loss)});
}

}  // namespace

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  const ScenarioConfig scenario = load_scenario(config_path);
  const ArrivalRateProfile profile = resolve_profile(scenario);
  const std::optional<ValueWeights> weights =
      prepare_weights(scenario.policy, scenario, profile);
  const std::unique_ptr<Policy> policy =
      make_policy(scenario.policy, scenario.catalog, scenario.episode, profile, weights);

  log_debug("running " + std::to_string(scenario.experiment.num_episodes) + " episodes");
  const std::vector<EpisodeResult> results =
      run_episode_batch(scenario.catalog, scenario.episode, *policy, profile,
                        scenario.experiment.num_episodes, scenario.experiment.base_seed);
  const PolicyEvaluation eval = summarize(results, scenario.catalog.size());

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_trajectories((dir / scenario.experiment.trajectory_csv).string(), results,
                     scenario.catalog);
  write_episode_summaries((dir / scenario.experiment.episodes_csv).string(), results);

  CsvWriter summary((dir / scenario.experiment.summary_csv).string());
  std::vector<std::string> header = {"policy", "mean_profit", "stderr"};
  for (const Sku& sku : scenario.catalog.skus) header.push_back("mean_leftover_" + sku.id);
  summary.row(header);
  std::vector<std::string> row = {std::string(policy->name()), format_double(eval.mean_profit),
                                  format_double(eval.stderr_profit)};
  for (double leftover : eval.mean_leftover) row.push_back(format_double(leftover));
  summary.row(row);

  std::cout << policy->name() << ": mean profit " << format_double(eval.mean_profit)
            << " (stderr " << format_double(eval.stderr_profit) << ") over "
            << eval.num_episodes << " episodes\n";
  return 0;
}

int cmd_compare(const std::string& config_path, const std::vector<std::string>& policy_names,
                const std::string& out_path) {
  if (policy_names.size() < 2) throw Error("compare: need at least two policies");
  const ScenarioConfig scenario = load_scenario(config_path);
  const ArrivalRateProfile profile = resolve_profile(scenario);

  CsvWriter out(out_path);
  out.row({"policy", "mean_profit", "stderr", "mean_salvage_loss", "mean_units_unsold"});
  for (const std::string& name : policy_names) {
    const PolicyConfig block = policy_config_for(scenario, name);
    const std::optional<ValueWeights> weights = prepare_weights(block, scenario, profile);
    const std::unique_ptr<Policy> policy =
        make_policy(block, scenario.catalog, scenario.episode, profile, weights);
    // Common random numbers: every policy sees the same base seed, hence the
    // same per-episode streams.
    const PolicyEvaluation eval =
        evaluate_policy(scenario.catalog, scenario.episode, *policy, profile,
                        scenario.experiment.num_episodes, scenario.experiment.base_seed);
    out.row({name, format_double(eval.mean_profit), format_double(eval.stderr_profit),
             format_double(eval.mean_salvage_loss), format_double(eval.mean_units_unsold)});
    std::cout << name << ": mean profit " << format_double(eval.mean_profit) << " (stderr "
              << format_double(eval.stderr_profit) << ")\n";
  }
  return 0;
}

int cmd_fit_adp(const std::string& config_path, const std::string& out_path) {
  const ScenarioConfig scenario = load_scenario(config_path);
  const ArrivalRateProfile profile = resolve_profile(scenario);
  const PolicyConfig block = policy_config_for(scenario, "adp");

  FitReport report;
  const ValueWeights weights = train_adp(scenario.catalog, scenario.episode, profile, block.adp,
                                         scenario.episode.rng_seed, &report);
  save_weights_csv(out_path, weights, scenario.catalog);

  for (std::size_t t = 0; t < report.residual_rms.size(); ++t)
    std::cout << "epoch " << (t + 1) << " residual rms "
              << format_double(report.residual_rms[t]) << "\n";
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace pricelab
