#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "pricelab/commands.hpp"
#include "pricelab/errors.hpp"

namespace {

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perishable-inventory dynamic pricing lab"};
  app.require_subcommand(1);

  std::string log_path, out_path, config_path, out_dir, policies_arg;
  int window_minutes = 5;
  int threads = 0;

  CLI::App* estimate = app.add_subcommand(
      "estimate-lambda", "Estimate a piecewise-constant arrival-rate profile from an order log");
  estimate->add_option("--log", log_path, "order log CSV (header: timestamp)")->required();
  estimate->add_option("--window-minutes", window_minutes, "window length in minutes")
      ->required()
      ->check(CLI::PositiveNumber);
  estimate->add_option("--out", out_path, "output profile CSV")->required();

  CLI::App* simulate =
      app.add_subcommand("simulate", "Run a scenario and write trajectory/summary CSVs");
  simulate->add_option("--config", config_path, "scenario config JSON")->required();
  simulate->add_option("--out-dir", out_dir, "output directory")->required();
  simulate->add_option("--threads", threads, "OpenMP thread count (default: all)");

  CLI::App* compare =
      app.add_subcommand("compare", "Evaluate several policies under common random numbers");
  compare->add_option("--config", config_path, "scenario config JSON")->required();
  compare->add_option("--policies", policies_arg, "comma-separated policy names")->required();
  compare->add_option("--out", out_path, "comparison table CSV")->required();
  compare->add_option("--threads", threads, "OpenMP thread count (default: all)");

  CLI::App* fit = app.add_subcommand("fit-adp", "Fit value weights and persist them to CSV");
  fit->add_option("--config", config_path, "scenario config JSON")->required();
  fit->add_option("--out", out_path, "output weights CSV")->required();
  fit->add_option("--threads", threads, "OpenMP thread count (default: all)");

  CLI11_PARSE(app, argc, argv);
  set_threads(threads);

  try {
    if (estimate->parsed())
      return pricelab::cmd_estimate_lambda(log_path, window_minutes, out_path);
    if (simulate->parsed()) return pricelab::cmd_simulate(config_path, out_dir);
    if (compare->parsed()) {
      std::vector<std::string> names;
      std::size_t start = 0;
      for (;;) {
        const std::size_t comma = policies_arg.find(',', start);
        if (comma == std::string::npos) {
          if (start < policies_arg.size()) names.push_back(policies_arg.substr(start));
          break;
        }
        if (comma > start) names.push_back(policies_arg.substr(start, comma - start));
        start = comma + 1;
      }
      return pricelab::cmd_compare(config_path, names, out_path);
    }
    if (fit->parsed()) return pricelab::cmd_fit_adp(config_path, out_path);
  } catch (const pricelab::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const pricelab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
