// Times the parallel episode kernel against the serial reference on a
// mid-size scenario and checks they agree bitwise.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pricelab/adp.hpp"
#include "pricelab/simulator.hpp"

using namespace pricelab;

namespace {

SkuCatalog bench_catalog(int num_skus) {
  SkuCatalog catalog;
  catalog.commission = 0.1;
  catalog.gamma = 0.2;
  for (int i = 0; i < num_skus; ++i) {
    Sku sku;
    sku.id = "sku" + std::to_string(i);
    sku.alpha = 1.0 + 0.15 * i;
    sku.beta = 0.8 + 0.05 * i;
    sku.unit_cost = 0.4;
    sku.salvage_penalty = 0.3;
    sku.initial_inventory = 400;
    catalog.skus.push_back(sku);
  }
  return catalog;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool identical(const std::vector<EpisodeResult>& a, const std::vector<EpisodeResult>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j].total_profit != b[j].total_profit || a[j].salvage_loss != b[j].salvage_loss)
      return false;
    if (a[j].records.size() != b[j].records.size()) return false;
    for (std::size_t t = 0; t < a[j].records.size(); ++t) {
      if (a[j].records[t].realized_sales != b[j].records[t].realized_sales) return false;
      if (a[j].records[t].prices != b[j].records[t].prices) return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  int num_skus = 6;
  int num_epochs = 48;
  int num_episodes = 400;
  if (argc > 1) num_skus = std::atoi(argv[1]);
  if (argc > 2) num_epochs = std::atoi(argv[2]);
  if (argc > 3) num_episodes = std::atoi(argv[3]);

  const SkuCatalog catalog = bench_catalog(num_skus);
  EpisodeConfig config;
  config.num_epochs = num_epochs;
  config.epoch_length = 15.0;
  config.rho = 0.9;
  config.delta_max = 0.5;
  config.price_floor = 0.0;
  config.price_ceiling= 8.0;
  config.initial_prices = PriceVector(catalog.size(), 1.5);
  const ArrivalRateProfile profile =
      constant_profile(2.0, static_cast<double>(num_epochs) * config.epoch_length);
  const GuardrailPolicy policy(catalog, profile, config);

  std::printf("episodes=%d epochs=%d skus=%d\n", num_episodes, num_epochs, num_skus);

  auto start = std::chrono::steady_clock::now();
  const auto serial =
      run_episode_batch_serial(catalog, config, policy, profile, num_episodes, 42);
  const double serial_s = seconds_since(start);
  std::printf("serial reference: %8.3f s\n", serial_s);

#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  start = std::chrono::steady_clock::now();
  const auto parallel = run_episode_batch(catalog, config, policy, profile, num_episodes, 42);
  const double parallel_s = seconds_since(start);
  std::printf("openmp (%d threads): %8.3f s  speedup %.2fx\n", threads, parallel_s,
              serial_s / parallel_s);

  if (!identical(serial, parallel)) {
    std::printf("MISMATCH between serial and parallel results\n");
    return 1;
  }
  std::printf("serial and parallel results identical\n");
  return 0;
}
