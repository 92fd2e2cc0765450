#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pricelab/errors.hpp"
#include "pricelab/rng.hpp"

namespace pricelab {

// P(X = k) for X ~ Poisson(mean), evaluated in log space.
double poisson_pmf(std::int64_t k, double mean);

// Exact Poisson draw: Knuth's product method below mean 30, Hormann's PTRS
// transformed rejection above. Uses only uniforms from `rng`, so the sequence
// is pinned by the seed and draw position.
std::int64_t sample_poisson(double mean, Rng& rng);

std::int64_t sample_arrival_count(double lambda, double dt, Rng& rng);

struct OrderLog {
  std::vector<double> timestamps;  // seconds since the Unix epoch, UTC, nondecreasing
};

// Piecewise-constant order rate over [0, window_length * rates.size())
// minutes. Rates are orders per minute; windows are half-open [start, end).
struct ArrivalRateProfile {
  double window_length = 0.0;  // minutes
  std::vector<double> rates;

  double horizon() const { return window_length * static_cast<double>(rates.size()); }
};

ArrivalRateProfile constant_profile(double lambda, double horizon_minutes);

// Time-of-day profile: orders are counted into [start, end) windows by their
// minute of day and aggregated across every calendar day the log spans, so a
// window's rate is total count / (days observed * window_length). Windows
// with no orders get rate 0. window_minutes must divide 24h.
ArrivalRateProfile estimate_rate_profile(const OrderLog& log, double window_minutes);

// Rate of the window containing t (minutes from the profile start). A t on a
// window boundary belongs to the window beginning there; t must lie in
// [0, horizon).
double rate_at(const ArrivalRateProfile& profile, double t_minutes);

// "YYYY-MM-DDTHH:MM:SS[.frac]Z" (or +00:00) -> seconds since the Unix epoch.
double parse_iso8601_utc(const std::string& text);

// CSV with a single "timestamp" header column. Reports the line number of the
// first malformed or out-of-order row.
OrderLog load_order_log(const std::string& path);

}  // namespace pricelab
