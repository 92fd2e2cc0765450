#include "pricelab/arrivals.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace pricelab {

double poisson_pmf(std::int64_t k, double mean) {
  if (k < 0) throw Error("poisson_pmf: k must be >= 0");
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw Error("poisson_pmf: mean must be >= 0");
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  const double log_pmf =
      static_cast<double>(k) * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0);
  return std::exp(log_pmf);
}

namespace {

std::int64_t poisson_knuth(double mean, Rng& rng) {
  const double limit = std::exp(-mean);
  std::int64_t k = 0;
  double product = 1.0;
  do {
    ++k;
    product *= rng.uniform();
  } while (product > limit);
  return k - 1;
}

// Hormann (1993) PTRS rejection, valid for mean >= 10; we switch at 30.
std::int64_t poisson_ptrs(double mean, Rng& rng) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k_real = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k_real);
    if (k_real < 0.0 || (us < 0.013 && v > us)) continue;
    const double k = k_real;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        k * loglam - mean - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(k_real);
    }
  }
}

}  // namespace

std::int64_t sample_poisson(double mean, Rng& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw Error("sample_poisson: mean must be >= 0 and finite");
  if (mean == 0.0) return 0;
  if (mean < 30.0) return poisson_knuth(mean, rng);
  return poisson_ptrs(mean, rng);
}

std::int64_t sample_arrival_count(double lambda, double dt, Rng& rng) {
  if (!(lambda >= 0.0)) throw Error("sample_arrival_count: lambda must be >= 0");
  if (!(dt > 0.0)) throw Error("sample_arrival_count: dt must be > 0");
  return sample_poisson(lambda * dt, rng);
}

ArrivalRateProfile constant_profile(double lambda, double horizon_minutes) {
  if (!(lambda >= 0.0)) throw Error("constant_profile: lambda must be >= 0");
  if (!(horizon_minutes > 0.0)) throw Error("constant_profile: horizon must be > 0");
  ArrivalRateProfile profile;
  profile.window_length = horizon_minutes;
  profile.rates = {lambda};
  return profile;
}

namespace {

constexpr double kSecondsPerDay = 86400.0;
constexpr double kMinutesPerDay = 1440.0;

double minute_of_day(double epoch_seconds) {
  const double day = std::floor(epoch_seconds / kSecondsPerDay);
  return (epoch_seconds - day * kSecondsPerDay) / 60.0;
}

}  // namespace

ArrivalRateProfile estimate_rate_profile(const OrderLog& log, double window_minutes) {
  if (!(window_minutes > 0.0)) throw Error("estimate_rate_profile: window_length must be > 0");
  const double windows_real = kMinutesPerDay / window_minutes;
  const auto num_windows = static_cast<std::size_t>(std::llround(windows_real));
  if (num_windows < 1 || std::fabs(windows_real - static_cast<double>(num_windows)) > 1e-9)
    throw Error("estimate_rate_profile: window_length must divide 24 hours");

  ArrivalRateProfile profile;
  profile.window_length = window_minutes;
  profile.rates.assign(num_windows, 0.0);
  if (log.timestamps.empty()) return profile;

  for (std::size_t i = 1; i < log.timestamps.size(); ++i) {
    if (log.timestamps[i] < log.timestamps[i - 1])
      throw Error("estimate_rate_profile: timestamps must be nondecreasing");
  }

  // Aggregate counts into time-of-day windows across every day spanned by the
  // log, including days with no orders in a given window.
  const double first_day = std::floor(log.timestamps.front() / kSecondsPerDay);
  const double last_day = std::floor(log.timestamps.back() / kSecondsPerDay);
  const double days_observed = last_day - first_day + 1.0;

  std::vector<std::int64_t> counts(num_windows, 0);
  for (double ts : log.timestamps) {
    auto w = static_cast<std::size_t>(minute_of_day(ts) / window_minutes);
    if (w >= num_windows) w = num_windows - 1;
    ++counts[w];
  }
  for (std::size_t w = 0; w < num_windows; ++w) {
    profile.rates[w] = static_cast<double>(counts[w]) / (days_observed * window_minutes);
  }
  return profile;
}

double rate_at(const ArrivalRateProfile& profile, double t_minutes) {
  if (profile.rates.empty()) throw Error("rate_at: empty profile");
  if (!(t_minutes >= 0.0) || t_minutes >= profile.horizon())
    throw Error("rate_at: t outside the profile horizon");
  auto w = static_cast<std::size_t>(t_minutes / profile.window_length);
  if (w >= profile.rates.size()) w = profile.rates.size() - 1;
  return profile.rates[w];
}

namespace {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

}  // namespace

double parse_iso8601_utc(const std::string& text) {
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &year, &month, &day, &hour, &minute,
                  &second, &consumed) != 6) {
    throw Error("malformed ISO-8601 timestamp '" + text + "'");
  }
  std::size_t pos = static_cast<std::size_t>(consumed);
  double fraction = 0.0;
  if (pos < text.size() && text[pos] == '.') {
    std::size_t digits = pos + 1;
    while (digits < text.size() && std::isdigit(static_cast<unsigned char>(text[digits])))
      ++digits;
    if (digits == pos + 1) throw Error("malformed ISO-8601 timestamp '" + text + "'");
    fraction = std::stod(text.substr(pos, digits - pos));
    pos = digits;
  }
  const std::string zone = text.substr(pos);
  if (zone != "Z" && zone != "+00:00")
    throw Error("timestamp '" + text + "' must be UTC ('Z' or '+00:00')");
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month) || hour > 23 ||
      minute > 59 || second > 59 || hour < 0 || minute < 0 || second < 0) {
    throw Error("out-of-range ISO-8601 timestamp '" + text + "'");
  }
  const std::int64_t days = days_from_civil(year, month, day);
  return static_cast<double>(days) * kSecondsPerDay +
         static_cast<double>(hour * 3600 + minute * 60 + second) + fraction;
}

OrderLog load_order_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open order log '" + path + "'");
  OrderLog log;
  std::string line;
  std::size_t line_number = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "timestamp")
        throw Error("order log '" + path + "' line " + std::to_string(line_number) +
                    ": expected header 'timestamp'");
      saw_header = true;
      continue;
    }
    double ts;
    try {
      ts = parse_iso8601_utc(line);
    } catch (const Error& e) {
      throw Error("order log '" + path + "' line " + std::to_string(line_number) + ": " +
                  e.what());
    }
    if (!log.timestamps.empty() && ts < log.timestamps.back())
      throw Error("order log '" + path + "' line " + std::to_string(line_number) +
                  ": timestamps must be nondecreasing");
    log.timestamps.push_back(ts);
  }
  if (!saw_header)
    throw Error("order log '" + path + "': expected header 'timestamp'");
  return log;
}

}  // namespace pricelab
