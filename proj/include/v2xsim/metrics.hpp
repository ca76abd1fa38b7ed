#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "v2xsim/errors.hpp"

namespace v2x {

// Eq.-style delivery counters for one vehicle: received successes over
// transmitted-plus-dropped source packets.
struct VehicleCounters {
  std::int64_t received = 0;
  std::int64_t transmitted = 0;
  std::int64_t dropped = 0;

  std::int64_t denominator() const { return transmitted + dropped; }
};

// received / (transmitted + dropped). Callers must exclude zero-denominator
// vehicles from the PDR population instead of calling this.
inline double pdr(const VehicleCounters& c) {
  if (c.denominator() <= 0) throw ConfigError("pdr: zero denominator");
  return static_cast<double>(c.received) / static_cast<double>(c.denominator());
}

struct VehicleRow {
  int vehicle_id = -1;
  int rsu_id = -1;
  double distance_m = 0.0;
  VehicleCounters counters;
  bool has_pdr = false;
  double pdr_value = 0.0;
};

constexpr int kLatencyHistBins = 256;  // 1 ms bins, covers the 201 ms bound

struct LatencyStats {
  std::vector<std::int64_t> hist_1ms = std::vector<std::int64_t>(kLatencyHistBins, 0);
  std::int64_t count = 0;
  double sum_ms = 0.0;
  double max_ms = 0.0;
  double min_ms = std::numeric_limits<double>::infinity();

  void add(double latency_ms) {
    ++count;
    sum_ms += latency_ms;
    max_ms = std::max(max_ms, latency_ms);
    min_ms = std::min(min_ms, latency_ms);
    int bin = static_cast<int>(latency_ms);
    bin = std::clamp(bin, 0, kLatencyHistBins - 1);
    ++hist_1ms[bin];
  }

  void merge(const LatencyStats& o) {
    for (int i = 0; i < kLatencyHistBins; ++i) hist_1ms[i] += o.hist_1ms[i];
    count += o.count;
    sum_ms += o.sum_ms;
    max_ms = std::max(max_ms, o.max_ms);
    min_ms = std::min(min_ms, o.min_ms);
  }

  double mean_ms() const { return count > 0 ? sum_ms / static_cast<double>(count) : 0.0; }
};

// Per-run report: per-vehicle PDR plus pooled latency samples.
struct MetricsReport {
  std::uint64_t seed = 0;
  int mcs_index = 0;
  std::vector<VehicleRow> vehicles;  // ascending vehicle id
  LatencyStats latency;
  int excluded_vehicles = 0;  // zero-denominator or out of range

  double min_pdr() const {
    double m = 1.0;
    bool any = false;
    for (const auto& v : vehicles)
      if (v.has_pdr) {
        m = std::min(m, v.pdr_value);
        any = true;
      }
    return any ? m : 1.0;
  }

  double fraction_pdr_above(double x) const {
    std::int64_t n = 0, above = 0;
    for (const auto& v : vehicles)
      if (v.has_pdr) {
        ++n;
        if (v.pdr_value > x) ++above;
      }
    return n > 0 ? static_cast<double>(above) / static_cast<double>(n) : 0.0;
  }
};

// Probability mass per 1 ms latency bin; empty input yields an empty table.
inline std::vector<std::pair<int, double>> latency_pdf(const LatencyStats& s) {
  std::vector<std::pair<int, double>> out;
  if (s.count == 0) return out;
  for (int i = 0; i < kLatencyHistBins; ++i)
    if (s.hist_1ms[i] > 0)
      out.emplace_back(i, static_cast<double>(s.hist_1ms[i]) / static_cast<double>(s.count));
  return out;
}

// CDF of per-vehicle PDR on a fixed 0.01 grid; final row is exactly 1.
inline std::vector<std::pair<double, double>> pdr_cdf(std::span<const VehicleRow> vehicles,
                                                      double step = 0.01) {
  std::vector<double> values;
  for (const auto& v : vehicles)
    if (v.has_pdr) values.push_back(v.pdr_value);
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> out;
  const int steps = static_cast<int>(std::lround(1.0 / step));
  for (int i = 0; i <= steps; ++i) {
    const double x = static_cast<double>(i) * step;
    const auto it = std::upper_bound(values.begin(), values.end(), x + 1e-12);
    const double frac = values.empty()
                            ? 0.0
                            : static_cast<double>(it - values.begin()) /
                                  static_cast<double>(values.size());
    out.emplace_back(x, i == steps ? 1.0 : frac);
  }
  if (!values.empty()) out.back().second = 1.0;
  return out;
}

struct RsuBreakdown {
  int rsu_id = -1;
  int vehicles = 0;
  double fraction_pdr_above_0_9 = 0.0;
  double min_pdr = 1.0;
};

// Pooled statistics over a set of per-seed reports.
struct AggregateSummary {
  int runs = 0;
  int mcs_index = 0;
  std::int64_t vehicles = 0;
  std::int64_t excluded_vehicles = 0;
  double fraction_pdr_above_0_9 = 0.0;
  double fraction_stderr = 0.0;  // across-seed standard error
  double min_pdr = 1.0;
  double mean_latency_ms = 0.0;
  double mean_latency_stderr_ms = 0.0;
  double max_latency_ms = 0.0;
  LatencyStats pooled_latency;
  std::vector<VehicleRow> pooled_vehicles;  // all (seed, vehicle) rows
  std::vector<RsuBreakdown> per_rsu;
};

inline AggregateSummary summarize(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw ConfigError("summarize: need at least one report");
  AggregateSummary agg;
  agg.runs = static_cast<int>(reports.size());
  agg.mcs_index = reports.front().mcs_index;

  std::int64_t pooled_n = 0, pooled_above = 0;
  std::vector<double> per_seed_fraction, per_seed_mean_latency;
  std::vector<std::pair<int, VehicleCounters>> rsu_acc;  // rsu id -> count/above/min packed below
  struct RsuAcc {
    int id;
    std::int64_t n = 0, above = 0;
    double min_pdr = 1.0;
  };
  std::vector<RsuAcc> rsus;

  for (const auto& r : reports) {
    agg.excluded_vehicles += r.excluded_vehicles;
    std::int64_t n = 0, above = 0;
    for (const auto& v : r.vehicles) {
      if (!v.has_pdr) continue;
      agg.pooled_vehicles.push_back(v);
      ++n;
      if (v.pdr_value > 0.9) ++above;
      agg.min_pdr = std::min(agg.min_pdr, v.pdr_value);
      auto it = std::find_if(rsus.begin(), rsus.end(),
                             [&](const RsuAcc& a) { return a.id == v.rsu_id; });
      if (it == rsus.end()) {
        rsus.push_back({v.rsu_id});
        it = rsus.end() - 1;
      }
      ++it->n;
      if (v.pdr_value > 0.9) ++it->above;
      it->min_pdr = std::min(it->min_pdr, v.pdr_value);
    }
    pooled_n += n;
    pooled_above += above;
    if (n > 0) per_seed_fraction.push_back(static_cast<double>(above) / static_cast<double>(n));
    agg.pooled_latency.merge(r.latency);
    if (r.latency.count > 0) per_seed_mean_latency.push_back(r.latency.mean_ms());
  }

  agg.vehicles = pooled_n;
  agg.fraction_pdr_above_0_9 =
      pooled_n > 0 ? static_cast<double>(pooled_above) / static_cast<double>(pooled_n) : 0.0;
  agg.mean_latency_ms = agg.pooled_latency.mean_ms();
  agg.max_latency_ms = agg.pooled_latency.count > 0 ? agg.pooled_latency.max_ms : 0.0;

  auto stderr_of = [](const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0) /
                     static_cast<double>(xs.size()));
  };
  agg.fraction_stderr = stderr_of(per_seed_fraction);
  agg.mean_latency_stderr_ms = stderr_of(per_seed_mean_latency);

  std::sort(rsus.begin(), rsus.end(), [](const RsuAcc& a, const RsuAcc& b) { return a.id < b.id; });
  for (const auto& r : rsus)
    agg.per_rsu.push_back({r.id, static_cast<int>(r.n),
                           r.n > 0 ? static_cast<double>(r.above) / static_cast<double>(r.n) : 0.0,
                           r.min_pdr});
  return agg;
}

}  // namespace v2x
