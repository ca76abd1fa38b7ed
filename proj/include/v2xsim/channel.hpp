#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

#include "v2xsim/errors.hpp"
#include "v2xsim/scenario.hpp"

namespace v2x {

constexpr double kNegInfDbm = -std::numeric_limits<double>::infinity();

inline double dbm_to_mw(double dbm) {
  return std::isinf(dbm) && dbm < 0 ? 0.0 : std::pow(10.0, dbm / 10.0);
}

inline double mw_to_dbm(double mw) {
  return mw <= 0.0 ? kNegInfDbm : 10.0 * std::log10(mw);
}

struct ChannelConfig {
  double carrier_freq_ghz = 5.9;
  double bandwidth_mhz = 20.0;
  double noise_figure_db = 9.0;
  double truck_blockage_loss_db = 10.0;  // per blocking truck, at most 2 counted
  int max_blocking_trucks = 2;
  double antenna_gain_dbi = 0.0;         // applied once per link end
  double shadowing_sigma_los_db = 0.0;   // 0 disables shadowing
  double shadowing_sigma_nlos_db = 0.0;
  double min_distance_m = 1.0;           // clamp below; log-distance model diverges at 0
  double ut_height_m = 1.5;
  // Transmitter leakage into the other subchannels of the same subframe,
  // relative to the allocated power. Values <= -200 disable the term and
  // restrict interference to resource-overlapping transmitters.
  double inband_emission_db = -1000.0;

  bool inband_emission_enabled() const { return inband_emission_db > -200.0; }

  void validate() const {
    if (carrier_freq_ghz <= 0.5 || carrier_freq_ghz >= 100.0)
      throw ConfigError("channel.carrier_freq_ghz: outside model validity (0.5, 100) GHz");
    if (bandwidth_mhz <= 0.0) throw ConfigError("channel.bandwidth_mhz: must be positive");
    if (truck_blockage_loss_db < 0.0)
      throw ConfigError("channel.truck_blockage_loss_db: must be >= 0");
    if (min_distance_m <= 0.0) throw ConfigError("channel.min_distance_m: must be positive");
  }
};

// Counters for events that are tolerated but worth surfacing.
struct ChannelDiag {
  std::uint64_t distance_clamps = 0;
};

// UMi street-canyon LOS branch (below the breakpoint distance, which exceeds
// every link length this scenario produces at street-level antenna heights).
inline double umi_los_path_loss_db(double distance_m, double freq_ghz) {
  return 32.4 + 21.0 * std::log10(distance_m) + 20.0 * std::log10(freq_ghz);
}

inline double umi_nlos_path_loss_db(double distance_m, double freq_ghz, double ut_height_m) {
  const double pl = 35.3 * std::log10(distance_m) + 22.4 +
                    21.3 * std::log10(freq_ghz) - 0.3 * (ut_height_m - 1.5);
  return std::max(umi_los_path_loss_db(distance_m, freq_ghz), pl);
}

// Path loss for a classified link. Truck blockage adds a fixed penalty per
// blocking truck, capped.
inline double path_loss_db(double distance_m, LinkKind kind, int blocking_trucks,
                           const ChannelConfig& cfg, ChannelDiag* diag = nullptr) {
  double d = distance_m;
  if (d < cfg.min_distance_m) {
    d = cfg.min_distance_m;
    if (diag) ++diag->distance_clamps;
  }
  switch (kind) {
    case LinkKind::Los:
      return umi_los_path_loss_db(d, cfg.carrier_freq_ghz);
    case LinkKind::NlosBuilding:
      return umi_nlos_path_loss_db(d, cfg.carrier_freq_ghz, cfg.ut_height_m);
    case LinkKind::NlosTruck: {
      const int n = std::clamp(blocking_trucks, 1, cfg.max_blocking_trucks);
      return umi_los_path_loss_db(d, cfg.carrier_freq_ghz) + n * cfg.truck_blockage_loss_db;
    }
  }
  return 0.0;
}

// Thermal noise floor over a bandwidth, in dBm.
inline double noise_floor_dbm(double bandwidth_hz, double noise_figure_db) {
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

// SINR with interference and noise summed in the linear domain.
inline double sinr_db(double rx_power_dbm, std::span<const double> interferer_powers_dbm,
                      double noise_dbm) {
  double denom_mw = dbm_to_mw(noise_dbm);
  for (double p : interferer_powers_dbm) denom_mw += dbm_to_mw(p);
  return rx_power_dbm - mw_to_dbm(denom_mw);
}

inline double sinr_db_from_mw(double rx_power_dbm, double interference_mw, double noise_mw) {
  return rx_power_dbm - mw_to_dbm(interference_mw + noise_mw);
}

// Per-link signal budget. rx_power and sinr satisfy the exact identities
// rx = tx + gains - pl - blockage and sinr = rx - 10log10(lin(I) + lin(N)).
struct LinkBudget {
  double distance_m = 0.0;
  LinkKind link_kind = LinkKind::Los;
  double path_loss_db = 0.0;
  double blockage_loss_db = 0.0;
  double rx_power_dbm = kNegInfDbm;
  double interference_dbm = kNegInfDbm;
  double noise_dbm = kNegInfDbm;
  double sinr_db = 0.0;
};

inline LinkBudget make_link_budget(double tx_power_dbm, double distance_m,
                                   const LinkClass& link, const ChannelConfig& cfg,
                                   double interference_dbm, double noise_dbm,
                                   ChannelDiag* diag = nullptr) {
  LinkBudget b;
  b.distance_m = distance_m;
  b.link_kind = link.kind;
  const double base = path_loss_db(distance_m, LinkKind::Los, 0, cfg, diag);
  const double total = path_loss_db(distance_m, link.kind,
                                    static_cast<int>(link.blocking_trucks.size()), cfg, diag);
  b.path_loss_db = link.kind == LinkKind::NlosTruck ? base : total;
  b.blockage_loss_db = link.kind == LinkKind::NlosTruck ? total - base : 0.0;
  b.rx_power_dbm = tx_power_dbm + 2.0 * cfg.antenna_gain_dbi - b.path_loss_db - b.blockage_loss_db;
  b.interference_dbm = interference_dbm;
  b.noise_dbm = noise_dbm;
  b.sinr_db = b.rx_power_dbm - mw_to_dbm(dbm_to_mw(interference_dbm) + dbm_to_mw(noise_dbm));
  return b;
}

}  // namespace v2x
