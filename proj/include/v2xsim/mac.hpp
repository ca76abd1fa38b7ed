#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include "v2xsim/channel.hpp"
#include "v2xsim/errors.hpp"
#include "v2xsim/phy.hpp"
#include "v2xsim/rng.hpp"

namespace v2x {

// Per-node view of the channel over the sensing window: measured RSSI per
// (subframe, subchannel) resource plus the RSRP of decoded reservations.
// A subframe in which the node itself transmitted is unmonitored.
class SensingHistory {
 public:
  SensingHistory(int window_sf, int subchannels)
      : window_(window_sf),
        subch_(subchannels),
        rssi_mw_(static_cast<std::size_t>(window_sf) * subchannels, 0.0),
        rsrp_mw_(static_cast<std::size_t>(window_sf) * subchannels, 0.0),
        unmonitored_(window_sf, 0) {}

  int window() const { return window_; }
  int subchannels() const { return subch_; }

  // Reuses the ring row for subframe t; call once per subframe before writes.
  void begin_subframe(long t) {
    const std::size_t row = this->row(t);
    unmonitored_[row] = 0;
    std::fill_n(rssi_mw_.begin() + row * subch_, subch_, 0.0);
    std::fill_n(rsrp_mw_.begin() + row * subch_, subch_, 0.0);
  }

  void mark_unmonitored(long t) { unmonitored_[row(t)] = 1; }

  void add_rssi(long t, int subchannel, double mw) {
    rssi_mw_[row(t) * subch_ + subchannel] += mw;
  }

  // Strongest decoded reservation per resource is kept.
  void record_reservation(long t, int subchannel, double rsrp_mw) {
    auto& cell = rsrp_mw_[row(t) * subch_ + subchannel];
    cell = std::max(cell, rsrp_mw);
  }

  bool monitored(long t) const { return unmonitored_[row(t)] == 0; }
  double rssi_mw_at(long t, int c) const { return rssi_mw_[row(t) * subch_ + c]; }
  double rsrp_mw_at(long t, int c) const { return rsrp_mw_[row(t) * subch_ + c]; }

 private:
  std::size_t row(long t) const { return static_cast<std::size_t>(t % window_); }

  int window_;
  int subch_;
  std::vector<double> rssi_mw_;
  std::vector<double> rsrp_mw_;
  std::vector<std::uint8_t> unmonitored_;
};

struct SpsParams {
  int rri_sf = 100;            // resource reservation interval, subframes
  int sensing_window_sf = 1000;
  int t1_sf = 4;               // selection window [now+T1, now+T2]
  int t2_sf = 100;
  double rsrp_exclusion_dbm = -128.0;
  double exclusion_step_db = 3.0;
  double shortlist_fraction = 0.2;
  int rc_min = 5;
  int rc_max = 15;
  int max_escalations = 32;

  void validate() const {
    if (rri_sf <= 0) throw ConfigError("sps.rri_sf: must be positive");
    if (sensing_window_sf < rri_sf)
      throw ConfigError("sps.sensing_window_sf: must cover at least one RRI");
    if (t1_sf < 0 || t2_sf <= t1_sf) throw ConfigError("sps.t1/t2: need 0 <= T1 < T2");
    if (t2_sf > rri_sf) throw ConfigError("sps.t2_sf: selection window cannot exceed the RRI");
    if (shortlist_fraction <= 0.0 || shortlist_fraction > 1.0)
      throw ConfigError("sps.shortlist_fraction: must be in (0, 1]");
    if (rc_min < 1 || rc_max < rc_min || rc_max > 15)
      throw ConfigError("sps.rc: need 1 <= rc_min <= rc_max <= 15");
  }
};

struct Candidate {
  int offset_sf = 0;      // relative to now, in [t1, t2]
  int subchannel = 0;     // start subchannel
};

struct CandidateStats {
  bool unmonitored = false;
  double avg_rssi_mw = 0.0;
  double avg_rsrp_mw = 0.0;
  bool has_rsrp = false;
};

// Averages over the sensing-window resources that repeat with the RRI pattern
// of a candidate at now + offset. Only past, in-window subframes contribute.
inline CandidateStats candidate_stats(const SensingHistory& h, long now, int offset_sf,
                                      int start_subchannel, int width, int rri_sf) {
  CandidateStats st;
  double rssi_sum = 0.0;
  int rssi_n = 0;
  double rsrp_sum = 0.0;
  int rsrp_n = 0;
  const long future = now + offset_sf;
  const long oldest = std::max<long>(0, now - h.window() + 1);
  for (long a = future - rri_sf; a >= oldest; a -= rri_sf) {
    if (a >= now) continue;
    if (!h.monitored(a)) {
      st.unmonitored = true;
      return st;
    }
    for (int c = start_subchannel; c < start_subchannel + width; ++c) {
      rssi_sum += h.rssi_mw_at(a, c);
      ++rssi_n;
      const double r = h.rsrp_mw_at(a, c);
      if (r > 0.0) {
        rsrp_sum += r;
        ++rsrp_n;
      }
    }
  }
  st.avg_rssi_mw = rssi_n > 0 ? rssi_sum / rssi_n : 0.0;
  if (rsrp_n > 0) {
    st.has_rsrp = true;
    st.avg_rsrp_mw = rsrp_sum / rsrp_n;
  }
  return st;
}

struct SelectionDiag {
  int total_candidates = 0;
  int threshold_raises = 0;
  std::vector<Candidate> survivors;   // after exclusion, enumeration order
  std::vector<Candidate> shortlist;   // best fraction by average RSSI
};

// A transmitter's semi-persistent reservation.
struct Reservation {
  long next_tx_sf = -1;
  int subchannel_start = 0;
  int width = 1;
};

struct SpsState {
  int rc = 0;  // transmissions remaining before reselection
  bool has_reservation = false;
  bool needs_reselection = true;
  Reservation reserved;
};

// Sensing-based selection: enumerate single-message candidates in the window,
// drop candidates in unmonitored subframes, exclude by decoded-reservation
// RSRP (raising the threshold 3 dB while fewer than the target fraction
// survive), rank by average RSSI, and pick uniformly among the quietest 20%.
inline Reservation sps_select(const SensingHistory& history, const ResourceGrid& grid,
                              const McsEntry& mcs, long now_sf, const SpsParams& params,
                              Rng& rng, int* rc_out, SelectionDiag* diag = nullptr) {
  params.validate();
  const int width = mcs.subchannels_for_message;
  if (grid.subchannels < width)
    throw ConfigError("sps_select: grid has fewer subchannels than one message needs");

  struct Scored {
    Candidate cand;
    CandidateStats stats;
  };
  std::vector<Scored> all;
  all.reserve(static_cast<std::size_t>(params.t2_sf - params.t1_sf + 1) *
              (grid.subchannels - width + 1));
  for (int off = params.t1_sf; off <= params.t2_sf; ++off)
    for (int s = 0; s + width <= grid.subchannels; ++s)
      all.push_back({{off, s}, candidate_stats(history, now_sf, off, s, width, params.rri_sf)});

  const int total = static_cast<int>(all.size());
  if (total == 0) throw ConfigError("sps_select: empty candidate grid");
  const int target = std::max(1, static_cast<int>(std::ceil(params.shortlist_fraction * total)));

  std::vector<const Scored*> survivors;
  double threshold_dbm = params.rsrp_exclusion_dbm;
  int raises = 0;
  for (;; threshold_dbm += params.exclusion_step_db, ++raises) {
    survivors.clear();
    const double thr_mw = dbm_to_mw(threshold_dbm);
    for (const auto& s : all) {
      if (s.stats.unmonitored) continue;
      if (s.stats.has_rsrp && s.stats.avg_rsrp_mw > thr_mw) continue;
      survivors.push_back(&s);
    }
    if (static_cast<int>(survivors.size()) >= target || raises >= params.max_escalations) break;
  }
  if (survivors.empty()) {
    // every monitored candidate excluded even after escalation; fall back to
    // all monitored resources
    for (const auto& s : all)
      if (!s.stats.unmonitored) survivors.push_back(&s);
  }
  if (survivors.empty()) throw ConfigError("sps_select: no monitored candidate resources");

  std::stable_sort(survivors.begin(), survivors.end(), [](const Scored* a, const Scored* b) {
    if (a->stats.avg_rssi_mw != b->stats.avg_rssi_mw)
      return a->stats.avg_rssi_mw < b->stats.avg_rssi_mw;
    if (a->cand.offset_sf != b->cand.offset_sf) return a->cand.offset_sf < b->cand.offset_sf;
    return a->cand.subchannel < b->cand.subchannel;
  });

  const int shortlist_n = std::min<int>(target, static_cast<int>(survivors.size()));
  const auto& pick = *survivors[rng.uniform_u32(static_cast<std::uint32_t>(shortlist_n))];

  if (diag) {
    diag->total_candidates = total;
    diag->threshold_raises = raises;
    diag->survivors.clear();
    diag->shortlist.clear();
    for (const auto& s : all) {
      if (s.stats.unmonitored) continue;
      const double thr_mw = dbm_to_mw(threshold_dbm);
      if (s.stats.has_rsrp && s.stats.avg_rsrp_mw > thr_mw) continue;
      diag->survivors.push_back(s.cand);
    }
    for (int i = 0; i < shortlist_n; ++i) diag->shortlist.push_back(survivors[i]->cand);
  }

  if (rc_out) *rc_out = rng.uniform_int(params.rc_min, params.rc_max);
  return Reservation{now_sf + pick.cand.offset_sf, pick.cand.subchannel, width};
}

// RC is decremented once per transmission; at zero the reservation ends and a
// reselection is performed for the next message (resources are never kept).
inline void on_transmit(SpsState& st) {
  assert(st.rc >= 1 && "on_transmit called with rc == 0");
  --st.rc;
  if (st.rc == 0) {
    st.has_reservation = false;
    st.needs_reselection = true;
  }
}

// Fraction of monitored resources over the trailing window whose measured
// RSSI exceeds the busy threshold. Partially observed windows normalize by
// what was actually monitored.
inline double compute_cbr(const SensingHistory& h, long now, double busy_threshold_dbm,
                          int window_sf = 100) {
  const double thr_mw = dbm_to_mw(busy_threshold_dbm);
  const long oldest = std::max<long>(0, std::max<long>(now - window_sf, now - h.window() + 1));
  long busy = 0;
  long monitored = 0;
  for (long a = oldest; a < now; ++a) {
    if (!h.monitored(a)) continue;
    for (int c = 0; c < h.subchannels(); ++c) {
      ++monitored;
      if (h.rssi_mw_at(a, c) > thr_mw) ++busy;
    }
  }
  return monitored > 0 ? static_cast<double>(busy) / static_cast<double>(monitored) : 0.0;
}

// CBR bin -> CR limit mapping, shipped as a data file so the mapping can be
// recalibrated without a code change.
struct CrLimitTable {
  // ascending upper bounds; cbr < bound selects the bin
  std::vector<std::pair<double, double>> bins;

  static CrLimitTable builtin() {
    return {{{0.30, 0.03}, {0.65, 0.006}, {0.80, 0.003}, {1.01, 0.002}}};
  }

  void validate() const {
    if (bins.empty()) throw ConfigError("cr_limits: table is empty");
    double prev = 0.0;
    for (const auto& [ub, lim] : bins) {
      if (ub <= prev) throw ConfigError("cr_limits: bounds must be ascending");
      if (lim < 0.0 || lim > 1.0) throw ConfigError("cr_limits: limit outside [0, 1]");
      prev = ub;
    }
    if (bins.back().first < 1.0) throw ConfigError("cr_limits: last bound must cover cbr = 1");
  }

  double limit_for(double cbr) const {
    for (const auto& [ub, lim] : bins)
      if (cbr < ub) return lim;
    return bins.back().second;
  }
};

enum class CcMode { Off, Drop, PowerAdapt };

inline const char* cc_mode_name(CcMode m) {
  switch (m) {
    case CcMode::Off: return "off";
    case CcMode::Drop: return "drop";
    case CcMode::PowerAdapt: return "power";
  }
  return "?";
}

enum class CrAction { Transmit, Drop, TransmitReducedPower };

struct CongestionState {
  double cbr = 0.0;
  double cr = 0.0;
  double cr_limit = 0.03;
  CcMode mode = CcMode::Off;
  double power_offset_db = 0.0;  // cumulative reduction in power-adapt mode
};

// Gate for one pending transmission given current CR versus the limit.
inline CrAction enforce_cr(const CongestionState& st) {
  if (st.mode == CcMode::Off || st.cr <= st.cr_limit) return CrAction::Transmit;
  return st.mode == CcMode::Drop ? CrAction::Drop : CrAction::TransmitReducedPower;
}

inline double reduced_power_dbm(double current_dbm, double step_db, double floor_dbm) {
  return std::max(current_dbm - step_db, floor_dbm);
}

}  // namespace v2x
