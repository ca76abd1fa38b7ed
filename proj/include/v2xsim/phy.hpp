#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "v2xsim/channel.hpp"
#include "v2xsim/errors.hpp"
#include "v2xsim/rng.hpp"

namespace v2x {

constexpr double kRbBandwidthKhz = 180.0;
constexpr int kRbBudget20Mhz = 100;  // usable RBs in a 20 MHz LTE carrier

// Time-frequency lattice: 1 ms subframes (two 0.5 ms slots) by subchannels.
struct ResourceGrid {
  int subchannels = 2;
  int rbs_per_subchannel = 50;
  double subframe_duration_ms = 1.0;
  int slots_per_subframe = 2;
  double channel_bandwidth_mhz = 20.0;

  void validate() const {
    if (subchannels < 1 || subchannels > 10)
      throw ConfigError("grid.subchannels: must be in [1, 10]");
    if (rbs_per_subchannel < 1) throw ConfigError("grid.rbs_per_subchannel: must be >= 1");
    if (subchannels * rbs_per_subchannel > kRbBudget20Mhz)
      throw ConfigError("grid.rbs: subchannels * rbs_per_subchannel exceeds the 100-RB budget");
  }
};

// Divides the 100-RB carrier evenly across the requested subchannel count.
inline ResourceGrid make_grid(int subchannels) {
  ResourceGrid g;
  g.subchannels = subchannels;
  g.rbs_per_subchannel = subchannels > 0 ? kRbBudget20Mhz / subchannels : 0;
  g.validate();
  return g;
}

struct McsEntry {
  int index = 0;
  int modulation_order = 2;  // bits/symbol: 2 QPSK, 4 16QAM, 6 64QAM
  double code_rate = 0.5;
  int rbs_for_message = 50;          // data RBs occupied by one fixed-size message
  int subchannels_for_message = 1;   // contiguous subchannels the message spans
  double sinr_threshold_db = 5.0;    // decode threshold (10% BLER point)

  double message_bandwidth_hz() const { return rbs_for_message * kRbBandwidthKhz * 1e3; }
};

class McsTable {
 public:
  McsTable() = default;
  explicit McsTable(std::vector<McsEntry> entries) {
    for (auto& e : entries) entries_[e.index] = e;
  }

  // Modulation and coding table for the 300-byte broadcast message. RB demand
  // decreases and the decode threshold rises with the index; thresholds are
  // the SNR at 10% BLER of tabulated link-level curves.
  static McsTable builtin() {
    return McsTable({
        // idx, mod, rate, rbs, subch, thr
        {0, 2, 0.09, 96, 1, -6.5},
        {1, 2, 0.12, 84, 1, -5.2},
        {2, 2, 0.16, 72, 1, -4.0},
        {3, 2, 0.20, 62, 1, -2.6},
        {4, 2, 0.26, 54, 1, -1.2},
        {5, 2, 0.32, 48, 1, 0.2},
        {6, 2, 0.41, 44, 1, 2.0},
        {7, 2, 0.51, 30, 1, 5.0},
        {8, 2, 0.57, 28, 1, 6.2},
        {9, 2, 0.64, 26, 1, 7.4},
        {10, 4, 0.42, 16, 1, 9.8},
        {11, 4, 0.52, 14, 1, 11.0},
        {12, 4, 0.59, 12, 1, 12.2},
        {13, 4, 0.66, 11, 1, 13.4},
        {14, 4, 0.73, 10, 1, 14.6},
        {15, 4, 0.81, 9, 1, 15.8},
        {16, 4, 0.89, 8, 1, 17.1},
        {17, 6, 0.75, 7, 1, 19.0},
        {18, 6, 0.80, 6, 1, 20.3},
        {19, 6, 0.85, 6, 1, 21.7},
        {20, 6, 0.89, 5, 1, 23.2},
    });
  }

  const McsEntry& lookup(int index) const {
    auto it = entries_.find(index);
    if (it == entries_.end())
      throw ConfigError("mcs_index: unknown MCS index " + std::to_string(index));
    return it->second;
  }

  bool contains(int index) const { return entries_.count(index) > 0; }

  void insert(const McsEntry& e) { entries_[e.index] = e; }

  const std::map<int, McsEntry>& entries() const { return entries_; }

  void validate() const {
    for (const auto& [idx, e] : entries_) {
      if (idx < 0 || idx > 20) throw ConfigError("mcs_table: index outside [0, 20]");
      if (e.modulation_order != 2 && e.modulation_order != 4 && e.modulation_order != 6)
        throw ConfigError("mcs_table: modulation_order must be 2, 4 or 6");
      if (e.code_rate <= 0.0 || e.code_rate >= 1.0)
        throw ConfigError("mcs_table: code_rate must be in (0, 1)");
      if (e.rbs_for_message < 1 || e.subchannels_for_message < 1)
        throw ConfigError("mcs_table: RB/subchannel demand must be >= 1");
    }
    // RB demand must not grow with the index within one modulation family
    const McsEntry* prev = nullptr;
    for (const auto& [idx, e] : entries_) {
      if (prev && prev->modulation_order == e.modulation_order &&
          e.rbs_for_message > prev->rbs_for_message)
        throw ConfigError("mcs_table: rbs_for_message increases within a modulation family");
      prev = &e;
    }
  }

 private:
  std::map<int, McsEntry> entries_;
};

// Checks that one message at this MCS fits the per-subframe grid.
inline void validate_mcs_fits_grid(const McsEntry& mcs, const ResourceGrid& grid) {
  if (mcs.subchannels_for_message > grid.subchannels)
    throw ConfigError("mcs_index: message spans more subchannels than the grid provides");
  if (mcs.rbs_for_message > mcs.subchannels_for_message * grid.rbs_per_subchannel)
    throw ConfigError("mcs_index: rbs_for_message does not fit the allotted subchannels");
}

struct SubchannelRange {
  int start = 0;
  int width = 1;

  bool overlaps(const SubchannelRange& o) const {
    return start < o.start + o.width && o.start < start + width;
  }
  bool operator==(const SubchannelRange& o) const {
    return start == o.start && width == o.width;
  }
};

// Contiguous placement of one message; nullopt when it does not fit, which the
// MAC surfaces as a selection error.
inline std::optional<SubchannelRange> place_message(const McsEntry& mcs,
                                                    const ResourceGrid& grid,
                                                    int start_subchannel) {
  if (start_subchannel < 0) return std::nullopt;
  if (start_subchannel + mcs.subchannels_for_message > grid.subchannels) return std::nullopt;
  return SubchannelRange{start_subchannel, mcs.subchannels_for_message};
}

enum class RxOutcome : std::uint8_t {
  Delivered = 0,
  FailSensitivity = 1,
  FailSinr = 2,
  FailHalfDuplex = 3,
};

inline const char* rx_outcome_name(RxOutcome o) {
  switch (o) {
    case RxOutcome::Delivered: return "delivered";
    case RxOutcome::FailSensitivity: return "fail_sensitivity";
    case RxOutcome::FailSinr: return "fail_sinr";
    case RxOutcome::FailHalfDuplex: return "fail_halfduplex";
  }
  return "?";
}

struct DecodeModel {
  double rx_sensitivity_dbm = -97.28;
  bool logistic = false;        // soft decode probability around the threshold
  double logistic_slope = 1.5;  // 1/dB
};

// Reception decision. Half-duplex dominates, then the sensitivity gate, then
// the SINR threshold (boundary inclusive). The optional logistic mode replaces
// the hard threshold with a probability and needs an rng.
inline RxOutcome decode(bool receiver_transmitting, const LinkBudget& budget,
                        const McsEntry& mcs, const DecodeModel& model,
                        Rng* rng = nullptr) {
  if (receiver_transmitting) return RxOutcome::FailHalfDuplex;
  if (budget.rx_power_dbm < model.rx_sensitivity_dbm) return RxOutcome::FailSensitivity;
  if (model.logistic && rng) {
    const double p = 1.0 / (1.0 + std::exp(-model.logistic_slope *
                                           (budget.sinr_db - mcs.sinr_threshold_db)));
    return rng->uniform01() < p ? RxOutcome::Delivered : RxOutcome::FailSinr;
  }
  return budget.sinr_db >= mcs.sinr_threshold_db ? RxOutcome::Delivered : RxOutcome::FailSinr;
}

}  // namespace v2x
