#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "v2xsim/channel.hpp"
#include "v2xsim/errors.hpp"
#include "v2xsim/mac.hpp"
#include "v2xsim/metrics.hpp"
#include "v2xsim/phy.hpp"
#include "v2xsim/rng.hpp"
#include "v2xsim/scenario.hpp"

namespace v2x {

struct SimConfig {
  long duration_ms = 20000;
  long warmup_ms = 1000;  // sensing histories are meaningless before one window
  double message_rate_hz = 10.0;
  long inter_broadcast_interval_ms = 100;
  double tx_power_dbm = 23.0;
  double rx_sensitivity_dbm = -97.28;
  int mcs_index = 7;
  int subchannels_per_subframe = 2;
  bool retransmissions_enabled = true;  // at most one blind retransmission
  CcMode cc_mode = CcMode::Drop;
  double cc_power_step_db = 3.0;
  double cc_min_tx_power_dbm = 0.0;
  double cbr_busy_threshold_dbm = -94.0;
  int cbr_window_sf = 100;
  int cr_window_sf = 1000;
  double sci_sinr_threshold_db = 0.0;  // control decode gate for sensing
  bool logistic_decode = false;
  double logistic_slope = 1.5;
  std::uint64_t run_seed = 1;
  SpsParams sps;
  CrLimitTable cr_limits = CrLimitTable::builtin();
  McsTable mcs_table = McsTable::builtin();

  int max_copies() const { return retransmissions_enabled ? 2 : 1; }

  // Messages generated after this instant may not resolve before the run ends
  // and are excluded from the metric population.
  long resolve_horizon_ms() const {
    return sps.t2_sf + (retransmissions_enabled ? sps.rri_sf : 0) + 2;
  }

  void validate() const {
    sps.validate();
    cr_limits.validate();
    mcs_table.validate();
    if (duration_ms <= 0) throw ConfigError("sim.duration_ms: must be positive");
    if (inter_broadcast_interval_ms <= 0)
      throw ConfigError("sim.inter_broadcast_interval_ms: must be positive");
    if (std::abs(message_rate_hz * static_cast<double>(inter_broadcast_interval_ms) - 1000.0) >
        1e-9)
      throw ConfigError("sim.message_rate_hz: rate * inter_broadcast_interval_ms must equal 1000");
    if (duration_ms < sps.sensing_window_sf + 10 * inter_broadcast_interval_ms)
      throw ConfigError("sim.duration_ms: need at least one sensing window plus 10 message periods");
    if (warmup_ms < 0 || warmup_ms >= duration_ms)
      throw ConfigError("sim.warmup_ms: must be in [0, duration)");
    if (tx_power_dbm < -30.0 || tx_power_dbm > 33.0)
      throw ConfigError("sim.tx_power_dbm: outside [-30, 33] dBm");
    if (!mcs_table.contains(mcs_index))
      throw ConfigError("sim.mcs_index: unknown MCS index " + std::to_string(mcs_index));
    if (cbr_window_sf <= 0 || cr_window_sf <= 0)
      throw ConfigError("sim.cbr/cr window: must be positive");
  }
};

enum class EventType : std::uint8_t {
  MessageGenerated = 0,
  Tx = 1,
  RxOutcome = 2,
  Reselection = 3,
  CrViolation = 4,
  Drop = 5,
};

inline const char* event_type_name(EventType t) {
  switch (t) {
    case EventType::MessageGenerated: return "message_generated";
    case EventType::Tx: return "tx";
    case EventType::RxOutcome: return "rx_outcome";
    case EventType::Reselection: return "reselection";
    case EventType::CrViolation: return "cr_violation";
    case EventType::Drop: return "drop";
  }
  return "?";
}

enum class DropReason : std::uint8_t { Supersession = 0, CongestionControl = 1 };

struct Event {
  long t = 0;
  EventType type = EventType::MessageGenerated;
  int node = -1;
  long payload = -1;
  int subchannel = -1;
  int width = 0;
  float power_dbm = 0.0f;
  int peer = -1;  // transmitter id on rx outcomes
  RxOutcome outcome = RxOutcome::Delivered;
  float sinr_db = 0.0f;
  std::uint8_t flag = 0;  // tx: is_retransmission; drop: DropReason
};

using EventLog = std::vector<Event>;

// Extra transmissions injected by tests: a virtual LOS emitter at a fixed
// position, occupying one resource in one subframe.
struct ScriptedTx {
  long t = 0;
  Vec2 position;
  int subchannel = 0;
  int width = 1;
  double power_dbm = 23.0;
};

struct RunStats {
  std::vector<double> mean_cbr_per_window;            // network mean, per CR window
  std::vector<std::vector<float>> node_window_cr;     // [window][node]
  std::vector<std::vector<float>> node_window_limit;  // frozen limit per window
  std::vector<long> first_cc_violation_ms;            // per node, -1 when none
  std::uint64_t distance_clamps = 0;
};

struct RunResult {
  EventLog events;
  MetricsReport report;
  RunStats stats;
};

namespace detail {

struct PendingMessage {
  long payload = -1;
  long gen_t = 0;
  int copies_sent = 0;
  bool counted = false;  // participates in the metric population
};

struct NodeRuntime {
  NodeId id = -1;
  NodeKind kind = NodeKind::Vehicle;
  Rng rng;
  long gen_phase = 0;
  SpsState sps;
  std::optional<PendingMessage> pending;
  double power_offset_db = 0.0;
  double frozen_cr_limit = 0.03;
  long window_units_used = 0;
  std::deque<std::pair<long, int>> own_txs;  // (t, width) for trailing CR
  SensingHistory sensing;

  NodeRuntime(NodeId id_, NodeKind kind_, std::uint64_t seed, int window_sf, int subch)
      : id(id_), kind(kind_), rng(seed), sensing(window_sf, subch) {}
};

struct LiveTx {
  int node = -1;  // -1 for scripted emitters
  long payload = -1;
  SubchannelRange range;
  double power_dbm = 0.0;
  bool is_retx = false;
  Vec2 position;  // scripted only
};

}  // namespace detail

// One deterministic simulation run over a deployed scenario.
class Engine {
 public:
  Engine(const Scenario& scenario, const SimConfig& sim, const ChannelConfig& channel)
      : sc_(scenario), sim_(sim), ch_(channel) {
    sim_.validate();
    ch_.validate();
    grid_ = make_grid(sim_.subchannels_per_subframe);
    mcs_ = sim_.mcs_table.lookup(sim_.mcs_index);
    validate_mcs_fits_grid(mcs_, grid_);
    noise_dbm_ = noise_floor_dbm(mcs_.message_bandwidth_hz(), ch_.noise_figure_db);
    noise_mw_ = dbm_to_mw(noise_dbm_);
    ibe_factor_ = ch_.inband_emission_enabled() ? std::pow(10.0, ch_.inband_emission_db / 10.0)
                                                : 0.0;
  }

  void add_scripted_tx(const ScriptedTx& s) { scripted_.push_back(s); }

  RunResult run() {
    init_nodes();
    build_link_cache();

    RunResult out;
    const long count_end = sim_.duration_ms - sim_.resolve_horizon_ms();

    for (long t = 0; t < sim_.duration_ms; ++t) {
      for (auto& n : nodes_) n.sensing.begin_subframe(t);
      if (t % sim_.cr_window_sf == 0) process_cc_window(t, out);
      step_generation(t, count_end, out);
      auto txs = step_transmissions(t, out);
      for (const auto& s : scripted_)
        if (s.t == t)
          txs.push_back({-1, -1, {s.subchannel, s.width}, s.power_dbm, false, s.position});
      step_propagation(t, txs, out);
    }
    finalize_report(out);
    return out;
  }

  const ResourceGrid& grid() const { return grid_; }
  const McsEntry& mcs() const { return mcs_; }
  double noise_dbm() const { return noise_dbm_; }

 private:
  void init_nodes() {
    const std::uint64_t base = mix_seed(sim_.run_seed, 0xe47u);
    const int n = static_cast<int>(sc_.nodes.size());
    nodes_.clear();
    nodes_.reserve(n);
    for (const auto& node : sc_.nodes) {
      nodes_.emplace_back(node.id, node.kind, mix_seed(base, static_cast<std::uint64_t>(node.id)),
                          sim_.sps.sensing_window_sf, grid_.subchannels);
      nodes_.back().gen_phase =
          static_cast<long>(nodes_.back().rng.uniform_u64(
              static_cast<std::uint64_t>(sim_.inter_broadcast_interval_ms)));
    }

    vehicle_index_.assign(n, -1);
    vehicle_rsu_.clear();
    vehicle_ids_.clear();
    for (const auto& node : sc_.nodes) {
      if (node.kind != NodeKind::Vehicle) continue;
      vehicle_index_[node.id] = static_cast<int>(vehicle_ids_.size());
      vehicle_ids_.push_back(node.id);
      vehicle_rsu_.push_back(measurement_rsu(node, sc_).value_or(-1));
    }
    rsu_transmitted_.assign(sc_.nodes.size(), 0);
    rsu_dropped_.assign(sc_.nodes.size(), 0);
    vehicle_received_.assign(vehicle_ids_.size(), 0);
    delivered_.clear();
    counted_meta_.clear();
    latency_ = LatencyStats{};
  }

  void build_link_cache() {
    const int n = static_cast<int>(sc_.nodes.size());
    pl_db_.assign(static_cast<std::size_t>(n) * n, 0.0f);
    block_db_.assign(static_cast<std::size_t>(n) * n, 0.0f);
    kind_.assign(static_cast<std::size_t>(n) * n, 0);
    lin_gain_.assign(static_cast<std::size_t>(n) * n, 0.0);
    dist_.assign(static_cast<std::size_t>(n) * n, 0.0f);
    Rng shadow_rng(mix_seed(sc_.config.rng_seed, 0x5ad0u));
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const Node& a = sc_.nodes[i];
        const Node& b = sc_.nodes[j];
        const LinkClass link = classify_link(a, b, sc_);
        const double d = distance(a.position, b.position);
        const double base = path_loss_db(d, LinkKind::Los, 0, ch_, &diag_);
        const double total =
            path_loss_db(d, link.kind, static_cast<int>(link.blocking_trucks.size()), ch_, &diag_);
        double pl = link.kind == LinkKind::NlosTruck ? base : total;
        double blk = link.kind == LinkKind::NlosTruck ? total - base : 0.0;
        if (ch_.shadowing_sigma_los_db > 0.0 || ch_.shadowing_sigma_nlos_db > 0.0) {
          const double sigma =
              link.kind == LinkKind::Los ? ch_.shadowing_sigma_los_db : ch_.shadowing_sigma_nlos_db;
          if (sigma > 0.0) pl += shadow_rng.normal(0.0, sigma);
        }
        const double gain = 2.0 * ch_.antenna_gain_dbi - pl - blk;
        const std::size_t ij = static_cast<std::size_t>(i) * n + j;
        const std::size_t ji = static_cast<std::size_t>(j) * n + i;
        pl_db_[ij] = pl_db_[ji] = static_cast<float>(pl);
        block_db_[ij] = block_db_[ji] = static_cast<float>(blk);
        kind_[ij] = kind_[ji] = static_cast<std::int8_t>(link.kind);
        lin_gain_[ij] = lin_gain_[ji] = std::pow(10.0, gain / 10.0);
        dist_[ij] = dist_[ji] = static_cast<float>(d);
      }
    }
  }

  double node_power_dbm(const detail::NodeRuntime& n) const {
    return std::max(sim_.tx_power_dbm + n.power_offset_db, sim_.cc_min_tx_power_dbm);
  }

  void process_cc_window(long t, RunResult& out) {
    const int n = static_cast<int>(nodes_.size());
    std::vector<float> crs(n, 0.0f), limits(n, 0.0f);
    double cbr_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      auto& node = nodes_[i];
      // trailing CR over the last full window
      while (!node.own_txs.empty() && node.own_txs.front().first < t - sim_.cr_window_sf)
        node.own_txs.pop_front();
      long units = 0;
      for (const auto& [tt, w] : node.own_txs) units += w;
      const double cr = static_cast<double>(units) /
                        (static_cast<double>(sim_.cr_window_sf) * grid_.subchannels);
      const double cbr = compute_cbr(node.sensing, t, sim_.cbr_busy_threshold_dbm,
                                     sim_.cbr_window_sf);
      const double limit = sim_.cr_limits.limit_for(cbr);
      crs[i] = static_cast<float>(cr);
      limits[i] = static_cast<float>(node.frozen_cr_limit);  // limit that governed the closed window
      node.frozen_cr_limit = limit;
      node.window_units_used = 0;
      cbr_sum += cbr;
      if (sim_.cc_mode == CcMode::PowerAdapt && t > 0 && cr > limit) {
        node.power_offset_db -= sim_.cc_power_step_db;
        const double floor_off = sim_.cc_min_tx_power_dbm - sim_.tx_power_dbm;
        node.power_offset_db = std::max(node.power_offset_db, floor_off);
        log_violation(out, t, node.id, cr);
      }
    }
    if (t > 0) {
      out.stats.node_window_cr.push_back(std::move(crs));
      out.stats.node_window_limit.push_back(std::move(limits));
    }
    out.stats.mean_cbr_per_window.push_back(n > 0 ? cbr_sum / n : 0.0);
  }

  void log_violation(RunResult& out, long t, int node_id, double cr) {
    Event e;
    e.t = t;
    e.type = EventType::CrViolation;
    e.node = node_id;
    e.sinr_db = static_cast<float>(cr);
    out.events.push_back(e);
    auto& first = out.stats.first_cc_violation_ms;
    if (first.empty()) first.assign(nodes_.size(), -1);
    if (first[node_id] < 0) first[node_id] = t;
  }

  void step_generation(long t, long count_end, RunResult& out) {
    for (auto& node : nodes_) {
      // trucks are radio-silent obstacles; RSUs and vehicles broadcast
      if (node.kind == NodeKind::Truck) continue;
      if (t < node.gen_phase || (t - node.gen_phase) % sim_.inter_broadcast_interval_ms != 0)
        continue;
      const long payload = next_payload_++;
      const bool is_rsu = node.kind == NodeKind::Rsu;
      const bool counted = is_rsu && t >= sim_.warmup_ms && t < count_end;

      Event e;
      e.t = t;
      e.type = EventType::MessageGenerated;
      e.node = node.id;
      e.payload = payload;
      out.events.push_back(e);

      if (node.pending && node.pending->copies_sent == 0) {
        // the old message never made it out; superseded by the new one
        Event d;
        d.t = t;
        d.type = EventType::Drop;
        d.node = node.id;
        d.payload = node.pending->payload;
        d.flag = static_cast<std::uint8_t>(DropReason::Supersession);
        out.events.push_back(d);
        if (node.pending->counted) ++rsu_dropped_[node.id];
      }
      node.pending = detail::PendingMessage{payload, t, 0, counted};
      if (counted) register_counted(payload, node.id, t);

      if (!node.sps.has_reservation || node.sps.needs_reselection) {
        SelectionDiag diag;
        int rc = 0;
        node.sps.reserved =
            sps_select(node.sensing, grid_, mcs_, t, sim_.sps, node.rng, &rc, nullptr);
        node.sps.rc = rc;
        node.sps.has_reservation = true;
        node.sps.needs_reselection = false;
        Event r;
        r.t = t;
        r.type = EventType::Reselection;
        r.node = node.id;
        r.subchannel = node.sps.reserved.subchannel_start;
        r.width = node.sps.reserved.width;
        r.payload = node.sps.reserved.next_tx_sf;  // reserved subframe
        out.events.push_back(r);
      }
    }
  }

  std::vector<detail::LiveTx> step_transmissions(long t, RunResult& out) {
    std::vector<detail::LiveTx> txs;
    for (auto& node : nodes_) {
      if (!node.sps.has_reservation || node.sps.reserved.next_tx_sf != t) continue;
      auto& res = node.sps.reserved;
      const bool want_tx = node.pending && node.pending->copies_sent < sim_.max_copies();
      if (want_tx) {
        const int width = res.width;
        bool drop = false;
        double projected = 0.0;
        if (sim_.cc_mode == CcMode::Drop) {
          const double units = static_cast<double>(sim_.cr_window_sf) * grid_.subchannels;
          projected = static_cast<double>(node.window_units_used + width) / units;
          CongestionState st;
          st.mode = sim_.cc_mode;
          st.cr = projected;
          st.cr_limit = node.frozen_cr_limit;
          drop = enforce_cr(st) == CrAction::Drop;
        }
        if (drop) {
          log_violation(out, t, node.id, projected);
          Event d;
          d.t = t;
          d.type = EventType::Drop;
          d.node = node.id;
          d.payload = node.pending->payload;
          d.flag = static_cast<std::uint8_t>(DropReason::CongestionControl);
          out.events.push_back(d);
          if (node.pending->counted && node.pending->copies_sent == 0)
            ++rsu_dropped_[node.id];
          node.pending.reset();
        } else {
          const bool is_retx = node.pending->copies_sent > 0;
          const double power = node_power_dbm(node);
          txs.push_back({node.id, node.pending->payload, {res.subchannel_start, res.width},
                         power, is_retx, sc_.nodes[node.id].position});
          Event e;
          e.t = t;
          e.type = EventType::Tx;
          e.node = node.id;
          e.payload = node.pending->payload;
          e.subchannel = res.subchannel_start;
          e.width = res.width;
          e.power_dbm = static_cast<float>(power);
          e.flag = is_retx ? 1 : 0;
          out.events.push_back(e);

          node.own_txs.emplace_back(t, res.width);
          node.window_units_used += res.width;
          ++node.pending->copies_sent;
          if (node.pending->counted && node.pending->copies_sent == 1)
            ++rsu_transmitted_[node.id];
          if (node.pending->copies_sent >= sim_.max_copies()) node.pending.reset();
          on_transmit(node.sps);
        }
      }
      if (node.sps.has_reservation) res.next_tx_sf += sim_.sps.rri_sf;
    }
    return txs;
  }

  double rx_mw(const detail::LiveTx& tx, int rx_node) const {
    if (tx.node >= 0) {
      const std::size_t idx =
          static_cast<std::size_t>(tx.node) * sc_.nodes.size() + static_cast<std::size_t>(rx_node);
      return dbm_to_mw(tx.power_dbm) * lin_gain_[idx];
    }
    // scripted emitters propagate LOS
    const double d = std::max(ch_.min_distance_m,
                              distance(tx.position, sc_.nodes[rx_node].position));
    return dbm_to_mw(tx.power_dbm - umi_los_path_loss_db(d, ch_.carrier_freq_ghz) +
                     2.0 * ch_.antenna_gain_dbi);
  }

  void step_propagation(long t, const std::vector<detail::LiveTx>& txs, RunResult& out) {
    if (txs.empty()) return;  // rows stay silent
    std::vector<char> transmitting(nodes_.size(), 0);
    for (const auto& tx : txs)
      if (tx.node >= 0) transmitting[tx.node] = 1;

    std::vector<double> agg(grid_.subchannels, 0.0);
    std::vector<double> per_tx_mw(txs.size(), 0.0);

    for (auto& node : nodes_) {
      if (transmitting[node.id]) {
        node.sensing.mark_unmonitored(t);
        // half-duplex: the radio hears nothing this subframe, but metric
        // receptions must still be accounted as failures
        for (const auto& tx : txs) {
          if (tx.node < 0 || tx.node == node.id) continue;
          record_halfduplex_miss(t, tx, node, out);
        }
        continue;
      }
      std::fill(agg.begin(), agg.end(), 0.0);
      double total_mw = 0.0;
      for (std::size_t k = 0; k < txs.size(); ++k) {
        const double mw = rx_mw(txs[k], node.id);
        per_tx_mw[k] = mw;
        total_mw += mw;
        for (int c = txs[k].range.start; c < txs[k].range.start + txs[k].range.width; ++c) {
          node.sensing.add_rssi(t, c, mw);
          agg[c] += mw;
        }
      }
      for (std::size_t k = 0; k < txs.size(); ++k) {
        const auto& tx = txs[k];
        if (tx.node < 0) continue;  // scripted emitters carry no decodable payload
        double in_band_mw = 0.0;
        for (int c = tx.range.start; c < tx.range.start + tx.range.width; ++c)
          in_band_mw += agg[c];
        double interference_mw = in_band_mw - tx.range.width * per_tx_mw[k];
        // leakage from same-subframe transmitters parked on other subchannels
        interference_mw += ibe_factor_ * std::max(total_mw - in_band_mw, 0.0);
        interference_mw = std::max(interference_mw, 0.0);

        const double rx_dbm = mw_to_dbm(per_tx_mw[k]);
        const double sinr = sinr_db_from_mw(rx_dbm, interference_mw, noise_mw_);

        // control decode feeds the sensing history
        if (rx_dbm >= sim_.rx_sensitivity_dbm && sinr >= sim_.sci_sinr_threshold_db)
          for (int c = tx.range.start; c < tx.range.start + tx.range.width; ++c)
            node.sensing.record_reservation(t, c, per_tx_mw[k]);

        evaluate_metric_rx(t, tx, node, rx_dbm, sinr, interference_mw, out);
      }
    }
  }

  void record_halfduplex_miss(long t, const detail::LiveTx& tx, detail::NodeRuntime& rx_node,
                              RunResult& out) {
    if (rx_node.kind != NodeKind::Vehicle) return;
    const int vidx = vehicle_index_[rx_node.id];
    if (vidx < 0 || vehicle_rsu_[vidx] != tx.node) return;
    if (counted_index_.find(tx.payload) == counted_index_.end()) return;
    Event e;
    e.t = t;
    e.type = EventType::RxOutcome;
    e.node = rx_node.id;
    e.payload = tx.payload;
    e.peer = tx.node;
    e.outcome = RxOutcome::FailHalfDuplex;
    e.sinr_db = 0.0f;
    out.events.push_back(e);
  }

  void evaluate_metric_rx(long t, const detail::LiveTx& tx, detail::NodeRuntime& rx_node,
                          double rx_dbm, double sinr, double interference_mw, RunResult& out) {
    if (rx_node.kind != NodeKind::Vehicle) return;
    const int vidx = vehicle_index_[rx_node.id];
    if (vidx < 0 || vehicle_rsu_[vidx] != tx.node) return;
    auto it = counted_index_.find(tx.payload);
    if (it == counted_index_.end()) return;

    const std::size_t pair_idx = static_cast<std::size_t>(tx.node) * sc_.nodes.size() +
                                 static_cast<std::size_t>(rx_node.id);
    LinkBudget budget;
    budget.distance_m = dist_[pair_idx];
    budget.link_kind = static_cast<LinkKind>(kind_[pair_idx]);
    budget.path_loss_db = pl_db_[pair_idx];
    budget.blockage_loss_db = block_db_[pair_idx];
    budget.rx_power_dbm = rx_dbm;
    budget.interference_dbm = mw_to_dbm(interference_mw);
    budget.noise_dbm = noise_dbm_;
    budget.sinr_db = sinr;

    DecodeModel model;
    model.rx_sensitivity_dbm = sim_.rx_sensitivity_dbm;
    model.logistic = sim_.logistic_decode;
    model.logistic_slope = sim_.logistic_slope;
    const RxOutcome outcome = decode(false, budget, mcs_, model, &rx_node.rng);

    Event e;
    e.t = t;
    e.type = EventType::RxOutcome;
    e.node = rx_node.id;
    e.payload = tx.payload;
    e.peer = tx.node;
    e.outcome = outcome;
    e.sinr_db = static_cast<float>(sinr);
    out.events.push_back(e);

    if (outcome == RxOutcome::Delivered) {
      auto& seen = delivered_[it->second];
      if (!seen[vidx]) {
        seen[vidx] = 1;
        ++vehicle_received_[vidx];
        const double latency = static_cast<double>(t + 1 - counted_meta_[it->second].gen_t);
        const double bound = sim_.sps.t2_sf + (sim_.retransmissions_enabled ? sim_.sps.rri_sf : 0) + 1;
        if (latency <= 0.0 || latency > bound)
          throw std::logic_error("latency bound violated: " + std::to_string(latency));
        latency_.add(latency);
      }
    }
  }

  void register_counted(long payload, int rsu_id, long gen_t) {
    counted_index_[payload] = counted_meta_.size();
    counted_meta_.push_back({rsu_id, gen_t});
    delivered_.emplace_back(vehicle_ids_.size(), 0);
  }

  void finalize_report(RunResult& out) {
    auto& rep = out.report;
    rep.seed = sim_.run_seed;
    rep.mcs_index = sim_.mcs_index;
    rep.latency = latency_;
    for (std::size_t v = 0; v < vehicle_ids_.size(); ++v) {
      VehicleRow row;
      row.vehicle_id = vehicle_ids_[v];
      row.rsu_id = vehicle_rsu_[v];
      if (row.rsu_id < 0) {
        ++rep.excluded_vehicles;  // out of range of every RSU
        continue;
      }
      const std::size_t pair_idx = static_cast<std::size_t>(row.rsu_id) * sc_.nodes.size() +
                                   static_cast<std::size_t>(row.vehicle_id);
      row.distance_m = dist_[pair_idx];
      row.counters.received = vehicle_received_[v];
      row.counters.transmitted = rsu_transmitted_[row.rsu_id];
      row.counters.dropped = rsu_dropped_[row.rsu_id];
      if (row.counters.denominator() > 0) {
        row.has_pdr = true;
        row.pdr_value = pdr(row.counters);
      } else {
        ++rep.excluded_vehicles;
      }
      rep.vehicles.push_back(row);
    }
    out.stats.distance_clamps = diag_.distance_clamps;
    if (out.stats.first_cc_violation_ms.empty())
      out.stats.first_cc_violation_ms.assign(nodes_.size(), -1);
  }

  struct CountedMeta {
    int rsu_id;
    long gen_t;
  };

  Scenario sc_;
  SimConfig sim_;
  ChannelConfig ch_;
  ResourceGrid grid_;
  McsEntry mcs_;
  double noise_dbm_ = 0.0;
  double noise_mw_ = 0.0;
  double ibe_factor_ = 0.0;
  ChannelDiag diag_;

  // pairwise link cache, row-major over node ids
  std::vector<float> pl_db_;
  std::vector<float> block_db_;
  std::vector<std::int8_t> kind_;
  std::vector<double> lin_gain_;
  std::vector<float> dist_;

  std::vector<detail::NodeRuntime> nodes_;
  std::vector<ScriptedTx> scripted_;
  long next_payload_ = 0;

  std::vector<int> vehicle_index_;  // node id -> vehicle slot, -1 otherwise
  std::vector<int> vehicle_ids_;
  std::vector<int> vehicle_rsu_;
  std::vector<std::int64_t> rsu_transmitted_;
  std::vector<std::int64_t> rsu_dropped_;
  std::vector<std::int64_t> vehicle_received_;
  std::map<long, std::size_t> counted_index_;
  std::vector<CountedMeta> counted_meta_;
  std::vector<std::vector<std::uint8_t>> delivered_;
  LatencyStats latency_;
};

// Convenience wrapper matching the run(scenario, sim, channel) signature.
inline RunResult run_simulation(const Scenario& scenario, const SimConfig& sim,
                                const ChannelConfig& channel) {
  Engine e(scenario, sim, channel);
  return e.run();
}

}  // namespace v2x
