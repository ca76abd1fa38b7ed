// Acceptance suite: runs every release criterion end to end and prints one
// PASS/FAIL line per criterion. Exit status is non-zero when any fail.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/replay.hpp"
#include "support/sps_bruteforce.hpp"
#include "v2xsim/config_io.hpp"
#include "v2xsim/engine.hpp"
#include "v2xsim/report_io.hpp"

using namespace v2x;

namespace {

int g_failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
  std::printf("[%s] %-3s %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

RunConfig flagship_config() {
  const std::filesystem::path cfg_path =
      std::filesystem::path(V2X_SOURCE_DIR) / "data" / "urban_grid.cfg";
  return load_run_config(cfg_path);
}

void select_mcs(RunConfig& cfg, int mcs) {
  cfg.sim.mcs_index = mcs;
  cfg.sim.subchannels_per_subframe = mcs == 11 ? 7 : 2;
}

struct FlagshipRuns {
  std::vector<MetricsReport> reports;
  bool replay_ok = true;
  std::string replay_detail;
  double max_latency = 0.0;
  long runs = 0;
};

FlagshipRuns run_flagship(RunConfig cfg, int mcs) {
  select_mcs(cfg, mcs);
  FlagshipRuns out;
  for (const auto seed : cfg.seeds) {
    auto sc_cfg = cfg.scenario;
    sc_cfg.rng_seed = mix_seed(cfg.scenario.rng_seed, seed);
    const auto sc = deploy_scenario(sc_cfg);
    auto sim = cfg.sim;
    sim.run_seed = seed;
    auto res = run_simulation(sc, sim, cfg.channel);
    res.report.seed = seed;
    ++out.runs;
    if (res.report.latency.count > 0)
      out.max_latency = std::max(out.max_latency, res.report.latency.max_ms);

    // criterion 4: independent recount of every vehicle from the event log
    std::set<int> rsus;
    for (int id : sc.rsu_ids()) rsus.insert(id);
    std::map<int, int> veh_to_rsu;
    for (const auto& row : res.report.vehicles) veh_to_rsu[row.vehicle_id] = row.rsu_id;
    const auto rp = oracle::replay(res.events, rsus, veh_to_rsu, sim.warmup_ms,
                                   sim.duration_ms - sim.resolve_horizon_ms());
    for (const auto& row : res.report.vehicles) {
      const auto it = rp.counters.find(row.vehicle_id);
      if (it == rp.counters.end()) {
        out.replay_ok = false;
        continue;
      }
      const auto& c = it->second;
      bool ok = c.received == row.counters.received &&
                c.transmitted == row.counters.transmitted && c.dropped == row.counters.dropped;
      if (ok && row.has_pdr) {
        const double replay_pdr =
            static_cast<double>(c.received) / static_cast<double>(c.transmitted + c.dropped);
        ok = replay_pdr == row.pdr_value;  // bit-exact
      }
      if (!ok && out.replay_ok) {
        out.replay_ok = false;
        out.replay_detail =
            fmt("mcs %d seed %llu vehicle %d mismatch", mcs,
                static_cast<unsigned long long>(seed), row.vehicle_id);
      }
    }
    out.reports.push_back(std::move(res.report));
  }
  return out;
}

std::string serialize_events(const EventLog& log) {
  std::ostringstream ss;
  for (const auto& e : log)
    ss << e.t << '|' << static_cast<int>(e.type) << '|' << e.node << '|' << e.payload << '|'
       << e.subchannel << '|' << e.width << '|' << e.power_dbm << '|' << e.peer << '|'
       << static_cast<int>(e.outcome) << '|' << e.sinr_db << '|' << static_cast<int>(e.flag)
       << '\n';
  return ss.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunResult run_one(RunConfig cfg, std::uint64_t seed) {
  auto sc_cfg = cfg.scenario;
  sc_cfg.rng_seed = mix_seed(cfg.scenario.rng_seed, seed);
  const auto sc = deploy_scenario(sc_cfg);
  auto sim = cfg.sim;
  sim.run_seed = seed;
  return run_simulation(sc, sim, cfg.channel);
}

}  // namespace

int main() {
  const auto t_start = std::chrono::steady_clock::now();
  std::printf("v2xsim acceptance suite\n");

  // ---- channel unit checks (independent numeric evaluation) --------------
  {
    ChannelConfig ch;
    const double pl = path_loss_db(100.0, LinkKind::Los, 0, ch);
    const double expected_pl = 32.4 + 21.0 * std::log10(100.0) + 20.0 * std::log10(5.9);
    const bool pl_ok = std::abs(pl - 89.82) <= 0.01 && std::abs(pl - expected_pl) <= 1e-9;
    const double nf = noise_floor_dbm(20e6, 9.0);
    const double expected_nf = -174.0 + 10.0 * std::log10(20e6) + 9.0;
    const bool nf_ok = std::abs(nf - (-91.99)) <= 0.01 && std::abs(nf - expected_nf) <= 1e-9;
    report("C8", pl_ok && nf_ok,
           fmt("path_loss(100 m, LOS, 5.9 GHz) = %.4f dB; noise_floor(20 MHz, NF 9) = %.4f dBm",
               pl, nf));
  }

  // ---- SPS selection oracle ----------------------------------------------
  {
    SpsParams params;
    params.t1_sf = 1;
    params.t2_sf = 100;
    const auto grid = make_grid(2);
    McsEntry mcs;
    mcs.subchannels_for_message = 1;

    bool equal = true;
    std::string detail;
    Rng gen(424242);
    Rng pick(11);
    for (int trial = 0; trial < 1000 && equal; ++trial) {
      SensingHistory h(1000, 2);
      for (long t = 0; t < 1000; ++t) h.begin_subframe(t);
      for (long a = 0; a < 1000; ++a) {
        for (int c = 0; c < 2; ++c) {
          if (gen.uniform01() < 0.5) h.add_rssi(a, c, dbm_to_mw(gen.uniform(-110.0, -60.0)));
          if (gen.uniform01() < 0.25)
            h.record_reservation(a, c, dbm_to_mw(gen.uniform(-130.0, -70.0)));
        }
        if (gen.uniform01() < 0.02) h.mark_unmonitored(a);
      }
      SelectionDiag diag;
      int rc = 0;
      sps_select(h, grid, mcs, 1000, params, pick, &rc, &diag);
      const auto bf = oracle::brute_force_select(h, 2, 1, 1000, params);
      if (bf.survivors.size() != diag.survivors.size() ||
          bf.shortlist.size() != diag.shortlist.size()) {
        equal = false;
        detail = fmt("trial %d: set sizes differ", trial);
        break;
      }
      for (std::size_t i = 0; i < bf.survivors.size(); ++i)
        if (bf.survivors[i].offset_sf != diag.survivors[i].offset_sf ||
            bf.survivors[i].subchannel != diag.survivors[i].subchannel)
          equal = false;
      for (std::size_t i = 0; i < bf.shortlist.size(); ++i)
        if (bf.shortlist[i].offset_sf != diag.shortlist[i].offset_sf ||
            bf.shortlist[i].subchannel != diag.shortlist[i].subchannel)
          equal = false;
      if (!equal) detail = fmt("trial %d: candidate sets differ", trial);
    }

    // multinomial uniformity over the cold-start shortlist at alpha = 0.01
    SensingHistory cold(1000, 2);
    for (long t = 0; t < 1000; ++t) cold.begin_subframe(t);
    Rng draw(1234);
    std::map<std::pair<long, int>, int> freq;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      int rc = 0;
      const auto r = sps_select(cold, grid, mcs, 1000, params, draw, &rc, nullptr);
      ++freq[{r.next_tx_sf, r.subchannel_start}];
    }
    double chi2 = 0.0;
    const double expect = draws / 40.0;
    for (const auto& [cand, n] : freq) chi2 += (n - expect) * (n - expect) / expect;
    const bool uniform_ok = freq.size() == 40 && chi2 < 62.428;  // df=39, alpha=0.01
    report("C5", equal && uniform_ok,
           fmt("1000 randomized histories equal brute force%s; chi2 = %.2f (crit 62.43, df 39)",
               equal ? "" : (" [" + detail + "]").c_str(), chi2));
  }

  // ---- flagship runs: both MCS configurations ----------------------------
  const RunConfig base = flagship_config();
  auto mcs7 = run_flagship(base, 7);
  auto mcs11 = run_flagship(base, 11);
  const auto agg7 = summarize(mcs7.reports);
  const auto agg11 = summarize(mcs11.reports);

  {
    const bool band7 = agg7.fraction_pdr_above_0_9 >= 0.75 && agg7.fraction_pdr_above_0_9 <= 0.95;
    const bool band11 =
        agg11.fraction_pdr_above_0_9 >= 0.74 && agg11.fraction_pdr_above_0_9 <= 0.95;
    report("C1", band7 && band11 && agg7.runs >= 20 && agg11.runs >= 20,
           fmt("PDR>0.9 fraction: MCS 7 = %.4f (band [0.75, 0.95]), MCS 11 = %.4f "
               "(band [0.74, 0.95]), %d seeds each",
               agg7.fraction_pdr_above_0_9, agg11.fraction_pdr_above_0_9, agg7.runs));
  }

  {
    const bool latency_ok = agg11.mean_latency_ms < agg7.mean_latency_ms;
    report("C2a", latency_ok,
           fmt("mean latency: MCS 11 = %.3f ms < MCS 7 = %.3f ms", agg11.mean_latency_ms,
               agg7.mean_latency_ms));
    const bool min_ok = agg11.min_pdr < agg7.min_pdr && agg7.min_pdr >= 0.5 &&
                        agg11.min_pdr <= 0.5;
    report("C2b", min_ok,
           fmt("min PDR: MCS 11 = %.4f (<= 0.5), MCS 7 = %.4f (>= 0.5)", agg11.min_pdr,
               agg7.min_pdr));
  }

  {
    // retransmissions enabled on the flagship runs: bound 2*RRI + 1
    bool ok = mcs7.max_latency <= 201.0 && mcs11.max_latency <= 201.0;
    std::string detail = fmt("retx on: max latency %.1f / %.1f ms (bound 201)",
                             mcs7.max_latency, mcs11.max_latency);
    // retransmissions disabled: bound RRI + 1, checked on fresh runs
    RunConfig noretx = base;
    noretx.sim.retransmissions_enabled = false;
    select_mcs(noretx, 7);
    double max_off = 0.0;
    for (std::uint64_t seed : {1ull, 2ull}) {
      const auto res = run_one(noretx, seed);
      if (res.report.latency.count > 0) max_off = std::max(max_off, res.report.latency.max_ms);
      ok = ok && res.report.latency.min_ms > 0.0;
    }
    ok = ok && max_off <= 101.0;
    detail += fmt("; retx off: max latency %.1f ms (bound 101)", max_off);
    report("C3", ok, detail);
  }

  report("C4", mcs7.replay_ok && mcs11.replay_ok,
         mcs7.replay_ok && mcs11.replay_ok
             ? fmt("event-log recount matches every vehicle in all %ld runs bit-exactly",
                   mcs7.runs + mcs11.runs)
             : mcs7.replay_detail + mcs11.replay_detail);

  // ---- determinism --------------------------------------------------------
  {
    RunConfig cfg = base;
    select_mcs(cfg, 7);
    auto sc_cfg = cfg.scenario;
    sc_cfg.rng_seed = mix_seed(cfg.scenario.rng_seed, 1);
    const auto sc = deploy_scenario(sc_cfg);
    auto sim = cfg.sim;
    sim.run_seed = 1;
    const auto a = run_simulation(sc, sim, cfg.channel);
    const auto b = run_simulation(sc, sim, cfg.channel);
    bool ok = serialize_events(a.events) == serialize_events(b.events);

    const auto dir_a = std::filesystem::temp_directory_path() / "v2x_acc_det_a";
    const auto dir_b = std::filesystem::temp_directory_path() / "v2x_acc_det_b";
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    write_report(a.report, dir_a);
    write_report(b.report, dir_b);
    write_event_log_csv(a.events, dir_a / "events.csv");
    write_event_log_csv(b.events, dir_b / "events.csv");
    for (const char* f : {"pdr.csv", "latency_pdf.csv", "pdr_cdf.csv", "summary.json",
                          "events.csv"})
      ok = ok && slurp(dir_a / f) == slurp(dir_b / f);
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    report("C6", ok, "two executions with identical config and seeds are byte-identical "
                     "(event log and all report files)");
  }

  // ---- congestion control under forced overload --------------------------
  {
    RunConfig overload = base;
    select_mcs(overload, 7);
    overload.scenario.lambda_vehicles = 60;

    overload.sim.cc_mode = CcMode::Drop;
    const auto drop_run = run_one(overload, 1);
    bool drop_ok = true;
    int violating_nodes = 0;
    std::string drop_detail;
    const auto& stats = drop_run.stats;
    for (std::size_t w = 0; w < stats.node_window_cr.size(); ++w) {
      for (std::size_t n = 0; n < stats.node_window_cr[w].size(); ++n) {
        const long window_start = static_cast<long>(w) * overload.sim.cr_window_sf;
        const long first = stats.first_cc_violation_ms.empty()
                               ? -1
                               : stats.first_cc_violation_ms[n];
        if (first < 0 || window_start < first) continue;
        ++violating_nodes;
        if (stats.node_window_cr[w][n] > stats.node_window_limit[w][n] + 1e-9) {
          drop_ok = false;
          drop_detail = fmt("node %zu window %zu: cr %.5f > limit %.5f", n, w,
                            stats.node_window_cr[w][n], stats.node_window_limit[w][n]);
        }
      }
    }
    drop_ok = drop_ok && violating_nodes > 0;  // the overload must actually bite

    overload.sim.cc_mode = CcMode::PowerAdapt;
    const auto power_run = run_one(overload, 1);
    overload.sim.cc_mode = CcMode::Off;
    const auto off_run = run_one(overload, 1);
    auto last_quarter_mean = [](const RunResult& r) {
      const auto& xs = r.stats.mean_cbr_per_window;
      const std::size_t q = xs.size() - xs.size() / 4;
      double sum = 0.0;
      int n = 0;
      for (std::size_t i = q; i < xs.size(); ++i) {
        sum += xs[i];
        ++n;
      }
      return n ? sum / n : 0.0;
    };
    const double cbr_power = last_quarter_mean(power_run);
    const double cbr_off = last_quarter_mean(off_run);
    const bool power_ok = cbr_power < cbr_off;

    report("C7", drop_ok && power_ok,
           fmt("drop mode: CR <= limit in all %d post-violation windows%s; power mode: "
               "last-quarter CBR %.4f < %.4f (cc off)",
               violating_nodes, drop_detail.empty() ? "" : (" [" + drop_detail + "]").c_str(),
               cbr_power, cbr_off));
  }

  const auto elapsed =
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - t_start)
          .count();
  std::printf("---\n%s: %d criterion failure(s), %lld s total\n",
              g_failures == 0 ? "ALL CRITERIA PASS" : "FAILURES PRESENT", g_failures,
              static_cast<long long>(elapsed));
  if (elapsed > 600) {
    std::printf("[FAIL] runtime exceeded 10 minutes\n");
    ++g_failures;
  }
  return g_failures == 0 ? 0 : 1;
}
