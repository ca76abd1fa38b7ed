// Command-line front end: deploy the urban scenario, run the Mode 4 sidelink
// simulation across seeds, and write PDR/latency reports.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "v2xsim/config_io.hpp"
#include "v2xsim/engine.hpp"
#include "v2xsim/report_io.hpp"
#include "v2xsim/scenario.hpp"

namespace {

struct RunOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::string seeds_spec;
  std::string cc_mode;
  std::string mcs_table_path;
  std::string cr_limits_path;
  int mcs = -1;
  int subchannels = -1;
  long duration_ms = -1;
  double lambda = -1.0;
  double theta = -1.0;
  int fixed_count = -1;
  int retransmissions = -1;
  bool dump_scenario = false;
  bool event_log = false;
  std::vector<std::string> channel_probe;  // "<distance> <class>" shortcut
};

int do_run(const RunOptions& opt) {
  v2x::RunConfig cfg =
      opt.config_path.empty() ? v2x::RunConfig{} : v2x::load_run_config(opt.config_path);
  if (!opt.seeds_spec.empty()) cfg.seeds = v2x::parse_seed_list(opt.seeds_spec);
  if (!opt.cc_mode.empty()) cfg.sim.cc_mode = v2x::parse_cc_mode(opt.cc_mode);
  if (!opt.mcs_table_path.empty()) cfg.sim.mcs_table = v2x::load_mcs_table_csv(opt.mcs_table_path);
  if (!opt.cr_limits_path.empty()) cfg.sim.cr_limits = v2x::load_cr_limits_csv(opt.cr_limits_path);
  if (opt.mcs >= 0) cfg.sim.mcs_index = opt.mcs;
  if (opt.subchannels >= 0) cfg.sim.subchannels_per_subframe = opt.subchannels;
  if (opt.duration_ms >= 0) cfg.sim.duration_ms = opt.duration_ms;
  if (opt.lambda >= 0.0) cfg.scenario.lambda_vehicles = opt.lambda;
  if (opt.theta >= 0.0) cfg.scenario.theta_trucks = opt.theta;
  if (opt.fixed_count >= 0) cfg.scenario.fixed_count = opt.fixed_count != 0;
  if (opt.retransmissions >= 0) cfg.sim.retransmissions_enabled = opt.retransmissions != 0;

  // MCS 7 pairs with 2 subchannels and MCS 11 with 7 unless overridden
  if (opt.mcs >= 0 && opt.subchannels < 0) {
    if (opt.mcs == 7) cfg.sim.subchannels_per_subframe = 2;
    if (opt.mcs == 11) cfg.sim.subchannels_per_subframe = 7;
  }

  const std::filesystem::path out_dir(opt.out_dir);
  std::filesystem::create_directories(out_dir);

  if (opt.dump_scenario) {
    auto sc_cfg = cfg.scenario;
    sc_cfg.rng_seed = v2x::mix_seed(cfg.scenario.rng_seed, cfg.seeds.front());
    const auto sc = v2x::deploy_scenario(sc_cfg);
    v2x::write_scenario_csv(sc, out_dir / "nodes.csv");
    std::printf("wrote %s (%zu nodes: %d vehicles, %d trucks, %zu RSUs)\n",
                (out_dir / "nodes.csv").c_str(), sc.nodes.size(), sc.vehicle_count(),
                sc.truck_count(), sc.rsu_ids().size());
    return 0;
  }

  std::vector<v2x::MetricsReport> reports;
  for (const auto seed : cfg.seeds) {
    auto sc_cfg = cfg.scenario;
    sc_cfg.rng_seed = v2x::mix_seed(cfg.scenario.rng_seed, seed);
    const auto sc = v2x::deploy_scenario(sc_cfg);
    auto sim = cfg.sim;
    sim.run_seed = seed;
    auto result = v2x::run_simulation(sc, sim, cfg.channel);
    result.report.seed = seed;
    if (opt.event_log)
      v2x::write_event_log_csv(result.events,
                               out_dir / ("events_seed_" + std::to_string(seed) + ".csv"));
    std::printf("seed %llu: vehicles %zu, PDR>0.9 %.4f, min PDR %.4f, mean latency %.2f ms\n",
                static_cast<unsigned long long>(seed), result.report.vehicles.size(),
                result.report.fraction_pdr_above(0.9), result.report.min_pdr(),
                result.report.latency.mean_ms());
    reports.push_back(std::move(result.report));
  }

  const auto agg = v2x::summarize(reports);
  v2x::write_aggregate(agg, reports, out_dir);
  std::printf("pooled: MCS %d over %d seeds: PDR>0.9 %.4f (se %.4f), min PDR %.4f, "
              "mean latency %.3f ms (se %.3f)\n",
              agg.mcs_index, agg.runs, agg.fraction_pdr_above_0_9, agg.fraction_stderr,
              agg.min_pdr, agg.mean_latency_ms, agg.mean_latency_stderr_ms);
  std::printf("reports written to %s\n", out_dir.c_str());
  return 0;
}

int do_probe(const std::string& config_path, double dist, const std::string& cls, int trucks) {
  v2x::RunConfig cfg =
      config_path.empty() ? v2x::RunConfig{} : v2x::load_run_config(config_path);
  v2x::LinkClass link;
  if (cls == "los") {
    link.kind = v2x::LinkKind::Los;
  } else if (cls == "building") {
    link.kind = v2x::LinkKind::NlosBuilding;
    link.blocking_buildings = {0};
  } else if (cls == "truck") {
    link.kind = v2x::LinkKind::NlosTruck;
    for (int i = 0; i < std::max(1, trucks); ++i) link.blocking_trucks.push_back(i);
  } else {
    std::fprintf(stderr, "unknown link class '%s' (expected los|building|truck)\n", cls.c_str());
    return 2;
  }
  const auto grid = v2x::make_grid(cfg.sim.subchannels_per_subframe);
  const auto mcs = cfg.sim.mcs_table.lookup(cfg.sim.mcs_index);
  v2x::validate_mcs_fits_grid(mcs, grid);
  const double noise =
      v2x::noise_floor_dbm(mcs.message_bandwidth_hz(), cfg.channel.noise_figure_db);
  const auto b = v2x::make_link_budget(cfg.sim.tx_power_dbm, dist, link, cfg.channel,
                                       v2x::kNegInfDbm, noise);
  std::printf("distance_m        %.3f\n", b.distance_m);
  std::printf("link_class        %s\n", v2x::link_kind_name(b.link_kind));
  std::printf("path_loss_db      %.4f\n", b.path_loss_db);
  std::printf("blockage_loss_db  %.4f\n", b.blockage_loss_db);
  std::printf("rx_power_dbm      %.4f\n", b.rx_power_dbm);
  std::printf("noise_dbm         %.4f (over %d RBs)\n", b.noise_dbm, mcs.rbs_for_message);
  std::printf("snr_db            %.4f\n", b.sinr_db);
  std::printf("mcs %d threshold  %.2f -> %s\n", mcs.index, mcs.sinr_threshold_db,
              b.sinr_db >= mcs.sinr_threshold_db &&
                      b.rx_power_dbm >= cfg.sim.rx_sensitivity_dbm
                  ? "decodes"
                  : "fails");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"v2xsim: LTE-V2X sidelink mode 4 system simulator"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "run the simulation across seeds and write reports");
  run->add_option("--config", run_opt.config_path, "scenario/run config file");
  run->add_option("--out", run_opt.out_dir, "output directory (default: out)");
  run->add_option("--seeds", run_opt.seeds_spec, "seed list, e.g. '1..20' or '3,5,8'");
  run->add_option("--mcs", run_opt.mcs, "MCS index (7 or 11 reproduce the reference setup)");
  run->add_option("--subchannels", run_opt.subchannels, "subchannels per subframe (1..10)");
  run->add_option("--duration-ms", run_opt.duration_ms, "simulated time per seed");
  run->add_option("--lambda", run_opt.lambda, "vehicles per direction");
  run->add_option("--theta", run_opt.theta, "trucks per direction");
  run->add_option("--fixed-count", run_opt.fixed_count,
                  "1 = deploy exactly lambda/theta per direction, 0 = Poisson");
  run->add_option("--retransmissions", run_opt.retransmissions, "1 = one blind retx, 0 = off");
  run->add_option("--cc-mode", run_opt.cc_mode, "congestion control: off|drop|power");
  run->add_option("--mcs-table", run_opt.mcs_table_path, "override MCS table CSV");
  run->add_option("--cr-limits", run_opt.cr_limits_path, "override CBR->CR-limit CSV");
  run->add_flag("--dump-scenario", run_opt.dump_scenario,
                "deploy only and write the node list CSV");
  run->add_flag("--event-log", run_opt.event_log, "write the per-seed event log CSV");
  run->add_option("--channel-probe", run_opt.channel_probe,
                  "print the budget for one link and exit: DISTANCE CLASS")
      ->expected(2);

  std::string probe_config, probe_class = "los";
  double probe_dist = 100.0;
  int probe_trucks = 1;
  auto* probe = app.add_subcommand("probe", "print the link budget for one link");
  probe->add_option("--config", probe_config, "scenario/run config file");
  probe->add_option("--distance", probe_dist, "link distance in meters")->required();
  probe->add_option("--class", probe_class, "los|building|truck");
  probe->add_option("--trucks", probe_trucks, "blocking truck count for class=truck");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (!run_opt.channel_probe.empty())
        return do_probe(run_opt.config_path, std::stod(run_opt.channel_probe[0]),
                        run_opt.channel_probe[1], 1);
      return do_run(run_opt);
    }
    if (probe->parsed()) return do_probe(probe_config, probe_dist, probe_class, probe_trucks);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
