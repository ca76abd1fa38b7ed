#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "v2xsim/engine.hpp"
#include "v2xsim/errors.hpp"
#include "v2xsim/metrics.hpp"
#include "v2xsim/scenario.hpp"

namespace v2x {

// All numeric output is serialized with 6 significant digits so reruns are
// byte-identical.
inline std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw IoError("cannot open for writing: " + p.string());
  return f;
}

}  // namespace detail

inline void write_scenario_csv(const Scenario& sc, const std::filesystem::path& path) {
  auto f = detail::open_out(path);
  f << "id,kind,x,y,direction,lane\n";
  for (const auto& n : sc.nodes) {
    f << n.id << ',' << node_kind_name(n.kind) << ',' << fmt6(n.position.x) << ','
      << fmt6(n.position.y) << ',' << (n.direction ? direction_name(*n.direction) : "") << ','
      << (n.lane_index ? std::to_string(*n.lane_index) : "") << '\n';
  }
  if (!f) throw IoError("write failed: " + path.string());
}

inline void write_event_log_csv(const EventLog& events, const std::filesystem::path& path) {
  auto f = detail::open_out(path);
  f << "time_ms,event,node,payload,subchannel,width,power_dbm,peer,outcome,sinr_db,flag\n";
  for (const auto& e : events) {
    f << e.t << ',' << event_type_name(e.type) << ',' << e.node << ',' << e.payload << ','
      << e.subchannel << ',' << e.width << ',' << fmt6(e.power_dbm) << ',' << e.peer << ','
      << (e.type == EventType::RxOutcome ? rx_outcome_name(e.outcome) : "") << ','
      << fmt6(e.sinr_db) << ',' << static_cast<int>(e.flag) << '\n';
  }
  if (!f) throw IoError("write failed: " + path.string());
}

inline void write_pdr_csv(std::span<const VehicleRow> rows, const std::filesystem::path& path,
                          const std::vector<std::uint64_t>* seeds = nullptr) {
  auto f = detail::open_out(path);
  f << (seeds ? "seed," : "") << "vehicle_id,rsu_id,distance_m,received,transmitted,dropped,pdr\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& v = rows[i];
    if (seeds) f << (*seeds)[i] << ',';
    f << v.vehicle_id << ',' << v.rsu_id << ',' << fmt6(v.distance_m) << ','
      << v.counters.received << ',' << v.counters.transmitted << ',' << v.counters.dropped << ','
      << (v.has_pdr ? fmt6(v.pdr_value) : "") << '\n';
  }
  if (!f) throw IoError("write failed: " + path.string());
}

inline void write_latency_pdf_csv(const LatencyStats& s, const std::filesystem::path& path) {
  auto f = detail::open_out(path);
  f << "bin_ms,probability\n";
  for (const auto& [bin, p] : latency_pdf(s)) f << bin << ',' << fmt6(p) << '\n';
  if (!f) throw IoError("write failed: " + path.string());
}

inline void write_pdr_cdf_csv(std::span<const VehicleRow> rows,
                              const std::filesystem::path& path) {
  auto f = detail::open_out(path);
  f << "pdr,cumulative_fraction\n";
  for (const auto& [x, frac] : pdr_cdf(rows)) f << fmt6(x) << ',' << fmt6(frac) << '\n';
  if (!f) throw IoError("write failed: " + path.string());
}

inline nlohmann::ordered_json report_to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["mcs_index"] = r.mcs_index;
  j["vehicles"] = r.vehicles.size();
  j["excluded_vehicles"] = r.excluded_vehicles;
  j["fraction_pdr_above_0_9"] = fmt6(r.fraction_pdr_above(0.9));
  j["min_pdr"] = fmt6(r.min_pdr());
  j["mean_latency_ms"] = fmt6(r.latency.mean_ms());
  j["latency_samples"] = r.latency.count;
  j["max_latency_ms"] = fmt6(r.latency.count ? r.latency.max_ms : 0.0);
  return j;
}

// Per-run report files: summary.json, pdr.csv, latency_pdf.csv, pdr_cdf.csv.
inline void write_report(const MetricsReport& r, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir.string());
  write_pdr_csv(r.vehicles, out_dir / "pdr.csv");
  write_latency_pdf_csv(r.latency, out_dir / "latency_pdf.csv");
  write_pdr_cdf_csv(r.vehicles, out_dir / "pdr_cdf.csv");
  auto f = detail::open_out(out_dir / "summary.json");
  f << report_to_json(r).dump(2) << '\n';
  if (!f) throw IoError("write failed: " + (out_dir / "summary.json").string());
}

inline nlohmann::ordered_json aggregate_to_json(const AggregateSummary& a) {
  nlohmann::ordered_json j;
  j["runs"] = a.runs;
  j["mcs_index"] = a.mcs_index;
  j["vehicles"] = a.vehicles;
  j["excluded_vehicles"] = a.excluded_vehicles;
  j["fraction_pdr_above_0_9"] = fmt6(a.fraction_pdr_above_0_9);
  j["fraction_pdr_above_0_9_stderr"] = fmt6(a.fraction_stderr);
  j["min_pdr"] = fmt6(a.min_pdr);
  j["mean_latency_ms"] = fmt6(a.mean_latency_ms);
  j["mean_latency_stderr_ms"] = fmt6(a.mean_latency_stderr_ms);
  j["max_latency_ms"] = fmt6(a.max_latency_ms);
  j["latency_samples"] = a.pooled_latency.count;
  j["per_rsu"] = nlohmann::ordered_json::array();
  for (const auto& r : a.per_rsu) {
    nlohmann::ordered_json e;
    e["rsu_id"] = r.rsu_id;
    e["vehicles"] = r.vehicles;
    e["fraction_pdr_above_0_9"] = fmt6(r.fraction_pdr_above_0_9);
    e["min_pdr"] = fmt6(r.min_pdr);
    j["per_rsu"].push_back(e);
  }
  return j;
}

// Pooled outputs across seeds plus one subdirectory per seed.
inline void write_aggregate(const AggregateSummary& agg,
                            std::span<const MetricsReport> reports,
                            const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir.string());

  std::vector<std::uint64_t> seed_col;
  std::vector<VehicleRow> rows;
  for (const auto& r : reports)
    for (const auto& v : r.vehicles) {
      rows.push_back(v);
      seed_col.push_back(r.seed);
    }
  write_pdr_csv(rows, out_dir / "pdr.csv", &seed_col);
  write_latency_pdf_csv(agg.pooled_latency, out_dir / "latency_pdf.csv");
  write_pdr_cdf_csv(agg.pooled_vehicles, out_dir / "pdr_cdf.csv");

  auto j = aggregate_to_json(agg);
  j["per_seed"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) j["per_seed"].push_back(report_to_json(r));
  auto f = detail::open_out(out_dir / "summary.json");
  f << j.dump(2) << '\n';
  if (!f) throw IoError("write failed: " + (out_dir / "summary.json").string());

  for (const auto& r : reports)
    write_report(r, out_dir / ("seed_" + std::to_string(r.seed)));
}

}  // namespace v2x
