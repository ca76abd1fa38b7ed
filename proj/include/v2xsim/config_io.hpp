#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "v2xsim/engine.hpp"
#include "v2xsim/errors.hpp"

namespace v2x {

// Everything one experiment needs: deployment, channel, run parameters and
// the seed list.
struct RunConfig {
  ScenarioConfig scenario;
  ChannelConfig channel;
  SimConfig sim;
  std::vector<std::uint64_t> seeds = {1};
};

namespace cfgdetail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& v, const std::string& field) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(field + ": not a number: '" + v + "'");
  }
}

inline long to_long(const std::string& v, const std::string& field) {
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(field + ": not an integer: '" + v + "'");
  }
}

inline bool to_bool(const std::string& v, const std::string& field) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(field + ": not a boolean: '" + v + "'");
}

inline std::vector<double> to_doubles(const std::string& v, const std::string& field) {
  std::vector<double> out;
  std::istringstream ss(v);
  std::string tok;
  while (ss >> tok) out.push_back(to_double(tok, field));
  return out;
}

}  // namespace cfgdetail

// Seed lists accept "5", "1,2,7" and "1..20".
inline std::vector<std::uint64_t> parse_seed_list(const std::string& spec) {
  std::vector<std::uint64_t> out;
  std::istringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = cfgdetail::trim(part);
    if (part.empty()) continue;
    const auto dots = part.find("..");
    if (dots != std::string::npos) {
      const long lo = cfgdetail::to_long(part.substr(0, dots), "seeds");
      const long hi = cfgdetail::to_long(part.substr(dots + 2), "seeds");
      if (lo > hi) throw ConfigError("seeds: empty range '" + part + "'");
      for (long s = lo; s <= hi; ++s) out.push_back(static_cast<std::uint64_t>(s));
    } else {
      out.push_back(static_cast<std::uint64_t>(cfgdetail::to_long(part, "seeds")));
    }
  }
  if (out.empty()) throw ConfigError("seeds: empty list");
  return out;
}

inline CcMode parse_cc_mode(const std::string& v) {
  if (v == "off") return CcMode::Off;
  if (v == "drop") return CcMode::Drop;
  if (v == "power") return CcMode::PowerAdapt;
  throw ConfigError("cc_mode: expected off|drop|power, got '" + v + "'");
}

// Parses the human-editable key/value scenario+run file. Sections:
// [scenario], [channel], [phy], [mac], [sim]. Repeated keys (road, junction,
// building, seeds) accumulate.
inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file: " + path.string());

  RunConfig cfg;
  cfg.scenario.roads.clear();
  cfg.scenario.junctions.clear();
  cfg.scenario.buildings.clear();

  std::string section;
  std::string line;
  int lineno = 0;
  int horizontal_roads = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = cfgdetail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": malformed section");
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = cfgdetail::trim(line.substr(0, eq));
    const std::string value = cfgdetail::trim(line.substr(eq + 1));
    const std::string field = section + "." + key;

    using namespace cfgdetail;
    if (section == "scenario") {
      auto& s = cfg.scenario;
      if (key == "area_width_m") s.area_width_m = to_double(value, field);
      else if (key == "area_height_m") s.area_height_m = to_double(value, field);
      else if (key == "rsu_range_m") s.rsu_range_m = to_double(value, field);
      else if (key == "lambda_vehicles") s.lambda_vehicles = to_double(value, field);
      else if (key == "theta_trucks") s.theta_trucks = to_double(value, field);
      else if (key == "fixed_count") s.fixed_count = to_bool(value, field);
      else if (key == "lane_width_m") s.lane_width_m = to_double(value, field);
      else if (key == "min_spacing_m") s.min_spacing_m = to_double(value, field);
      else if (key == "truck_length_m") s.truck_length_m = to_double(value, field);
      else if (key == "truck_width_m") s.truck_width_m = to_double(value, field);
      else if (key == "default_tx_power_dbm") s.default_tx_power_dbm = to_double(value, field);
      else if (key == "seed") s.rng_seed = static_cast<std::uint64_t>(to_long(value, field));
      else if (key == "road") {
        std::istringstream ss(value);
        std::string orient;
        double center, lo, hi;
        if (!(ss >> orient >> center >> lo >> hi))
          throw ConfigError(field + ": expected 'vertical|horizontal center lo hi'");
        RoadSegment r;
        r.center = center;
        r.lo = lo;
        r.hi = hi;
        if (orient == "vertical") {
          r.orientation = RoadOrientation::Vertical;
          r.forward = Direction::SouthNorth;
          r.backward = Direction::NorthSouth;
        } else if (orient == "horizontal") {
          r.orientation = RoadOrientation::Horizontal;
          r.forward = ++horizontal_roads == 1 ? Direction::WestEast1 : Direction::WestEast2;
          r.backward = horizontal_roads == 1 ? Direction::EastWest1 : Direction::EastWest2;
        } else {
          throw ConfigError(field + ": orientation must be vertical or horizontal");
        }
        s.roads.push_back(r);
      } else if (key == "junction") {
        const auto xs = to_doubles(value, field);
        if (xs.size() != 2) throw ConfigError(field + ": expected 'x y'");
        s.junctions.push_back({xs[0], xs[1]});
      } else if (key == "building") {
        const auto xs = to_doubles(value, field);
        if (xs.size() != 4) throw ConfigError(field + ": expected 'min_x min_y max_x max_y'");
        s.buildings.push_back({xs[0], xs[1], xs[2], xs[3]});
      } else {
        throw ConfigError(field + ": unknown key");
      }
    } else if (section == "channel") {
      auto& c = cfg.channel;
      if (key == "carrier_freq_ghz") c.carrier_freq_ghz = to_double(value, field);
      else if (key == "bandwidth_mhz") c.bandwidth_mhz = to_double(value, field);
      else if (key == "noise_figure_db") c.noise_figure_db = to_double(value, field);
      else if (key == "truck_blockage_loss_db") c.truck_blockage_loss_db = to_double(value, field);
      else if (key == "max_blocking_trucks") c.max_blocking_trucks = static_cast<int>(to_long(value, field));
      else if (key == "antenna_gain_dbi") c.antenna_gain_dbi = to_double(value, field);
      else if (key == "shadowing_sigma_los_db") c.shadowing_sigma_los_db = to_double(value, field);
      else if (key == "shadowing_sigma_nlos_db") c.shadowing_sigma_nlos_db = to_double(value, field);
      else if (key == "inband_emission_db") c.inband_emission_db = to_double(value, field);
      else if (key == "min_distance_m") c.min_distance_m = to_double(value, field);
      else throw ConfigError(field + ": unknown key");
    } else if (section == "phy") {
      auto& s = cfg.sim;
      if (key == "mcs_index") s.mcs_index = static_cast<int>(to_long(value, field));
      else if (key == "subchannels_per_subframe")
        s.subchannels_per_subframe = static_cast<int>(to_long(value, field));
      else if (key == "rx_sensitivity_dbm") s.rx_sensitivity_dbm = to_double(value, field);
      else if (key == "sci_sinr_threshold_db") s.sci_sinr_threshold_db = to_double(value, field);
      else if (key == "logistic_decode") s.logistic_decode = to_bool(value, field);
      else if (key == "logistic_slope") s.logistic_slope = to_double(value, field);
      else throw ConfigError(field + ": unknown key");
    } else if (section == "mac") {
      auto& s = cfg.sim;
      if (key == "rri_ms") s.sps.rri_sf = static_cast<int>(to_long(value, field));
      else if (key == "sensing_window_ms") s.sps.sensing_window_sf = static_cast<int>(to_long(value, field));
      else if (key == "t1_ms") s.sps.t1_sf = static_cast<int>(to_long(value, field));
      else if (key == "t2_ms") s.sps.t2_sf = static_cast<int>(to_long(value, field));
      else if (key == "rsrp_exclusion_dbm") s.sps.rsrp_exclusion_dbm = to_double(value, field);
      else if (key == "exclusion_step_db") s.sps.exclusion_step_db = to_double(value, field);
      else if (key == "cbr_busy_threshold_dbm") s.cbr_busy_threshold_dbm = to_double(value, field);
      else if (key == "cbr_window_ms") s.cbr_window_sf = static_cast<int>(to_long(value, field));
      else if (key == "cr_window_ms") s.cr_window_sf = static_cast<int>(to_long(value, field));
      else if (key == "cc_mode") s.cc_mode = parse_cc_mode(value);
      else if (key == "power_step_db") s.cc_power_step_db = to_double(value, field);
      else if (key == "min_tx_power_dbm") s.cc_min_tx_power_dbm = to_double(value, field);
      else throw ConfigError(field + ": unknown key");
    } else if (section == "sim") {
      auto& s = cfg.sim;
      if (key == "duration_ms") s.duration_ms = to_long(value, field);
      else if (key == "warmup_ms") s.warmup_ms = to_long(value, field);
      else if (key == "message_rate_hz") s.message_rate_hz = to_double(value, field);
      else if (key == "inter_broadcast_interval_ms")
        s.inter_broadcast_interval_ms = to_long(value, field);
      else if (key == "tx_power_dbm") s.tx_power_dbm = to_double(value, field);
      else if (key == "retransmissions_enabled") s.retransmissions_enabled = to_bool(value, field);
      else if (key == "seeds") cfg.seeds = parse_seed_list(value);
      else throw ConfigError(field + ": unknown key");
    } else {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": unknown section [" +
                        section + "]");
    }
  }
  return cfg;
}

// index,modulation_order,code_rate,rbs_for_message,subchannels_for_message,sinr_threshold_db
inline McsTable load_mcs_table_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open MCS table: " + path.string());
  McsTable table;
  std::string line;
  bool header = true;
  while (std::getline(f, line)) {
    line = cfgdetail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ss(line);
    std::string tok;
    std::vector<std::string> cols;
    while (std::getline(ss, tok, ',')) cols.push_back(cfgdetail::trim(tok));
    if (cols.size() != 6) throw ConfigError("mcs_table: expected 6 columns in '" + line + "'");
    McsEntry e;
    e.index = static_cast<int>(cfgdetail::to_long(cols[0], "mcs_table.index"));
    e.modulation_order = static_cast<int>(cfgdetail::to_long(cols[1], "mcs_table.modulation_order"));
    e.code_rate = cfgdetail::to_double(cols[2], "mcs_table.code_rate");
    e.rbs_for_message = static_cast<int>(cfgdetail::to_long(cols[3], "mcs_table.rbs_for_message"));
    e.subchannels_for_message =
        static_cast<int>(cfgdetail::to_long(cols[4], "mcs_table.subchannels_for_message"));
    e.sinr_threshold_db = cfgdetail::to_double(cols[5], "mcs_table.sinr_threshold_db");
    table.insert(e);
  }
  table.validate();
  return table;
}

// cbr_upper,cr_limit rows, ascending
inline CrLimitTable load_cr_limits_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open CR limit table: " + path.string());
  CrLimitTable table;
  table.bins.clear();
  std::string line;
  bool header = true;
  while (std::getline(f, line)) {
    line = cfgdetail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
      throw ConfigError("cr_limits: expected 2 columns in '" + line + "'");
    table.bins.emplace_back(cfgdetail::to_double(cfgdetail::trim(a), "cr_limits.cbr_upper"),
                            cfgdetail::to_double(cfgdetail::trim(b), "cr_limits.cr_limit"));
  }
  table.validate();
  return table;
}

}  // namespace v2x
