#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "v2xsim/errors.hpp"
#include "v2xsim/geometry.hpp"
#include "v2xsim/rng.hpp"

namespace v2x {

// The six traffic directions of the urban grid: one vertical road and two
// horizontal roads, each two-way.
enum class Direction : int {
  SouthNorth = 0,
  NorthSouth = 1,
  EastWest1 = 2,
  WestEast1 = 3,
  EastWest2 = 4,
  WestEast2 = 5,
};

constexpr int kNumDirections = 6;

inline const char* direction_name(Direction d) {
  switch (d) {
    case Direction::SouthNorth: return "south_north";
    case Direction::NorthSouth: return "north_south";
    case Direction::EastWest1: return "east_west_1";
    case Direction::WestEast1: return "west_east_1";
    case Direction::EastWest2: return "east_west_2";
    case Direction::WestEast2: return "west_east_2";
  }
  return "?";
}

enum class RoadOrientation { Vertical, Horizontal };

// One two-way road segment hosting two of the six directions, two lanes each.
struct RoadSegment {
  RoadOrientation orientation = RoadOrientation::Vertical;
  double center = 0.0;  // x for vertical roads, y for horizontal roads
  double lo = 0.0;      // span along the road axis
  double hi = 0.0;
  Direction forward = Direction::SouthNorth;   // heading +axis
  Direction backward = Direction::NorthSouth;  // heading -axis
};

enum class NodeKind { Rsu, Vehicle, Truck };

inline const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Rsu: return "rsu";
    case NodeKind::Vehicle: return "vehicle";
    case NodeKind::Truck: return "truck";
  }
  return "?";
}

using NodeId = int;

struct Node {
  NodeId id = -1;
  NodeKind kind = NodeKind::Vehicle;
  Vec2 position;
  std::optional<Direction> direction;  // absent for RSUs
  std::optional<int> lane_index;       // 0 = inner, 1 = outer; absent for RSUs
  double tx_power_dbm = 23.0;
  std::optional<Rect> extent;  // truck footprint
};

struct ScenarioConfig {
  double area_width_m = 240.0;
  double area_height_m = 520.0;
  std::vector<RoadSegment> roads;    // filled by default_roads() when empty
  std::vector<Vec2> junctions;       // RSU positions
  double rsu_range_m = 150.0;
  double lambda_vehicles = 20.0;     // mean vehicles per direction
  double theta_trucks = 2.0;         // mean trucks per direction
  bool fixed_count = false;          // exactly lambda/theta per direction
  std::vector<Rect> buildings;       // filled by default_buildings() when empty
  double lane_width_m = 3.5;
  double min_spacing_m = 5.0;        // longitudinal spacing within a lane
  double truck_length_m = 14.0;
  double truck_width_m = 2.6;
  double default_tx_power_dbm = 23.0;
  std::uint64_t rng_seed = 1;

  static std::vector<RoadSegment> default_roads() {
    return {
        {RoadOrientation::Vertical, 120.0, 0.0, 520.0, Direction::SouthNorth, Direction::NorthSouth},
        {RoadOrientation::Horizontal, 130.0, 0.0, 240.0, Direction::WestEast1, Direction::EastWest1},
        {RoadOrientation::Horizontal, 390.0, 0.0, 240.0, Direction::WestEast2, Direction::EastWest2},
    };
  }

  static std::vector<Vec2> default_junctions() {
    return {{120.0, 130.0}, {120.0, 390.0}};
  }

  // City blocks between the road corridors, inset 5 m from the road edges.
  // Placed point-symmetric about the area center.
  static std::vector<Rect> default_buildings() {
    return {
        {0.0, 142.0, 108.0, 378.0},    // mid-left block
        {132.0, 142.0, 240.0, 378.0},  // mid-right block
        {0.0, 0.0, 108.0, 118.0},      // lower-left block
        {132.0, 402.0, 240.0, 520.0},  // upper-right block
    };
  }

  void apply_defaults() {
    if (roads.empty()) roads = default_roads();
    if (junctions.empty()) junctions = default_junctions();
    if (buildings.empty()) buildings = default_buildings();
  }

  Rect area() const { return {0.0, 0.0, area_width_m, area_height_m}; }

  void validate() const {
    if (area_width_m <= 0.0 || area_height_m <= 0.0)
      throw ConfigError("scenario.area: dimensions must be positive");
    if (rsu_range_m <= 0.0) throw ConfigError("scenario.rsu_range_m: must be positive");
    if (lambda_vehicles < 0.0) throw ConfigError("scenario.lambda_vehicles: must be >= 0");
    if (theta_trucks < 0.0) throw ConfigError("scenario.theta_trucks: must be >= 0");
    if (lane_width_m <= 0.0) throw ConfigError("scenario.lane_width_m: must be positive");
    if (min_spacing_m < 0.0) throw ConfigError("scenario.min_spacing_m: must be >= 0");
    if (default_tx_power_dbm < -30.0 || default_tx_power_dbm > 33.0)
      throw ConfigError("scenario.default_tx_power_dbm: outside [-30, 33] dBm");

    const Rect a = area();
    int vertical = 0, horizontal = 0;
    for (const auto& r : roads) {
      if (r.lo >= r.hi) throw ConfigError("scenario.road: empty span");
      if (r.orientation == RoadOrientation::Vertical) {
        ++vertical;
        if (r.center < a.min_x || r.center > a.max_x || r.lo < a.min_y || r.hi > a.max_y)
          throw ConfigError("scenario.road: vertical road outside area");
      } else {
        ++horizontal;
        if (r.center < a.min_y || r.center > a.max_y || r.lo < a.min_x || r.hi > a.max_x)
          throw ConfigError("scenario.road: horizontal road outside area");
      }
    }
    if (vertical != 1 || horizontal != 2)
      throw ConfigError("scenario.roads: expected 1 vertical and 2 horizontal segments (6 directions)");
    if (junctions.size() != 2) throw ConfigError("scenario.junctions: expected exactly 2");
    for (const auto& j : junctions)
      if (!a.contains(j)) throw ConfigError("scenario.junction: outside area");
    for (const auto& b : buildings)
      if (!a.contains_rect(b) || b.width() <= 0.0 || b.height() <= 0.0)
        throw ConfigError("scenario.building: degenerate or outside area");
  }
};

// The deployed world. Immutable after construction.
struct Scenario {
  ScenarioConfig config;
  std::vector<Node> nodes;  // RSUs first, then vehicles/trucks in deployment order

  std::vector<NodeId> rsu_ids() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes)
      if (n.kind == NodeKind::Rsu) out.push_back(n.id);
    return out;
  }

  int vehicle_count() const {
    int c = 0;
    for (const auto& n : nodes) c += n.kind == NodeKind::Vehicle;
    return c;
  }

  int truck_count() const {
    int c = 0;
    for (const auto& n : nodes) c += n.kind == NodeKind::Truck;
    return c;
  }
};

enum class LinkKind { Los, NlosBuilding, NlosTruck };

inline const char* link_kind_name(LinkKind k) {
  switch (k) {
    case LinkKind::Los: return "los";
    case LinkKind::NlosBuilding: return "nlos_building";
    case LinkKind::NlosTruck: return "nlos_truck";
  }
  return "?";
}

struct LinkClass {
  LinkKind kind = LinkKind::Los;
  std::vector<NodeId> blocking_trucks;  // truck node ids, ascending
  std::vector<int> blocking_buildings;  // indices into config.buildings, ascending

  bool los() const { return kind == LinkKind::Los; }
};

namespace detail {

// Lateral offsets of the two lanes of a direction relative to the road center.
// Right-hand traffic: lanes sit on the right side of the heading.
inline std::array<double, 2> lane_offsets(Direction d, double lane_width) {
  const double inner = 0.5 * lane_width;
  const double outer = 1.5 * lane_width;
  switch (d) {
    case Direction::SouthNorth: return {+inner, +outer};  // heading +y, right = +x
    case Direction::NorthSouth: return {-inner, -outer};
    case Direction::WestEast1:
    case Direction::WestEast2: return {-inner, -outer};   // heading +x, right = -y
    case Direction::EastWest1:
    case Direction::EastWest2: return {+inner, +outer};
  }
  return {0.0, 0.0};
}

inline const RoadSegment& road_for_direction(const ScenarioConfig& cfg, Direction d) {
  for (const auto& r : cfg.roads)
    if (r.forward == d || r.backward == d) return r;
  throw ConfigError(std::string("scenario.roads: no road hosts direction ") + direction_name(d));
}

// Positions of n points on [lo, hi] that are uniform conditioned on a minimum
// gap: draw order statistics on the shrunk interval, then re-inflate.
inline std::vector<double> place_with_min_gap(int n, double lo, double hi, double gap,
                                              Rng& rng, const char* what) {
  std::vector<double> out;
  if (n == 0) return out;
  const double usable = (hi - lo) - gap * (n - 1);
  if (usable < 0.0)
    throw DeploymentError(std::string("deployment overflow: cannot fit ") +
                          std::to_string(n) + " nodes with min spacing on " + what);
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(rng.uniform(0.0, usable));
  std::sort(out.begin(), out.end());
  for (int i = 0; i < n; ++i) out[i] += lo + gap * i;
  return out;
}

}  // namespace detail

// Randomly deploys vehicles and trucks at the configured densities and places
// one RSU at each junction. Deterministic for a given config (seed included).
inline Scenario deploy_scenario(ScenarioConfig cfg) {
  cfg.apply_defaults();
  cfg.validate();

  Scenario sc;
  sc.config = cfg;
  Rng rng(mix_seed(cfg.rng_seed, 0x5ce0u));

  NodeId next_id = 0;
  for (const auto& j : cfg.junctions) {
    Node rsu;
    rsu.id = next_id++;
    rsu.kind = NodeKind::Rsu;
    rsu.position = j;
    rsu.tx_power_dbm = cfg.default_tx_power_dbm;
    sc.nodes.push_back(rsu);
  }

  for (int di = 0; di < kNumDirections; ++di) {
    const Direction dir = static_cast<Direction>(di);
    const RoadSegment& road = detail::road_for_direction(cfg, dir);
    const auto offsets = detail::lane_offsets(dir, cfg.lane_width_m);

    const int n_veh = cfg.fixed_count ? static_cast<int>(cfg.lambda_vehicles)
                                      : rng.poisson(cfg.lambda_vehicles);
    const int n_trk = cfg.fixed_count ? static_cast<int>(cfg.theta_trucks)
                                      : rng.poisson(cfg.theta_trucks);

    // assign each node a lane, then lay lanes out independently
    std::array<std::vector<NodeKind>, 2> lanes;
    for (int i = 0; i < n_veh; ++i) lanes[rng.uniform_u32(2)].push_back(NodeKind::Vehicle);
    for (int i = 0; i < n_trk; ++i) lanes[rng.uniform_u32(2)].push_back(NodeKind::Truck);

    for (int lane = 0; lane < 2; ++lane) {
      auto& members = lanes[lane];
      if (members.empty()) continue;
      const auto pos = detail::place_with_min_gap(
          static_cast<int>(members.size()), road.lo, road.hi, cfg.min_spacing_m, rng,
          direction_name(dir));
      // shuffle kinds along the lane so trucks are not clustered by draw order
      for (std::size_t i = members.size(); i > 1; --i)
        std::swap(members[i - 1], members[rng.uniform_u32(static_cast<std::uint32_t>(i))]);

      for (std::size_t i = 0; i < members.size(); ++i) {
        Node n;
        n.id = next_id++;
        n.kind = members[i];
        n.direction = dir;
        n.lane_index = lane;
        n.tx_power_dbm = cfg.default_tx_power_dbm;
        if (road.orientation == RoadOrientation::Vertical)
          n.position = {road.center + offsets[lane], pos[i]};
        else
          n.position = {pos[i], road.center + offsets[lane]};
        if (n.kind == NodeKind::Truck) {
          const double hl = 0.5 * cfg.truck_length_m;
          const double hw = 0.5 * cfg.truck_width_m;
          if (road.orientation == RoadOrientation::Vertical)
            n.extent = Rect{n.position.x - hw, n.position.y - hl, n.position.x + hw, n.position.y + hl};
          else
            n.extent = Rect{n.position.x - hl, n.position.y - hw, n.position.x + hl, n.position.y + hw};
        }
        sc.nodes.push_back(n);
      }
    }
  }
  return sc;
}

// Classifies the 2-D link tx->rx. Building blockage takes precedence over
// truck blockage; the endpoints' own footprints never block.
inline LinkClass classify_link(const Node& tx, const Node& rx, const Scenario& sc) {
  LinkClass out;
  for (std::size_t i = 0; i < sc.config.buildings.size(); ++i)
    if (segment_crosses_rect(tx.position, rx.position, sc.config.buildings[i]))
      out.blocking_buildings.push_back(static_cast<int>(i));
  if (!out.blocking_buildings.empty()) {
    out.kind = LinkKind::NlosBuilding;
    return out;
  }
  for (const auto& n : sc.nodes) {
    if (n.kind != NodeKind::Truck || !n.extent) continue;
    if (n.id == tx.id || n.id == rx.id) continue;
    if (segment_crosses_rect(tx.position, rx.position, *n.extent))
      out.blocking_trucks.push_back(n.id);
  }
  if (!out.blocking_trucks.empty()) out.kind = LinkKind::NlosTruck;
  return out;
}

// Range test is boundary-inclusive: a vehicle exactly at rsu_range_m counts.
inline bool in_rsu_range(const Node& rsu, const Node& v, const ScenarioConfig& cfg) {
  return distance(rsu.position, v.position) <= cfg.rsu_range_m;
}

// Nearest in-range RSU for metric attribution; ties broken by lower id.
inline std::optional<NodeId> measurement_rsu(const Node& v, const Scenario& sc) {
  std::optional<NodeId> best;
  double best_d = 0.0;
  for (const auto& n : sc.nodes) {
    if (n.kind != NodeKind::Rsu) continue;
    const double d = distance(n.position, v.position);
    if (d > sc.config.rsu_range_m) continue;
    if (!best || d < best_d) {
      best = n.id;
      best_d = d;
    }
  }
  return best;
}

}  // namespace v2x
