#include "scenoforge/sim.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "scenoforge/net_compiler.hpp"

namespace scenoforge {

const Route* Scenario::av_route() const {
  for (const Route& route : routes) {
    if (route.vehicle_id == av_id) return &route;
  }
  return nullptr;
}

std::string_view sim_event_name(SimEventKind kind) {
  switch (kind) {
    case SimEventKind::depart: return "depart";
    case SimEventKind::arrive: return "arrive";
    case SimEventKind::collision: return "collision";
    case SimEventKind::timeout: return "timeout";
  }
  return "depart";
}

bool Trace::has_event(SimEventKind kind) const {
  for (const TraceEvent& event : events) {
    if (event.kind == kind) return true;
  }
  return false;
}

std::optional<double> Trace::event_time(SimEventKind kind,
                                        const std::string& id) const {
  for (const TraceEvent& event : events) {
    if (event.kind != kind) continue;
    for (const std::string& vehicle : event.vehicle_ids) {
      if (vehicle == id) return event.time;
    }
  }
  return std::nullopt;
}

namespace {

struct Vehicle {
  const Route* route = nullptr;
  std::string id;
  VehicleKind kind = VehicleKind::BV;
  double depart_time = 0.0;

  bool inserted = false;
  bool arrived = false;
  bool collided = false;
  int route_index = 0;
  int edge_idx = -1;  // index into net.edges
  int lane = 0;
  double offset = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  // Connection index just traversed; meaningful while offset < zone_end.
  int entry_connection = -1;
  double zone_end = 0.0;

  bool present() const { return inserted && !arrived; }  // occupies road space
  bool moving() const { return inserted && !arrived && !collided; }
};

class Simulation {
 public:
  Simulation(const Scenario& scenario, const SimConfig& config, AvPolicy policy)
      : scenario_(scenario), net_(scenario.network), cfg_(config), policy_(policy) {
    build_indexes();
    for (const Route& route : scenario.routes) {
      Vehicle vehicle;
      vehicle.route = &route;
      vehicle.id = route.vehicle_id;
      vehicle.kind = route.kind;
      vehicle.depart_time = route.depart_time;
      vehicles_.push_back(std::move(vehicle));
    }
    std::stable_sort(vehicles_.begin(), vehicles_.end(),
                     [](const Vehicle& a, const Vehicle& b) {
                       if (a.depart_time != b.depart_time) {
                         return a.depart_time < b.depart_time;
                       }
                       return a.id < b.id;
                     });
  }

  Trace run() {
    Trace trace;
    const int total_steps = static_cast<int>(std::floor(cfg_.horizon / cfg_.dt));
    for (int step = 0; step <= total_steps; ++step) {
      const double now = step * cfg_.dt;
      insert_pending(now);
      decide();
      advance(now);
      detect_collisions(now);
      record(trace, now);
      if (all_done()) break;
    }
    finish(trace);
    return trace;
  }

 private:
  // --- static network indexes ---------------------------------------------

  void build_indexes() {
    for (std::size_t i = 0; i < net_.edges.size(); ++i) {
      edge_index_[net_.edges[i].id] = static_cast<int>(i);
    }
    yields_ = connection_yields(net_);
    // Pairwise conflicts between connections that meet at the same junction:
    // crossing chords, or merges into the same target lane from different
    // approaches. Same-approach pairs are the car-following logic's job.
    const std::size_t n = net_.connections.size();
    conflicts_.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const Connection& a = net_.connections[i];
        const Connection& b = net_.connections[j];
        const CompiledEdge* a_from = net_.find_edge(a.from_edge);
        const CompiledEdge* b_from = net_.find_edge(b.from_edge);
        if (!a_from || !b_from) continue;
        if (a_from->to_junction != b_from->to_junction) continue;
        if (a.from_edge == b.from_edge && a.from_lane == b.from_lane) continue;
        bool conflict = false;
        if (a.to_edge == b.to_edge && a.to_lane == b.to_lane) {
          conflict = true;  // merge into the same lane
        } else {
          const auto ca = chord(a);
          const auto cb = chord(b);
          conflict = ca && cb &&
                     segments_cross(ca->first, ca->second, cb->first, cb->second);
        }
        conflicts_[i][j] = conflicts_[j][i] = conflict;
      }
    }
  }

  std::optional<std::pair<Point, Point>> chord(const Connection& connection) const {
    return connection_chord(net_, connection);
  }

  const CompiledEdge& edge_at(int idx) const { return net_.edges[idx]; }

  int edge_idx_of(const std::string& id) const {
    const auto it = edge_index_.find(id);
    if (it == edge_index_.end()) {
      throw std::invalid_argument(
          fmt::format("scenario references unknown edge \"{}\"", id));
    }
    return it->second;
  }

  const std::string* next_route_edge(const Vehicle& vehicle) const {
    const auto& edges = vehicle.route->edges;
    if (vehicle.route_index + 1 >= static_cast<int>(edges.size())) return nullptr;
    return &edges[vehicle.route_index + 1];
  }

  // Connection from (edge, lane) to the given edge; -1 when absent.
  int connection_from(int edge_idx, int lane, const std::string& to_edge) const {
    const std::string& from = edge_at(edge_idx).id;
    for (std::size_t i = 0; i < net_.connections.size(); ++i) {
      const Connection& c = net_.connections[i];
      if (c.from_edge == from && c.from_lane == lane && c.to_edge == to_edge) {
        return static_cast<int>(i);
      }
    }
    return -1;
  }

  int any_connection(int edge_idx, const std::string& to_edge) const {
    const std::string& from = edge_at(edge_idx).id;
    for (std::size_t i = 0; i < net_.connections.size(); ++i) {
      const Connection& c = net_.connections[i];
      if (c.from_edge == from && c.to_edge == to_edge) return static_cast<int>(i);
    }
    return -1;
  }

  double lane_length(int edge_idx, int lane) const {
    return edge_at(edge_idx).lanes[lane].length;
  }

  double lane_limit(int edge_idx, int lane) const {
    return edge_at(edge_idx).lanes[lane].speed;
  }

  // --- insertion ------------------------------------------------------------

  void insert_pending(double now) {
    for (Vehicle& vehicle : vehicles_) {
      if (vehicle.inserted || vehicle.depart_time > now + 1e-9) continue;
      const int edge_idx = edge_idx_of(vehicle.route->edges.front());
      const CompiledEdge& edge = edge_at(edge_idx);
      // Candidate lanes must allow continuing the route.
      std::vector<int> candidates;
      const std::string* next = nullptr;
      if (vehicle.route->edges.size() > 1) next = &vehicle.route->edges[1];
      for (int lane = 0; lane < static_cast<int>(edge.lanes.size()); ++lane) {
        if (!next || connection_from(edge_idx, lane, *next) >= 0) {
          candidates.push_back(lane);
        }
      }
      if (candidates.empty()) {
        for (int lane = 0; lane < static_cast<int>(edge.lanes.size()); ++lane) {
          candidates.push_back(lane);
        }
      }
      // Least occupied candidate lane, lowest index on ties.
      int best_lane = candidates.front();
      int best_count = 1 << 30;
      for (int lane : candidates) {
        int count = 0;
        for (const Vehicle& other : vehicles_) {
          if (other.present() && other.edge_idx == edge_idx && other.lane == lane) {
            ++count;
          }
        }
        if (count < best_count) {
          best_count = count;
          best_lane = lane;
        }
      }
      // The entry must be clear for the vehicle's own length plus minimum gap.
      bool blocked = false;
      for (const Vehicle& other : vehicles_) {
        if (!other.present() || other.edge_idx != edge_idx || other.lane != best_lane) {
          continue;
        }
        if (other.offset - cfg_.idm.veh_length < cfg_.idm.min_gap_s0) {
          blocked = true;
          break;
        }
      }
      if (blocked) continue;  // retry next step
      vehicle.inserted = true;
      vehicle.edge_idx = edge_idx;
      vehicle.lane = best_lane;
      vehicle.offset = 0.0;
      vehicle.speed = 0.0;
      departs_.push_back(vehicle.id);
    }
  }

  // --- leaders and IDM --------------------------------------------------------

  struct Obstacle {
    double gap = 0.0;    // bumper to bumper, m
    double speed = 0.0;  // obstacle speed
  };

  std::optional<Obstacle> leader_on_path(const Vehicle& vehicle) const {
    std::optional<Obstacle> best;
    auto consider = [&](double gap, double speed) {
      if (!best || gap < best->gap) best = Obstacle{gap, speed};
    };
    // Same lane, nearest vehicle ahead.
    for (const Vehicle& other : vehicles_) {
      if (&other == &vehicle || !other.present()) continue;
      if (other.edge_idx == vehicle.edge_idx && other.lane == vehicle.lane &&
          other.offset > vehicle.offset) {
        consider(other.offset - cfg_.idm.veh_length - vehicle.offset, other.speed);
      }
    }
    if (best) return best;
    // Across the junction, along this vehicle's route (bounded lookahead).
    double base = lane_length(vehicle.edge_idx, vehicle.lane) - vehicle.offset;
    int edge_idx = vehicle.edge_idx;
    int lane = vehicle.lane;
    int route_index = vehicle.route_index;
    for (int hop = 0; hop < 2 && base < 200.0; ++hop) {
      const auto& edges = vehicle.route->edges;
      if (route_index + 1 >= static_cast<int>(edges.size())) break;
      const std::string& next = edges[route_index + 1];
      int connection = connection_from(edge_idx, lane, next);
      if (connection < 0) connection = any_connection(edge_idx, next);
      if (connection < 0) break;
      const int next_idx = edge_idx_of(next);
      const int next_lane = net_.connections[connection].to_lane;
      for (const Vehicle& other : vehicles_) {
        if (&other == &vehicle || !other.present()) continue;
        if (other.edge_idx == next_idx && other.lane == next_lane) {
          consider(base + other.offset - cfg_.idm.veh_length, other.speed);
        }
      }
      if (best) return best;
      base += lane_length(next_idx, next_lane);
      edge_idx = next_idx;
      lane = next_lane;
      ++route_index;
    }
    return best;
  }

  double idm_accel(double speed, double limit,
                   const std::optional<Obstacle>& obstacle) const {
    const IdmParams& idm = cfg_.idm;
    const double free_term = std::pow(speed / std::max(limit, 0.1), 4.0);
    double interaction = 0.0;
    if (obstacle) {
      const double closing = speed - obstacle->speed;
      const double desired_gap =
          idm.min_gap_s0 +
          std::max(0.0, speed * idm.headway_T +
                            speed * closing /
                                (2.0 * std::sqrt(idm.a_max * idm.b_comf)));
      interaction = std::pow(desired_gap / std::max(obstacle->gap, 0.01), 2.0);
    }
    return idm.a_max * (1.0 - free_term - interaction);
  }

  // --- junction rules ---------------------------------------------------------

  bool in_entry_zone(const Vehicle& vehicle) const {
    return vehicle.present() && vehicle.entry_connection >= 0 &&
           vehicle.offset < vehicle.zone_end;
  }

  // Connection the vehicle will use to leave its current edge.
  int planned_connection(const Vehicle& vehicle) const {
    const std::string* next = next_route_edge(vehicle);
    if (!next) return -1;
    int connection = connection_from(vehicle.edge_idx, vehicle.lane, *next);
    if (connection < 0) connection = any_connection(vehicle.edge_idx, *next);
    return connection;
  }

  // Whether the vehicle must treat the junction ahead as blocked this step.
  bool must_hold_at_junction(const Vehicle& vehicle, int connection) const {
    if (connection < 0) return false;
    // Anyone inside the junction on a conflicting movement blocks entry.
    for (const Vehicle& other : vehicles_) {
      if (&other == &vehicle) continue;
      if (!in_entry_zone(other)) continue;
      if (conflicts_[connection][other.entry_connection]) return true;
    }
    if (!yields_[connection]) return false;
    // Yielding movements also wait for imminent higher-priority arrivals.
    for (const Vehicle& other : vehicles_) {
      if (&other == &vehicle || !other.moving()) continue;
      const int other_connection = planned_connection(other);
      if (other_connection < 0 || yields_[other_connection]) continue;
      if (!conflicts_[connection][other_connection]) continue;
      const double remaining =
          lane_length(other.edge_idx, other.lane) - other.offset;
      const double eta = remaining / std::max(other.speed, 0.5);
      if (eta <= cfg_.junction_yield_headway) return true;
    }
    return false;
  }

  // --- per-step phases ----------------------------------------------------------

  void decide() {
    pending_accel_.assign(vehicles_.size(), 0.0);
    pending_lane_.assign(vehicles_.size(), -1);
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      Vehicle& vehicle = vehicles_[i];
      if (!vehicle.moving()) continue;
      const double limit = lane_limit(vehicle.edge_idx, vehicle.lane);
      const double length = lane_length(vehicle.edge_idx, vehicle.lane);
      const std::optional<Obstacle> leader = leader_on_path(vehicle);
      double accel = idm_accel(vehicle.speed, limit, leader);

      const std::string* next = next_route_edge(vehicle);
      const bool lane_continues =
          !next || connection_from(vehicle.edge_idx, vehicle.lane, *next) >= 0;
      const int connection = planned_connection(vehicle);
      const double stop_gap = length - vehicle.offset - 1.0;
      if (!lane_continues) {
        // Hold at the edge end until a continuation lane opens up.
        accel = std::min(accel, idm_accel(vehicle.speed, limit,
                                          Obstacle{std::max(stop_gap, 0.01), 0.0}));
        try_route_lane_switch(i);
      } else if (next && must_hold_at_junction(vehicle, connection)) {
        accel = std::min(accel, idm_accel(vehicle.speed, limit,
                                          Obstacle{std::max(stop_gap, 0.01), 0.0}));
      }

      if (policy_ == AvPolicy::idm_with_lane_change &&
          vehicle.kind == VehicleKind::AV) {
        consider_lane_change(i, accel);
      }
      pending_accel_[i] = accel;
    }
  }

  // Deterministic switch onto an adjacent lane that continues the route,
  // taken as soon as the slot is free.
  void try_route_lane_switch(std::size_t index) {
    Vehicle& vehicle = vehicles_[index];
    const std::string* next = next_route_edge(vehicle);
    if (!next) return;
    const int lane_count =
        static_cast<int>(edge_at(vehicle.edge_idx).lanes.size());
    int best = -1;
    for (int lane = 0; lane < lane_count; ++lane) {
      if (lane == vehicle.lane) continue;
      if (connection_from(vehicle.edge_idx, lane, *next) < 0) continue;
      if (!lane_slot_free(vehicle, lane)) continue;
      if (best < 0 ||
          std::abs(lane - vehicle.lane) < std::abs(best - vehicle.lane)) {
        best = lane;
      }
    }
    if (best >= 0) pending_lane_[index] = best;
  }

  bool lane_slot_free(const Vehicle& vehicle, int lane) const {
    for (const Vehicle& other : vehicles_) {
      if (&other == &vehicle || !other.present()) continue;
      if (other.edge_idx != vehicle.edge_idx || other.lane != lane) continue;
      const double delta = other.offset - vehicle.offset;
      if (delta >= 0.0 && delta < cfg_.idm.veh_length + cfg_.idm.min_gap_s0) {
        return false;
      }
      if (delta < 0.0 && -delta < cfg_.idm.veh_length + cfg_.idm.min_gap_s0) {
        return false;
      }
    }
    return true;
  }

  void consider_lane_change(std::size_t index, double current_accel) {
    Vehicle& vehicle = vehicles_[index];
    const std::string* next = next_route_edge(vehicle);
    const int lane_count =
        static_cast<int>(edge_at(vehicle.edge_idx).lanes.size());
    double best_gain = 0.5;  // required advantage, m/s^2
    int best_lane = -1;
    for (int lane : {vehicle.lane - 1, vehicle.lane + 1}) {
      if (lane < 0 || lane >= lane_count) continue;
      if (next && connection_from(vehicle.edge_idx, lane, *next) < 0) continue;
      // IDM acceleration the AV would see on the candidate lane.
      Vehicle ghost = vehicle;
      ghost.lane = lane;
      const std::optional<Obstacle> leader = leader_on_path_ghost(ghost, index);
      const double candidate_accel =
          idm_accel(vehicle.speed, lane_limit(vehicle.edge_idx, lane), leader);
      if (candidate_accel - current_accel < best_gain) continue;
      // Rear gap on the target lane must absorb the follower's headway.
      bool safe = true;
      for (const Vehicle& other : vehicles_) {
        if (&other == &vehicle || !other.present()) continue;
        if (other.edge_idx != vehicle.edge_idx || other.lane != lane) continue;
        if (other.offset <= vehicle.offset) {
          const double rear_gap =
              vehicle.offset - cfg_.idm.veh_length - other.offset;
          if (rear_gap <
              cfg_.idm.min_gap_s0 + other.speed * cfg_.idm.headway_T) {
            safe = false;
            break;
          }
        } else if (other.offset - cfg_.idm.veh_length - vehicle.offset < 0.0) {
          safe = false;
          break;
        }
      }
      if (!safe) continue;
      best_gain = candidate_accel - current_accel;
      best_lane = lane;
    }
    if (best_lane >= 0) pending_lane_[index] = best_lane;
  }

  std::optional<Obstacle> leader_on_path_ghost(const Vehicle& ghost,
                                               std::size_t self_index) const {
    std::optional<Obstacle> best;
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      if (i == self_index) continue;
      const Vehicle& other = vehicles_[i];
      if (!other.present()) continue;
      if (other.edge_idx == ghost.edge_idx && other.lane == ghost.lane &&
          other.offset > ghost.offset) {
        const double gap = other.offset - cfg_.idm.veh_length - ghost.offset;
        if (!best || gap < best->gap) best = Obstacle{gap, other.speed};
      }
    }
    return best;
  }

  void advance(double now) {
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      Vehicle& vehicle = vehicles_[i];
      if (!vehicle.moving()) continue;
      if (pending_lane_[i] >= 0) vehicle.lane = pending_lane_[i];
      const double accel = pending_accel_[i];
      const double old_speed = vehicle.speed;
      vehicle.speed = std::max(0.0, old_speed + accel * cfg_.dt);
      vehicle.accel = (vehicle.speed - old_speed) / cfg_.dt;
      vehicle.offset += 0.5 * (old_speed + vehicle.speed) * cfg_.dt;

      // Edge transitions, possibly across several short edges per step.
      while (vehicle.moving()) {
        const double length = lane_length(vehicle.edge_idx, vehicle.lane);
        if (vehicle.offset < length) break;
        const std::string* next = next_route_edge(vehicle);
        if (!next) {
          vehicle.arrived = true;
          arrivals_.push_back({vehicle.id, now});
          break;
        }
        const int connection =
            connection_from(vehicle.edge_idx, vehicle.lane, *next);
        if (connection < 0) {
          // Still on a lane without continuation: hold at the very end.
          vehicle.offset = length - 0.01;
          vehicle.speed = 0.0;
          break;
        }
        vehicle.offset -= length;
        vehicle.edge_idx = edge_idx_of(*next);
        vehicle.lane = net_.connections[connection].to_lane;
        vehicle.route_index += 1;
        vehicle.entry_connection = connection;
        // Inside-the-junction window: until the vehicle has cleared the span
        // the connection chord covers on the new lane.
        const auto segment = connection_chord(net_, net_.connections[connection], 0.0);
        const double chord_len =
            segment ? distance(segment->first, segment->second) : 0.0;
        vehicle.zone_end = std::max(chord_len, cfg_.idm.veh_length);
      }
    }
  }

  void detect_collisions(double now) {
    std::vector<std::string> collided_now;
    auto wreck = [&](Vehicle& vehicle) {
      if (vehicle.collided) return;
      vehicle.collided = true;
      vehicle.speed = 0.0;
      vehicle.accel = 0.0;
      collided_now.push_back(vehicle.id);
    };
    // Rear-end: negative bumper-to-bumper gap on a shared lane.
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      for (std::size_t j = i + 1; j < vehicles_.size(); ++j) {
        Vehicle& a = vehicles_[i];
        Vehicle& b = vehicles_[j];
        if (!a.present() || !b.present()) continue;
        if (a.collided && b.collided) continue;
        if (a.edge_idx != b.edge_idx || a.lane != b.lane) continue;
        const double gap = std::abs(a.offset - b.offset) - cfg_.idm.veh_length;
        if (gap < 0.0) {
          wreck(a);
          wreck(b);
        }
      }
    }
    // Junction: simultaneous occupation of conflicting movements.
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      for (std::size_t j = i + 1; j < vehicles_.size(); ++j) {
        Vehicle& a = vehicles_[i];
        Vehicle& b = vehicles_[j];
        if (!in_entry_zone(a) || !in_entry_zone(b)) continue;
        if (a.collided && b.collided) continue;
        if (conflicts_[a.entry_connection][b.entry_connection]) {
          wreck(a);
          wreck(b);
        }
      }
    }
    if (!collided_now.empty()) {
      std::sort(collided_now.begin(), collided_now.end());
      collisions_.push_back({now, std::move(collided_now)});
    }
  }

  void record(Trace& trace, double now) {
    for (const std::string& id : departs_) {
      append_event(trace, now, SimEventKind::depart, {id});
    }
    departs_.clear();
    for (auto& [id, time] : arrivals_) {
      append_event(trace, time, SimEventKind::arrive, {id});
    }
    arrivals_.clear();
    for (auto& [time, ids] : collisions_) {
      append_event(trace, time, SimEventKind::collision, ids);
    }
    collisions_.clear();

    TraceStep step;
    step.time = now;
    for (const Vehicle& vehicle : vehicles_) {
      if (!vehicle.inserted || vehicle.arrived) continue;
      VehicleState state;
      state.id = vehicle.id;
      state.kind = vehicle.kind;
      state.route_index = vehicle.route_index;
      state.edge = edge_at(vehicle.edge_idx).id;
      state.lane_index = vehicle.lane;
      state.offset = vehicle.offset;
      state.speed = vehicle.speed;
      state.accel = vehicle.accel;
      state.active = !vehicle.collided;
      step.states.push_back(std::move(state));
    }
    trace.steps.push_back(std::move(step));
  }

  static void append_event(Trace& trace, double time, SimEventKind kind,
                           std::vector<std::string> ids) {
    // Same-step same-kind events merge so event times keep advancing.
    if (!trace.events.empty() && trace.events.back().time == time &&
        trace.events.back().kind == kind) {
      auto& back_ids = trace.events.back().vehicle_ids;
      back_ids.insert(back_ids.end(), ids.begin(), ids.end());
      return;
    }
    trace.events.push_back({time, kind, std::move(ids)});
  }

  bool all_done() const {
    for (const Vehicle& vehicle : vehicles_) {
      if (!vehicle.inserted || vehicle.moving()) return false;
    }
    return true;
  }

  void finish(Trace& trace) {
    std::vector<std::string> unfinished;
    for (const Vehicle& vehicle : vehicles_) {
      if (!vehicle.inserted || vehicle.moving()) unfinished.push_back(vehicle.id);
    }
    if (!unfinished.empty()) {
      std::sort(unfinished.begin(), unfinished.end());
      const double end_time = trace.steps.empty() ? 0.0 : trace.steps.back().time;
      append_event(trace, end_time, SimEventKind::timeout, std::move(unfinished));
    }
  }

  const Scenario& scenario_;
  const CompiledNetwork& net_;
  SimConfig cfg_;
  AvPolicy policy_;
  std::vector<Vehicle> vehicles_;
  std::map<std::string, int> edge_index_;
  std::vector<bool> yields_;
  std::vector<std::vector<bool>> conflicts_;
  std::vector<double> pending_accel_;
  std::vector<int> pending_lane_;
  std::vector<std::string> departs_;
  std::vector<std::pair<std::string, double>> arrivals_;
  std::vector<std::pair<double, std::vector<std::string>>> collisions_;
};

}  // namespace

Trace simulate(const Scenario& scenario, const SimConfig& config,
               AvPolicy av_policy) {
  if (!scenario.av_route()) {
    throw std::invalid_argument(
        fmt::format("scenario has no route for AV \"{}\"", scenario.av_id));
  }
  for (const Route& route : scenario.routes) {
    if (route.edges.empty()) {
      throw std::invalid_argument(
          fmt::format("route of \"{}\" is empty", route.vehicle_id));
    }
  }
  return Simulation(scenario, config, av_policy).run();
}

}  // namespace scenoforge
