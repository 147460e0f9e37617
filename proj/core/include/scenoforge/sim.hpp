#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scenoforge/llm.hpp"
#include "scenoforge/net_model.hpp"

namespace scenoforge {

struct IdmParams {
  double a_max = 2.0;       // m/s^2
  double b_comf = 3.0;      // m/s^2
  double headway_T = 1.2;   // s
  double min_gap_s0 = 2.0;  // m
  double veh_length = 5.0;  // m
};

struct SimConfig {
  double dt = 0.1;        // s
  double horizon = 120.0; // s
  IdmParams idm;
  double junction_yield_headway = 3.0;  // s
};

enum class AvPolicy { idm_follow, idm_with_lane_change };

// One generated scenario: the unit of simulation and evaluation.
struct Scenario {
  CompiledNetwork network;
  std::vector<Route> routes;
  std::string av_id;
  std::optional<ScenarioDescription> description;
  std::string request;

  const Route* av_route() const;
};

enum class SimEventKind { depart, arrive, collision, timeout };

std::string_view sim_event_name(SimEventKind kind);

struct VehicleState {
  std::string id;
  VehicleKind kind = VehicleKind::BV;
  int route_index = 0;   // position within the vehicle's route edge list
  std::string edge;
  int lane_index = 0;
  double offset = 0.0;   // front position along the lane, m
  double speed = 0.0;
  double accel = 0.0;
  bool active = true;    // false after arrival or collision
};

struct TraceStep {
  double time = 0.0;
  std::vector<VehicleState> states;  // every vehicle inserted so far
};

struct TraceEvent {
  double time = 0.0;
  SimEventKind kind = SimEventKind::depart;
  std::vector<std::string> vehicle_ids;
};

struct Trace {
  std::vector<TraceStep> steps;
  std::vector<TraceEvent> events;

  bool has_event(SimEventKind kind) const;
  std::optional<double> event_time(SimEventKind kind, const std::string& id) const;
};

// Minimal microscopic simulation: IDM longitudinal dynamics against the
// nearest leader (same lane, or across the junction along the route),
// right-of-way yielding at junction boundaries, optional threshold lane
// changes for the AV, collision on negative same-lane gap or simultaneous
// occupation of conflicting junction movements. Collided vehicles halt in
// place and stay as obstacles; arrived vehicles leave the world.
// Deterministic for equal inputs.
Trace simulate(const Scenario& scenario, const SimConfig& config = SimConfig{},
               AvPolicy av_policy = AvPolicy::idm_follow);

}  // namespace scenoforge
