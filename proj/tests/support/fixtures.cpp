#include "support/fixtures.hpp"

#include <fmt/format.h>

#include <stdexcept>

#include "scenoforge/route_planner.hpp"
#include "support/paths.hpp"

namespace sftest {

using namespace scenoforge;

namespace {

NodeDecl node(std::string id, double x, double y) {
  NodeDecl out;
  out.id = std::move(id);
  out.pos = {x, y};
  return out;
}

EdgeDecl edge(std::string id, std::string from, std::string to, int lanes,
              double speed) {
  EdgeDecl out;
  out.id = std::move(id);
  out.from = std::move(from);
  out.to = std::move(to);
  out.num_lanes = lanes;
  out.speed = speed;
  return out;
}

}  // namespace

NetworkPlan straight_plan(double length_m, int lanes, double speed) {
  NetworkPlan plan;
  plan.nodes.push_back(node("a", 0.0, 0.0));
  plan.nodes.push_back(node("b", length_m, 0.0));
  plan.edges.push_back(edge("road", "a", "b", lanes, speed));
  return plan;
}

NetworkPlan t_plan() {
  NetworkPlan plan;
  plan.nodes.push_back(node("center", 0.0, 0.0));
  plan.nodes.push_back(node("west", -100.0, 0.0));
  plan.nodes.push_back(node("east", 100.0, 0.0));
  plan.nodes.push_back(node("south", 0.0, -80.0));
  auto arm = [&](const std::string& name, const std::string& other) {
    plan.edges.push_back(edge(name + "_in", other, "center", 2, 13.89));
    plan.edges.push_back(edge(name + "_out", "center", other, 2, 13.89));
  };
  arm("west", "west");
  arm("east", "east");
  arm("south", "south");
  return plan;
}

NetworkPlan fork_plan(double speed) {
  NetworkPlan plan;
  plan.nodes.push_back(node("a", -300.0, 0.0));
  plan.nodes.push_back(node("gore", 0.0, 0.0));
  plan.nodes.push_back(node("n_end", 187.94, 68.40));   // 200 m at +20 deg
  plan.nodes.push_back(node("s_end", 187.94, -68.40));  // 200 m at -20 deg
  plan.edges.push_back(edge("main", "a", "gore", 2, speed));
  plan.edges.push_back(edge("out_left", "gore", "n_end", 1, speed));
  plan.edges.push_back(edge("out_right", "gore", "s_end", 1, speed));
  return plan;
}

NetworkPlan diamond_plan() {
  // entry -> (short slow arm over p | longer fast arm over q) -> finish.
  NetworkPlan plan;
  plan.nodes.push_back(node("s0", -100.0, 0.0));
  plan.nodes.push_back(node("s", 0.0, 0.0));
  plan.nodes.push_back(node("p", 100.0, 60.0));
  plan.nodes.push_back(node("q", 100.0, -80.0));
  plan.nodes.push_back(node("t", 200.0, 0.0));
  plan.nodes.push_back(node("z", 300.0, 0.0));
  plan.edges.push_back(edge("entry", "s0", "s", 1, 10.0));
  plan.edges.push_back(edge("arm_slow", "s", "p", 1, 8.0));    // ~116.6 m
  plan.edges.push_back(edge("cont_slow", "p", "t", 1, 8.0));
  plan.edges.push_back(edge("arm_fast", "s", "q", 1, 25.0));   // ~128.1 m
  plan.edges.push_back(edge("cont_fast", "q", "t", 1, 25.0));
  plan.edges.push_back(edge("finish", "t", "z", 1, 10.0));
  return plan;
}

NetworkPlan offramp_plan() {
  NetworkPlan plan;
  plan.nodes.push_back(node("approach", -400.0, 0.0));
  plan.nodes.push_back(node("gore", 0.0, 0.0));
  plan.nodes.push_back(node("east_end", 400.0, 0.0));
  plan.nodes.push_back(node("ramp_end", 200.0, -88.0));
  plan.edges.push_back(edge("mainline_in", "approach", "gore", 2, 33.33));
  plan.edges.push_back(edge("mainline_out", "gore", "east_end", 2, 33.33));
  EdgeDecl ramp = edge("ramp", "gore", "ramp_end", 1, 16.67);
  ramp.shape = {{0.0, 0.0}, {80.0, -8.0}, {150.0, -38.0}, {200.0, -88.0}};
  plan.edges.push_back(std::move(ramp));
  return plan;
}

CompiledNetwork compile_or_die(const NetworkPlan& plan) {
  auto compiled = compile(plan);
  if (!compiled.ok()) {
    std::string message = "fixture plan does not compile:";
    for (const auto& diag : compiled.diagnostics()) {
      message += "\n  " + to_string(diag);
    }
    throw std::runtime_error(message);
  }
  return std::move(compiled.value().network);
}

namespace {

Scenario fork_scenario_from_trips(const std::vector<Trip>& trips) {
  Scenario scenario;
  scenario.network = compile_or_die(fork_plan());
  const ExpandResult expanded = expand_trips(scenario.network, trips);
  if (!expanded.failures.empty()) {
    throw std::runtime_error("fork fixture trips must all be routable");
  }
  scenario.routes = expanded.routes;
  for (const Trip& trip : trips) {
    if (trip.kind == VehicleKind::AV) scenario.av_id = trip.vehicle_id;
  }
  scenario.request = "crowded fork";
  return scenario;
}

}  // namespace

Scenario crowded_fork_scenario() {
  // bv_a and bv_b depart together on the two main-road lanes, follow
  // identical dynamics and enter the gore simultaneously on crossing
  // movements: bv_a from the inner lane (0) aims at the right branch while
  // bv_b from the outer lane (1) aims at the left branch. Their movements
  // cross at the gore and wreck both branch entries; bv_tail and the AV
  // queue behind the wreck until the horizon.
  std::vector<Trip> trips;
  trips.push_back({"bv_a", VehicleKind::BV, "main", "out_right", 0.0});
  trips.push_back({"bv_b", VehicleKind::BV, "main", "out_left", 0.0});
  trips.push_back({"bv_tail", VehicleKind::BV, "main", "out_right", 2.0});
  trips.push_back({"av", VehicleKind::AV, "main", "out_left", 4.0});
  return fork_scenario_from_trips(trips);
}

Scenario random_fork_scenario(std::uint64_t seed) {
  const CompiledNetwork net = compile_or_die(fork_plan());
  TripGenParams params;
  params.arrival_rate = 0.05;
  params.horizon = 60.0;
  params.seed = seed;
  auto generated = random_trips(net, params);
  if (!generated.ok()) throw std::runtime_error("random fork trips failed");
  auto sampled = subsample_trips(generated.value(),
                                 std::min<std::size_t>(3, generated.value().size()),
                                 seed);
  std::vector<Trip> trips = sampled.value();
  trips.push_back({"av", VehicleKind::AV, "main", "out_left", 4.0});
  return fork_scenario_from_trips(trips);
}

RunConfig replay_run(const std::string& fixture_name, const std::string& request,
                     const std::string& out_dir) {
  RunConfig config;
  config.request = request;
  config.backend.mode = BackendMode::replay;
  config.backend.transcript_dir =
      (fixture_dir() / "transcripts" / fixture_name).string();
  config.out_dir = out_dir;
  config.template_dir = template_dir().string();
  return config;
}

}  // namespace sftest
