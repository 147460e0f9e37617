#include <benchmark/benchmark.h>
#include <fmt/format.h>

#include <cmath>

#include "scenoforge/net_compiler.hpp"
#include "scenoforge/net_model.hpp"
#include "scenoforge/rag.hpp"
#include "scenoforge/route_planner.hpp"
#include "scenoforge/sim.hpp"

namespace {

using namespace scenoforge;

// Hub with `arms` two-way spokes.
NetworkPlan star_plan(int arms) {
  NetworkPlan plan;
  NodeDecl hub;
  hub.id = "hub";
  plan.nodes.push_back(hub);
  for (int i = 0; i < arms; ++i) {
    NodeDecl node;
    node.id = fmt::format("n{}", i);
    const double angle = 2.0 * 3.14159265 * i / arms;
    node.pos = {400.0 * std::cos(angle), 400.0 * std::sin(angle)};
    plan.nodes.push_back(node);
    EdgeDecl in;
    in.id = fmt::format("in{}", i);
    in.from = node.id;
    in.to = "hub";
    in.num_lanes = 2;
    in.speed = 13.89;
    plan.edges.push_back(in);
    EdgeDecl out = in;
    out.id = fmt::format("out{}", i);
    out.from = "hub";
    out.to = node.id;
    plan.edges.push_back(out);
  }
  return plan;
}

void bench_compile(benchmark::State& state) {
  const NetworkPlan plan = star_plan(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto compiled = compile(plan);
    benchmark::DoNotOptimize(compiled.ok());
  }
}
BENCHMARK(bench_compile)->Arg(4)->Arg(12);

void bench_serialize_parse_net(benchmark::State& state) {
  const CompiledNetwork net = compile(star_plan(8)).value().network;
  for (auto _ : state) {
    const std::string text = serialize_net(net);
    auto parsed = parse_net(text);
    benchmark::DoNotOptimize(parsed.ok());
  }
}
BENCHMARK(bench_serialize_parse_net);

void bench_shortest_route(benchmark::State& state) {
  const CompiledNetwork net = compile(star_plan(12)).value().network;
  for (auto _ : state) {
    auto route = shortest_route(net, "in0", "out6");
    benchmark::DoNotOptimize(route.ok());
  }
}
BENCHMARK(bench_shortest_route);

void bench_simulate(benchmark::State& state) {
  const CompiledNetwork net = compile(star_plan(6)).value().network;
  std::vector<Trip> trips;
  for (int i = 0; i < 8; ++i) {
    trips.push_back({fmt::format("v{}", i),
                     i == 0 ? VehicleKind::AV : VehicleKind::BV,
                     fmt::format("in{}", i % 6), fmt::format("out{}", (i + 3) % 6),
                     i * 2.0});
  }
  Scenario scenario;
  scenario.network = net;
  scenario.routes = expand_trips(net, trips).routes;
  scenario.av_id = "v0";
  SimConfig config;
  config.horizon = 60.0;
  for (auto _ : state) {
    const Trace trace = simulate(scenario, config);
    benchmark::DoNotOptimize(trace.steps.size());
  }
}
BENCHMARK(bench_simulate);

void bench_local_embed(benchmark::State& state) {
  const Embedder embedder;
  const std::string text =
      "General layout: a freeway ramp with 3 road segments and 4 junctions, 5 "
      "lanes in total. Segment ramp: 130 m long, 1 lane, speed limit 16.67 m/s, "
      "heading southeast, curves right by 39 degrees.";
  for (auto _ : state) {
    auto vector = embedder.embed(text);
    benchmark::DoNotOptimize(vector.ok());
  }
}
BENCHMARK(bench_local_embed);

void bench_random_trips(benchmark::State& state) {
  const CompiledNetwork net = compile(star_plan(8)).value().network;
  TripGenParams params;
  params.arrival_rate = 0.5;
  params.horizon = 120.0;
  params.seed = 9;
  for (auto _ : state) {
    auto trips = random_trips(net, params);
    benchmark::DoNotOptimize(trips.ok());
  }
}
BENCHMARK(bench_random_trips);

}  // namespace

BENCHMARK_MAIN();
