#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "scenoforge/net_model.hpp"

namespace scenoforge {

// Edge-level routing graph: vertices are edges, arcs are the permitted
// edge-to-edge transitions induced by connections, the cost of an edge is
// its free-flow travel time.
struct RoutingGraph {
  std::vector<std::string> edge_ids;                     // insertion order
  std::map<std::string, std::vector<std::string>> arcs;  // successors, deduped
  std::map<std::string, double> cost_seconds;            // length / speed

  static RoutingGraph build(const CompiledNetwork& net);
};

struct TripGenParams {
  double arrival_rate = 0.1;  // vehicles per second
  double horizon = 100.0;     // seconds
  std::uint64_t seed = 0;
  bool fringe_only = true;
};

// Minimum free-flow travel time route between two edges, both inclusive.
// Ties are broken by the lexicographically smallest edge-id sequence.
Fallible<Route> shortest_route(const CompiledNetwork& net,
                               const std::string& from_edge,
                               const std::string& to_edge);

struct ExpandResult {
  std::vector<Route> routes;
  std::vector<std::pair<Trip, Diagnostic>> failures;
};

// duarouter analogue: one route per reachable trip, order and depart times
// preserved; unreachable trips are reported, never dropped silently.
ExpandResult expand_trips(const CompiledNetwork& net,
                          const std::vector<Trip>& trips);

// RandomTrip analogue: Poisson arrivals over [0, horizon], origins and
// destinations drawn uniformly from the eligible edges with reachability
// enforced by rejection. Deterministic per seed.
Fallible<std::vector<Trip>> random_trips(const CompiledNetwork& net,
                                         const TripGenParams& params);

// Seeded uniform n-subset preserving the original order.
Fallible<std::vector<Trip>> subsample_trips(const std::vector<Trip>& trips,
                                            std::size_t n, std::uint64_t seed);

Fallible<double> route_length(const CompiledNetwork& net, const Route& route);

// Fringe edges: no road upstream of the origin (eligible source) or no road
// downstream of the destination (eligible sink).
std::vector<std::string> fringe_sources(const CompiledNetwork& net);
std::vector<std::string> fringe_sinks(const CompiledNetwork& net);

}  // namespace scenoforge
