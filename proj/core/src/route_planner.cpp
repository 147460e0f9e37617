#include "scenoforge/route_planner.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <queue>
#include <set>

#include "scenoforge/rng.hpp"

namespace scenoforge {

RoutingGraph RoutingGraph::build(const CompiledNetwork& net) {
  RoutingGraph graph;
  for (const CompiledEdge& edge : net.edges) {
    graph.edge_ids.push_back(edge.id);
    graph.arcs[edge.id];  // ensure vertex exists
    graph.cost_seconds[edge.id] =
        edge.mean_lane_length() / edge.lanes.front().speed;
  }
  for (const Connection& connection : net.connections) {
    auto& successors = graph.arcs[connection.from_edge];
    if (std::find(successors.begin(), successors.end(), connection.to_edge) ==
        successors.end()) {
      successors.push_back(connection.to_edge);
    }
  }
  for (auto& [edge, successors] : graph.arcs) {
    std::sort(successors.begin(), successors.end());
  }
  return graph;
}

namespace {

// Dijkstra over edge vertices. Costs include the starting edge, so the cost
// of a path is the sum of the travel times of every edge on it.
std::map<std::string, double> travel_times_from(const RoutingGraph& graph,
                                                const std::string& start,
                                                bool reversed) {
  std::map<std::string, std::vector<std::string>> arcs;
  if (reversed) {
    for (const auto& [from, successors] : graph.arcs) {
      for (const std::string& to : successors) arcs[to].push_back(from);
    }
  } else {
    arcs = graph.arcs;
  }

  std::map<std::string, double> dist;
  using Item = std::pair<double, std::string>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[start] = graph.cost_seconds.at(start);
  queue.push({dist[start], start});
  while (!queue.empty()) {
    const auto [d, edge] = queue.top();
    queue.pop();
    if (d > dist.at(edge)) continue;
    const auto it = arcs.find(edge);
    if (it == arcs.end()) continue;
    for (const std::string& next : it->second) {
      const double nd = d + graph.cost_seconds.at(next);
      const auto found = dist.find(next);
      if (found == dist.end() || nd < found->second - 1e-12) {
        dist[next] = nd;
        queue.push({nd, next});
      }
    }
  }
  return dist;
}

}  // namespace

Fallible<Route> shortest_route(const CompiledNetwork& net,
                               const std::string& from_edge,
                               const std::string& to_edge) {
  for (const auto* id : {&from_edge, &to_edge}) {
    if (!net.find_edge(*id)) {
      return make_diag(DiagCode::UnknownEdge, *id,
                       fmt::format("route endpoint \"{}\" is not an edge of the "
                                   "network",
                                   *id));
    }
  }
  const RoutingGraph graph = RoutingGraph::build(net);
  const auto forward = travel_times_from(graph, from_edge, false);
  if (!forward.count(to_edge)) {
    return make_diag(
        DiagCode::Unreachable, fmt::format("{} -> {}", from_edge, to_edge),
        fmt::format("no route exists from edge \"{}\" to edge \"{}\"; they are not "
                    "linked by the network's connections",
                    from_edge, to_edge));
  }
  const auto backward = travel_times_from(graph, to_edge, true);
  const double total = forward.at(to_edge);

  // Walk the tight subgraph greedily, picking the smallest edge id that still
  // admits a minimum-cost completion. Ties in total cost therefore resolve to
  // the lexicographically smallest edge sequence. Positive costs make the
  // tight subgraph acyclic, so this terminates.
  Route route;
  route.edges.push_back(from_edge);
  std::string current = from_edge;
  const double eps = 1e-9;
  while (current != to_edge) {
    const double used = forward.at(current);
    const std::string* best = nullptr;
    for (const std::string& next : graph.arcs.at(current)) {
      const auto fit = forward.find(next);
      const auto bit = backward.find(next);
      if (fit == forward.end() || bit == backward.end()) continue;
      const double via = used + graph.cost_seconds.at(next);
      if (std::abs(fit->second - via) > eps) continue;  // not tight forward
      const double completion = via + bit->second - graph.cost_seconds.at(next);
      if (std::abs(completion - total) > eps) continue;  // no optimal completion
      if (!best || next < *best) best = &next;
    }
    if (!best) {
      // Numerically impossible on a consistent graph; report rather than loop.
      return make_diag(
          DiagCode::Unreachable, fmt::format("{} -> {}", from_edge, to_edge),
          fmt::format("route reconstruction from \"{}\" to \"{}\" failed",
                      from_edge, to_edge));
    }
    current = *best;
    route.edges.push_back(current);
  }
  return route;
}

ExpandResult expand_trips(const CompiledNetwork& net,
                          const std::vector<Trip>& trips) {
  ExpandResult result;
  for (const Trip& trip : trips) {
    Fallible<Route> routed = shortest_route(net, trip.depart_edge, trip.arrive_edge);
    if (!routed.ok()) {
      result.failures.emplace_back(trip, routed.diagnostics().front());
      continue;
    }
    Route route = std::move(routed.value());
    route.vehicle_id = trip.vehicle_id;
    route.kind = trip.kind;
    route.depart_time = trip.depart_time;
    result.routes.push_back(std::move(route));
  }
  return result;
}

namespace {

// A junction is on the network boundary when it touches at most one distinct
// neighbor: there is no road upstream (or downstream) of it beyond the road
// it terminates. An approach/exit pair of reverse edges counts as one road.
std::set<std::string> boundary_junctions(const CompiledNetwork& net) {
  std::map<std::string, std::set<std::string>> neighbors;
  for (const CompiledEdge& edge : net.edges) {
    neighbors[edge.from_junction].insert(edge.to_junction);
    neighbors[edge.to_junction].insert(edge.from_junction);
  }
  std::set<std::string> out;
  for (const auto& [junction, adjacent] : neighbors) {
    if (adjacent.size() <= 1) out.insert(junction);
  }
  return out;
}

}  // namespace

std::vector<std::string> fringe_sources(const CompiledNetwork& net) {
  const std::set<std::string> boundary = boundary_junctions(net);
  std::vector<std::string> out;
  for (const CompiledEdge& edge : net.edges) {
    if (boundary.count(edge.from_junction)) out.push_back(edge.id);
  }
  return out;
}

std::vector<std::string> fringe_sinks(const CompiledNetwork& net) {
  const std::set<std::string> boundary = boundary_junctions(net);
  std::vector<std::string> out;
  for (const CompiledEdge& edge : net.edges) {
    if (boundary.count(edge.to_junction)) out.push_back(edge.id);
  }
  return out;
}

Fallible<std::vector<Trip>> random_trips(const CompiledNetwork& net,
                                         const TripGenParams& params) {
  if (!(params.arrival_rate > 0.0) || !(params.horizon > 0.0)) {
    return make_diag(DiagCode::BadAttribute, "arrival_rate",
                     "random trip generation needs arrival_rate > 0 and horizon > 0");
  }
  std::vector<std::string> sources;
  std::vector<std::string> sinks;
  if (params.fringe_only) {
    sources = fringe_sources(net);
    sinks = fringe_sinks(net);
  } else {
    for (const CompiledEdge& edge : net.edges) {
      sources.push_back(edge.id);
      sinks.push_back(edge.id);
    }
  }
  std::set<std::string> eligible(sources.begin(), sources.end());
  eligible.insert(sinks.begin(), sinks.end());
  if (sources.empty() || sinks.empty() || eligible.size() < 2) {
    return make_diag(
        DiagCode::BadAttribute, "fringe",
        fmt::format("not enough eligible edges for random trips: {} source(s), {} "
                    "sink(s), {} eligible edge(s) in total",
                    sources.size(), sinks.size(), eligible.size()));
  }

  Rng rng(params.seed);
  std::vector<double> departures;
  double t = rng.exponential(params.arrival_rate);
  while (t <= params.horizon) {
    departures.push_back(t);
    t += rng.exponential(params.arrival_rate);
  }

  std::vector<Trip> trips;
  int counter = 0;
  for (double depart : departures) {
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      const std::string& from = sources[rng.below(sources.size())];
      const std::string& to = sinks[rng.below(sinks.size())];
      if (from == to) continue;
      if (!shortest_route(net, from, to).ok()) continue;
      Trip trip;
      trip.vehicle_id = fmt::format("rt_{}", counter++);
      trip.kind = VehicleKind::BV;
      trip.depart_edge = from;
      trip.arrive_edge = to;
      trip.depart_time = depart;
      trips.push_back(std::move(trip));
      placed = true;
    }
    // A departure that cannot be placed after 100 tries is skipped; the
    // caller sees it as a shorter trip list.
  }
  return trips;
}

Fallible<std::vector<Trip>> subsample_trips(const std::vector<Trip>& trips,
                                            std::size_t n, std::uint64_t seed) {
  if (n > trips.size()) {
    return make_diag(
        DiagCode::CountMismatch, "subsample",
        fmt::format("cannot subsample {} trips from a list of {}", n, trips.size()));
  }
  std::vector<std::size_t> indices(trips.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  Rng rng(seed);
  for (std::size_t i = indices.size(); i > 1; --i) {  // Fisher-Yates
    std::swap(indices[i - 1], indices[rng.below(i)]);
  }
  indices.resize(n);
  std::sort(indices.begin(), indices.end());
  std::vector<Trip> out;
  out.reserve(n);
  for (std::size_t index : indices) out.push_back(trips[index]);
  return out;
}

Fallible<double> route_length(const CompiledNetwork& net, const Route& route) {
  double total = 0.0;
  for (const std::string& edge_id : route.edges) {
    const CompiledEdge* edge = net.find_edge(edge_id);
    if (!edge) {
      return make_diag(DiagCode::UnknownEdge, edge_id,
                       fmt::format("route of \"{}\" references unknown edge \"{}\"",
                                   route.vehicle_id, edge_id));
    }
    total += edge->mean_lane_length();
  }
  return total;
}

}  // namespace scenoforge
