#include "scenoforge/net_compiler.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <map>
#include <set>

#include "scenoforge/util.hpp"

namespace scenoforge {

namespace {

double plan_edge_length(const EdgeDecl& edge, const NodeDecl* from,
                        const NodeDecl* to) {
  if (edge.shape.size() >= 2) return arc_length(edge.shape);
  if (from && to) return distance(from->pos, to->pos);
  return 0.0;
}

const NodeDecl* find_node(const NetworkPlan& plan, std::string_view id) {
  for (const NodeDecl& node : plan.nodes) {
    if (node.id == id) return &node;
  }
  return nullptr;
}

// A "road" groups all edges between one pair of junctions, so an
// approach/exit pair of mutually reverse edges counts as a single road.
struct Road {
  std::string neighbor;
  std::vector<const CompiledEdge*> in_edges;   // neighbor -> junction
  std::vector<const CompiledEdge*> out_edges;  // junction -> neighbor
  // Direction of travel through the junction, degrees: for pure in-roads the
  // heading of arriving traffic, for out-roads the heading of departing
  // traffic, for two-way roads the departing heading.
  double travel_heading = 0.0;
  // Heading pointing away from the junction along the road.
  double away_heading = 0.0;
  double priority_product = 0.0;  // max over edges of speed * lane count

  bool two_way() const { return !in_edges.empty() && !out_edges.empty(); }
};

std::vector<Road> roads_at(const CompiledNetwork& net, const Junction& junction) {
  std::map<std::string, Road> by_neighbor;
  for (const CompiledEdge& edge : net.edges) {
    if (edge.from_junction == junction.id) {
      Road& road = by_neighbor[edge.to_junction];
      road.neighbor = edge.to_junction;
      road.out_edges.push_back(&edge);
    } else if (edge.to_junction == junction.id) {
      Road& road = by_neighbor[edge.from_junction];
      road.neighbor = edge.from_junction;
      road.in_edges.push_back(&edge);
    }
  }
  std::vector<Road> roads;
  for (auto& [neighbor, road] : by_neighbor) {
    for (const CompiledEdge* edge : road.out_edges) {
      road.priority_product =
          std::max(road.priority_product,
                   edge->lanes.front().speed * static_cast<double>(edge->lanes.size()));
    }
    for (const CompiledEdge* edge : road.in_edges) {
      road.priority_product =
          std::max(road.priority_product,
                   edge->lanes.front().speed * static_cast<double>(edge->lanes.size()));
    }
    if (!road.out_edges.empty()) {
      road.away_heading = start_heading_deg(road.out_edges.front()->lanes.front().shape);
      road.travel_heading = road.away_heading;
    } else {
      const double in_end =
          end_heading_deg(road.in_edges.front()->lanes.front().shape);
      road.travel_heading = in_end;
      road.away_heading = std::fmod(in_end + 180.0, 360.0);
    }
    roads.push_back(std::move(road));
  }
  return roads;
}

}  // namespace

std::string_view scene_type_name(SceneType type) {
  switch (type) {
    case SceneType::t_intersection: return "t_intersection";
    case SceneType::y_intersection: return "y_intersection";
    case SceneType::four_way: return "four_way";
    case SceneType::fork: return "fork";
    case SceneType::merge: return "merge";
    case SceneType::ramp: return "ramp";
    case SceneType::general: return "general";
  }
  return "general";
}

std::optional<SceneType> scene_type_from(std::string_view name) {
  for (SceneType type :
       {SceneType::t_intersection, SceneType::y_intersection, SceneType::four_way,
        SceneType::fork, SceneType::merge, SceneType::ramp, SceneType::general}) {
    if (scene_type_name(type) == name) return type;
  }
  return std::nullopt;
}

std::string_view scene_type_label(SceneType type) {
  switch (type) {
    case SceneType::t_intersection: return "T-intersection";
    case SceneType::y_intersection: return "Y-intersection";
    case SceneType::four_way: return "four-way intersection";
    case SceneType::fork: return "fork";
    case SceneType::merge: return "merge";
    case SceneType::ramp: return "freeway ramp";
    case SceneType::general: return "general road network";
  }
  return "general road network";
}

Diagnostics validate(const NetworkPlan& plan, const CompileOptions& opts) {
  Diagnostics diags;
  auto add = [&](DiagCode code, std::string subject, std::string message) {
    diags.push_back(make_diag(code, std::move(subject), std::move(message)));
  };

  std::set<std::string> node_ids;
  for (const NodeDecl& node : plan.nodes) {
    if (!node_ids.insert(node.id).second) {
      add(DiagCode::DuplicateId, node.id,
          fmt::format("node id \"{}\" is declared more than once", node.id));
    }
    if (!std::isfinite(node.pos.x) || !std::isfinite(node.pos.y)) {
      add(DiagCode::BadAttribute, node.id,
          fmt::format("node \"{}\" has a non-finite coordinate", node.id));
    }
  }

  std::set<std::string> edge_ids;
  for (const EdgeDecl& edge : plan.edges) {
    if (!edge_ids.insert(edge.id).second) {
      add(DiagCode::DuplicateId, edge.id,
          fmt::format("edge id \"{}\" is declared more than once", edge.id));
    }
    const NodeDecl* from = find_node(plan, edge.from);
    const NodeDecl* to = find_node(plan, edge.to);
    if (!from) {
      add(DiagCode::UnknownNode, edge.from,
          fmt::format("edge \"{}\" references node \"{}\" which is not declared in "
                      "the node file",
                      edge.id, edge.from));
    }
    if (!to) {
      add(DiagCode::UnknownNode, edge.to,
          fmt::format("edge \"{}\" references node \"{}\" which is not declared in "
                      "the node file",
                      edge.id, edge.to));
    }
    if (edge.from == edge.to) {
      add(DiagCode::BadAttribute, edge.id,
          fmt::format("edge \"{}\" connects node \"{}\" to itself", edge.id,
                      edge.from));
    }
    if (edge.num_lanes < 1) {
      add(DiagCode::BadAttribute, edge.id,
          fmt::format("edge \"{}\" has numLanes={}; at least 1 lane is required",
                      edge.id, edge.num_lanes));
    }
    if (!(edge.speed > 0.0) || !std::isfinite(edge.speed)) {
      add(DiagCode::BadAttribute, edge.id,
          fmt::format("edge \"{}\" has speed={} m/s; speed must be positive",
                      edge.id, edge.speed));
    }
    if (!edge.shape.empty() && edge.shape.size() < 2) {
      add(DiagCode::BadAttribute, edge.id,
          fmt::format("edge \"{}\" shape needs at least 2 points", edge.id));
    }
    if (from && to && edge.from != edge.to) {
      const double length = plan_edge_length(edge, from, to);
      if (length < opts.min_edge_length) {
        add(DiagCode::TooShort, edge.id,
            fmt::format("edge \"{}\" is {} m long; the minimum edge length is {} m",
                        edge.id, format_fixed(length), format_fixed(opts.min_edge_length)));
      }
    }
  }
  return diags;
}

Fallible<CompileResult> compile(const NetworkPlan& plan, const CompileOptions& opts) {
  if (!(opts.lane_width > 0.0) || !(opts.straight_threshold_deg > 0.0) ||
      !(opts.straight_threshold_deg < opts.uturn_threshold_deg) ||
      !(opts.uturn_threshold_deg < 180.0)) {
    throw std::invalid_argument(
        "compile options need lane_width > 0 and 0 < straight_threshold < "
        "uturn_threshold < 180");
  }
  Diagnostics diags = validate(plan, opts);
  if (!diags.empty()) return diags;
  if (plan.edges.empty()) {
    return make_diag(DiagCode::FormatError, "edges",
                     "the plan declares no edges; a network needs at least one edge");
  }

  CompileResult result;
  CompiledNetwork& net = result.network;

  std::set<std::string> referenced;
  for (const EdgeDecl& edge : plan.edges) {
    referenced.insert(edge.from);
    referenced.insert(edge.to);
  }
  for (const NodeDecl& node : plan.nodes) {
    if (!referenced.count(node.id)) {
      result.warnings.push_back(
          fmt::format("node \"{}\" is not referenced by any edge and was dropped",
                      node.id));
      continue;
    }
    Junction junction;
    junction.id = node.id;
    junction.pos = node.pos;
    junction.kind = node.kind;
    net.junctions.push_back(std::move(junction));
  }

  for (const EdgeDecl& decl : plan.edges) {
    const NodeDecl* from = find_node(plan, decl.from);
    const NodeDecl* to = find_node(plan, decl.to);
    Polyline centerline = decl.shape;
    if (centerline.empty()) centerline = {from->pos, to->pos};
    CompiledEdge edge;
    edge.id = decl.id;
    edge.from_junction = decl.from;
    edge.to_junction = decl.to;
    edge.name = decl.name;
    for (int i = 0; i < decl.num_lanes; ++i) {
      Lane lane;
      lane.id = fmt::format("{}_{}", decl.id, i);
      lane.index = i;
      lane.speed = decl.speed;
      lane.shape = offset_right(centerline, (i + 0.5) * opts.lane_width);
      lane.length = arc_length(lane.shape);
      edge.lanes.push_back(std::move(lane));
    }
    net.edges.push_back(std::move(edge));
  }

  // Connections, junction by junction in declaration order.
  for (const Junction& junction : net.junctions) {
    std::vector<const CompiledEdge*> incoming;
    std::vector<const CompiledEdge*> outgoing;
    for (const CompiledEdge& edge : net.edges) {
      if (edge.to_junction == junction.id) incoming.push_back(&edge);
      if (edge.from_junction == junction.id) outgoing.push_back(&edge);
    }
    for (const CompiledEdge* in : incoming) {
      const CompiledEdge* reverse = nullptr;
      for (const CompiledEdge* out : outgoing) {
        if (out->from_junction == in->to_junction &&
            out->to_junction == in->from_junction) {
          reverse = out;
          break;
        }
      }
      std::vector<const CompiledEdge*> candidates;
      for (const CompiledEdge* out : outgoing) {
        if (out != reverse) candidates.push_back(out);
      }
      if (candidates.empty() && reverse) candidates.push_back(reverse);
      for (int lane = 0; lane < static_cast<int>(in->lanes.size()); ++lane) {
        const double in_heading = end_heading_deg(in->lanes[lane].shape);
        for (const CompiledEdge* out : candidates) {
          Connection connection;
          connection.from_edge = in->id;
          connection.to_edge = out->id;
          connection.from_lane = lane;
          connection.to_lane =
              std::min(lane, static_cast<int>(out->lanes.size()) - 1);
          const double out_heading =
              start_heading_deg(out->lanes[connection.to_lane].shape);
          connection.dir = classify_direction(in_heading, out_heading, opts);
          net.connections.push_back(std::move(connection));
        }
      }
    }
  }

  // Junction geometry: incLanes and shapes.
  for (Junction& junction : net.junctions) {
    std::vector<Point> endpoints;
    std::set<std::string> neighbors;
    for (const CompiledEdge& edge : net.edges) {
      if (edge.to_junction == junction.id) {
        neighbors.insert(edge.from_junction);
        for (const Lane& lane : edge.lanes) {
          junction.incoming_lanes.push_back(lane.id);
          endpoints.push_back(lane.shape.back());
        }
      }
      if (edge.from_junction == junction.id) {
        neighbors.insert(edge.to_junction);
        for (const Lane& lane : edge.lanes) {
          endpoints.push_back(lane.shape.front());
        }
      }
    }
    if (neighbors.size() <= 1) continue;  // dead end, empty shape
    Polyline hull = convex_hull(endpoints);
    if (hull.size() < 3) {
      const double h = opts.lane_width / 2.0;
      hull = {{junction.pos.x - h, junction.pos.y - h},
              {junction.pos.x + h, junction.pos.y - h},
              {junction.pos.x + h, junction.pos.y + h},
              {junction.pos.x - h, junction.pos.y + h}};
    } else {
      Point centroid{0.0, 0.0};
      for (const Point& p : hull) {
        centroid.x += p.x;
        centroid.y += p.y;
      }
      centroid.x /= static_cast<double>(hull.size());
      centroid.y /= static_cast<double>(hull.size());
      for (Point& p : hull) {
        const double d = distance(centroid, p);
        if (d > 1e-9) {
          const double grow = (d + opts.lane_width / 2.0) / d;
          p = {centroid.x + (p.x - centroid.x) * grow,
               centroid.y + (p.y - centroid.y) * grow};
        }
      }
    }
    hull.push_back(hull.front());  // closed polygon
    junction.shape = std::move(hull);
  }

  return result;
}

ConnectionDir classify_direction(double in_heading_deg, double out_heading_deg,
                                 const CompileOptions& opts) {
  const double delta = heading_delta_deg(in_heading_deg, out_heading_deg);
  if (std::abs(delta) <= opts.straight_threshold_deg) return ConnectionDir::straight;
  if (delta > opts.straight_threshold_deg && delta <= opts.uturn_threshold_deg) {
    return ConnectionDir::left;
  }
  if (delta < -opts.straight_threshold_deg && delta >= -opts.uturn_threshold_deg) {
    return ConnectionDir::right;
  }
  return ConnectionDir::turn;
}

SceneType classify_scene(const CompiledNetwork& net, const CompileOptions& opts) {
  if (net.junctions.empty()) return SceneType::general;

  const Junction* busiest = nullptr;
  std::vector<Road> busiest_roads;
  for (const Junction& junction : net.junctions) {
    std::vector<Road> roads = roads_at(net, junction);
    if (!busiest || roads.size() > busiest_roads.size() ||
        (roads.size() == busiest_roads.size() && junction.id < busiest->id)) {
      busiest = &junction;
      busiest_roads = std::move(roads);
    }
  }
  const std::size_t degree = busiest_roads.size();
  if (degree >= 4) return SceneType::four_way;
  if (degree != 3) return SceneType::general;

  const bool any_two_way =
      std::any_of(busiest_roads.begin(), busiest_roads.end(),
                  [](const Road& road) { return road.two_way(); });

  if (!any_two_way) {
    int in_roads = 0;
    int out_roads = 0;
    for (const Road& road : busiest_roads) {
      if (road.out_edges.empty()) ++in_roads;
      if (road.in_edges.empty()) ++out_roads;
    }
    const bool fork_shape = in_roads == 1 && out_roads == 2;
    const bool merge_shape = in_roads == 2 && out_roads == 1;
    if (fork_shape || merge_shape) {
      const Road* minor = &busiest_roads.front();
      const Road* major = &busiest_roads.front();
      for (const Road& road : busiest_roads) {
        if (road.priority_product < minor->priority_product) minor = &road;
        if (road.priority_product > major->priority_product) major = &road;
      }
      double closest_angle = 360.0;
      for (const Road& road : busiest_roads) {
        if (&road == minor) continue;
        closest_angle = std::min(
            closest_angle,
            std::abs(heading_delta_deg(minor->travel_heading, road.travel_heading)));
      }
      const double major_speed =
          major->out_edges.empty() ? major->in_edges.front()->lanes.front().speed
                                   : major->out_edges.front()->lanes.front().speed;
      if (closest_angle < opts.straight_threshold_deg && major_speed >= 25.0) {
        return SceneType::ramp;
      }
      return fork_shape ? SceneType::fork : SceneType::merge;
    }
  }

  // Two of the three roads forming one continuing axis makes it a T.
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      const double separation = std::abs(heading_delta_deg(
          busiest_roads[i].away_heading, busiest_roads[j].away_heading));
      if (separation >= 180.0 - opts.straight_threshold_deg) {
        return SceneType::t_intersection;
      }
    }
  }
  return SceneType::y_intersection;
}

std::string diagnostics_to_feedback(const Diagnostics& diags) {
  static const std::map<DiagCode, std::string_view> kInstructions = {
      {DiagCode::UnknownNode,
       "declare the node or fix the edge endpoint to reference a declared node id."},
      {DiagCode::UnknownEdge, "reference only edge ids that exist in the network."},
      {DiagCode::UnknownLane,
       "use lane indices smaller than the lane count of the edge."},
      {DiagCode::DuplicateId, "give every declaration a unique id."},
      {DiagCode::BadAttribute,
       "correct the attribute value to match the documented format."},
      {DiagCode::UnknownAttribute,
       "remove the attribute; only the documented attributes are allowed."},
      {DiagCode::FormatError,
       "emit exactly the documented XML structure inside the fenced block."},
      {DiagCode::Unreachable,
       "pick connected edges: the route must follow the network's connections."},
      {DiagCode::TooShort,
       "lengthen the edge; edges below the minimum length are rejected."},
      {DiagCode::CountMismatch,
       "emit exactly the requested number of trips."},
  };
  std::string out;
  for (std::size_t i = 0; i < diags.size(); ++i) {
    const Diagnostic& diag = diags[i];
    out += fmt::format("{}. {} [{}]: {} Fix: {}\n", i + 1,
                       diag_code_name(diag.code), diag.subject, diag.message,
                       kInstructions.at(diag.code));
  }
  return out;
}

std::optional<std::pair<Point, Point>> connection_chord(
    const CompiledNetwork& net, const Connection& connection, double extension) {
  const CompiledEdge* from = net.find_edge(connection.from_edge);
  const CompiledEdge* to = net.find_edge(connection.to_edge);
  if (!from || !to) return std::nullopt;
  if (connection.from_lane < 0 ||
      connection.from_lane >= static_cast<int>(from->lanes.size())) {
    return std::nullopt;
  }
  if (connection.to_lane < 0 ||
      connection.to_lane >= static_cast<int>(to->lanes.size())) {
    return std::nullopt;
  }
  const Lane& in_lane = from->lanes[connection.from_lane];
  const Lane& out_lane = to->lanes[connection.to_lane];
  return std::make_pair(point_along(in_lane.shape, in_lane.length - extension),
                        point_along(out_lane.shape, extension));
}

std::vector<bool> connection_yields(const CompiledNetwork& net) {
  std::vector<bool> yields(net.connections.size(), false);

  auto chord = [&](const Connection& connection) {
    return connection_chord(net, connection);
  };

  for (const Junction& junction : net.junctions) {
    if (junction.kind == NodeKind::unregulated) continue;
    std::vector<Road> roads = roads_at(net, junction);
    if (roads.size() < 2) continue;
    // Every road tying for the highest product is major; a through main
    // street groups as two neighbor roads with equal priority.
    double top = 0.0;
    for (const Road& road : roads) top = std::max(top, road.priority_product);
    std::set<std::string> major_edges;
    for (const Road& road : roads) {
      if (road.priority_product != top) continue;
      for (const CompiledEdge* edge : road.in_edges) major_edges.insert(edge->id);
      for (const CompiledEdge* edge : road.out_edges) major_edges.insert(edge->id);
    }
    auto on_major = [&](const std::string& edge_id) {
      return major_edges.count(edge_id) > 0;
    };

    std::vector<std::size_t> at_junction;
    for (std::size_t i = 0; i < net.connections.size(); ++i) {
      const CompiledEdge* from = net.find_edge(net.connections[i].from_edge);
      if (from && from->to_junction == junction.id) at_junction.push_back(i);
    }
    for (std::size_t i : at_junction) {
      const Connection& minor_conn = net.connections[i];
      if (on_major(minor_conn.from_edge)) continue;
      const auto minor_chord = chord(minor_conn);
      if (!minor_chord) continue;
      for (std::size_t j : at_junction) {
        const Connection& major_conn = net.connections[j];
        if (!on_major(major_conn.from_edge)) continue;
        if (minor_conn.to_edge == major_conn.to_edge) {
          yields[i] = true;
          break;
        }
        const auto major_chord = chord(major_conn);
        if (major_chord &&
            segments_cross(minor_chord->first, minor_chord->second,
                           major_chord->first, major_chord->second)) {
          yields[i] = true;
          break;
        }
      }
    }
  }
  return yields;
}

NetworkPlan reconstruct_plan(const CompiledNetwork& net, const CompileOptions& opts) {
  NetworkPlan plan;
  for (const Junction& junction : net.junctions) {
    NodeDecl node;
    node.id = junction.id;
    node.pos = junction.pos;
    node.kind = junction.kind;
    plan.nodes.push_back(std::move(node));
  }
  for (const CompiledEdge& edge : net.edges) {
    EdgeDecl decl;
    decl.id = edge.id;
    decl.from = edge.from_junction;
    decl.to = edge.to_junction;
    decl.num_lanes = static_cast<int>(edge.lanes.size());
    decl.speed = edge.lanes.front().speed;
    decl.name = edge.name;
    decl.shape = offset_right(edge.lanes.front().shape, -0.5 * opts.lane_width);
    plan.edges.push_back(std::move(decl));
  }
  return plan;
}

}  // namespace scenoforge
