#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scenoforge/diagnostics.hpp"
#include "scenoforge/geometry.hpp"

namespace scenoforge {

// ---------------------------------------------------------------------------
// Plain (declarative) network format: nodes + edges, the shape an LLM writes.
// ---------------------------------------------------------------------------

enum class NodeKind { priority, traffic_light, unregulated };

std::string_view node_kind_name(NodeKind kind);
std::optional<NodeKind> node_kind_from(std::string_view name);

struct NodeDecl {
  std::string id;
  Point pos;
  NodeKind kind = NodeKind::priority;
  // XML comment immediately preceding the declaration, preserved verbatim
  // across parse/serialize. Empty means none.
  std::string comment;

  bool operator==(const NodeDecl&) const = default;
};

struct EdgeDecl {
  std::string id;
  std::string from;
  std::string to;
  int num_lanes = 1;
  double speed = 13.89;  // m/s
  std::optional<std::string> name;
  Polyline shape;  // optional custom centerline; empty = straight from->to
  std::string comment;

  bool operator==(const EdgeDecl&) const = default;
};

struct NetworkPlan {
  std::vector<NodeDecl> nodes;
  std::vector<EdgeDecl> edges;
  // Comments after the last declaration in each file.
  std::vector<std::string> node_trailing_comments;
  std::vector<std::string> edge_trailing_comments;

  bool operator==(const NetworkPlan&) const = default;
};

// ---------------------------------------------------------------------------
// Compiled network: lanes with geometry, junctions, lane-to-lane connections.
// ---------------------------------------------------------------------------

struct Lane {
  std::string id;  // "<edge id>_<index>"
  int index = 0;
  double speed = 0.0;
  double length = 0.0;  // equals arc_length(shape) for compiler output
  Polyline shape;

  bool operator==(const Lane&) const = default;
};

struct CompiledEdge {
  std::string id;
  std::string from_junction;
  std::string to_junction;
  std::vector<Lane> lanes;
  std::optional<std::string> name;

  bool operator==(const CompiledEdge&) const = default;
  double mean_lane_length() const;
};

enum class ConnectionDir { straight, left, right, turn };

char connection_dir_code(ConnectionDir dir);  // 's', 'l', 'r', 't'
std::optional<ConnectionDir> connection_dir_from(std::string_view code);

struct Connection {
  std::string from_edge;
  std::string to_edge;
  int from_lane = 0;
  int to_lane = 0;
  ConnectionDir dir = ConnectionDir::straight;

  bool operator==(const Connection&) const = default;
};

struct Junction {
  std::string id;
  Point pos;
  NodeKind kind = NodeKind::priority;
  std::vector<std::string> incoming_lanes;
  Polyline shape;  // closed (first == last) or empty for dead ends

  bool operator==(const Junction&) const = default;
};

struct CompiledNetwork {
  std::vector<CompiledEdge> edges;
  std::vector<Junction> junctions;
  std::vector<Connection> connections;

  bool operator==(const CompiledNetwork&) const = default;

  const CompiledEdge* find_edge(std::string_view id) const;
  const Junction* find_junction(std::string_view id) const;
};

// ---------------------------------------------------------------------------
// Trips and routes.
// ---------------------------------------------------------------------------

enum class VehicleKind { AV, BV };

std::string_view vehicle_kind_name(VehicleKind kind);
std::optional<VehicleKind> vehicle_kind_from(std::string_view name);

struct Trip {
  std::string vehicle_id;
  VehicleKind kind = VehicleKind::BV;
  std::string depart_edge;
  std::string arrive_edge;
  double depart_time = 0.0;

  bool operator==(const Trip&) const = default;
};

struct Route {
  std::string vehicle_id;
  VehicleKind kind = VehicleKind::BV;
  std::vector<std::string> edges;  // ordered, nonempty
  double depart_time = 0.0;

  bool operator==(const Route&) const = default;
};

struct NetworkStats {
  long total_lanes = 0;
  long total_edges = 0;
  double total_edge_length = 0.0;  // sum of mean lane length per edge

  bool operator==(const NetworkStats&) const = default;
};

// ---------------------------------------------------------------------------
// Parsing and serialization.
//
// Plain-format input comes from an LLM and is parsed strictly: any unknown
// attribute or element is an error, so the diagnostic can drive the repair
// loop. Net-format input may come from a real SUMO export, so unsupported
// content there is skipped and reported in a warning list instead.
// Serialization is canonical: fixed attribute order, two-decimal coordinates
// and speeds, byte-identical output for equal values.
// ---------------------------------------------------------------------------

Fallible<NetworkPlan> parse_plain(const std::string& node_text,
                                  const std::string& edge_text);
std::pair<std::string, std::string> serialize_plain(const NetworkPlan& plan);

struct NetParseResult {
  CompiledNetwork network;
  std::vector<std::string> warnings;  // skipped out-of-subset content
};

Fallible<NetParseResult> parse_net(const std::string& net_text);
std::string serialize_net(const CompiledNetwork& net);

Fallible<std::vector<Trip>> parse_trips(const std::string& text);
std::string serialize_trips(const std::vector<Trip>& trips);

Fallible<std::vector<Route>> parse_routes(const std::string& text);
std::string serialize_routes(const std::vector<Route>& routes);

// Fixed begin/end simulation window referencing the standard file names.
std::string serialize_sumocfg(const std::string& net_file,
                              const std::string& route_file,
                              double begin = 0.0, double end = 120.0);

NetworkStats network_stats(const CompiledNetwork& net);

}  // namespace scenoforge
