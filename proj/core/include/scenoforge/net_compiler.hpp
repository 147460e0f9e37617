#pragma once

#include <map>
#include <string>
#include <vector>

#include "scenoforge/net_model.hpp"

namespace scenoforge {

struct CompileOptions {
  double lane_width = 3.2;            // m
  double min_edge_length = 5.0;       // m
  double straight_threshold_deg = 30.0;
  double uturn_threshold_deg = 150.0;
};

enum class SceneType {
  t_intersection,
  y_intersection,
  four_way,
  fork,
  merge,
  ramp,
  general,
};

std::string_view scene_type_name(SceneType type);
std::optional<SceneType> scene_type_from(std::string_view name);
// Human-phrased variant for summaries ("T-intersection", "freeway ramp", ...).
std::string_view scene_type_label(SceneType type);

// Reports every violation that would make the plan uncompilable, not just
// the first one, so a single regeneration attempt can fix them all.
Diagnostics validate(const NetworkPlan& plan,
                     const CompileOptions& opts = CompileOptions{});

struct CompileResult {
  CompiledNetwork network;
  std::vector<std::string> warnings;
};

// The netconvert analogue: geometry expansion into lanes, junction shapes,
// inferred lane-to-lane connections with direction classes. Deterministic:
// equal (plan, opts) give byte-identical serialized networks.
Fallible<CompileResult> compile(const NetworkPlan& plan,
                                const CompileOptions& opts = CompileOptions{});

// Turn classification by signed heading deflection; headings in [0, 360).
ConnectionDir classify_direction(double in_heading_deg, double out_heading_deg,
                                 const CompileOptions& opts = CompileOptions{});

// Coarse topology class of the network, decided at its busiest junction.
SceneType classify_scene(const CompiledNetwork& net,
                         const CompileOptions& opts = CompileOptions{});

// Renders diagnostics as numbered repair instructions for the generating LLM.
std::string diagnostics_to_feedback(const Diagnostics& diags);

// Right-of-way at priority junctions: per connection, whether the movement
// must yield to conflicting traffic from the junction's major road. The map
// is derived (never serialized); the index keys into net.connections.
std::vector<bool> connection_yields(const CompiledNetwork& net);

// Straight-line span of a connection through the junction interior. The
// segment is pushed `extension` meters back into the incoming lane and
// forward into the outgoing lane, so straight-through movements (whose lane
// endpoints coincide) still cover a usable interval for crossing tests.
std::optional<std::pair<Point, Point>> connection_chord(
    const CompiledNetwork& net, const Connection& connection,
    double extension = 6.4);

// Rebuilds a declarative plan from a compiled network (nodes from junctions,
// edge centerlines recovered from lane 0). Used for net ingestion and for
// the compile-idempotence check.
NetworkPlan reconstruct_plan(const CompiledNetwork& net,
                             const CompileOptions& opts = CompileOptions{});

}  // namespace scenoforge
