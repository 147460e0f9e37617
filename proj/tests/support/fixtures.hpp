#pragma once

#include <string>

#include "scenoforge/net_compiler.hpp"
#include "scenoforge/net_model.hpp"
#include "scenoforge/pipeline.hpp"
#include "scenoforge/sim.hpp"

namespace sftest {

// Two nodes, one straight edge.
scenoforge::NetworkPlan straight_plan(double length_m = 500.0, int lanes = 1,
                                      double speed = 13.89);

// Center node plus three two-way arms at headings 0, 180 and 270 degrees,
// two lanes everywhere: the canonical T.
scenoforge::NetworkPlan t_plan();

// One-way fork: two-lane main road into two single-lane branches at +/-20
// degrees. 300 m approach, 200 m branches.
scenoforge::NetworkPlan fork_plan(double speed = 15.0);

// Diamond over four edges where the longer arm is faster overall.
scenoforge::NetworkPlan diamond_plan();

// Off-ramp-like plan whose ramp curves right by roughly 40 degrees.
scenoforge::NetworkPlan offramp_plan();

scenoforge::CompiledNetwork compile_or_die(const scenoforge::NetworkPlan& plan);

// The crafted crowded-fork scenario: two BVs reach the gore point side by
// side and collide there, wrecking both branch entries while a third BV and
// the AV queue behind.
scenoforge::Scenario crowded_fork_scenario();

// Same network and vehicle budget, but BV trips drawn by the random-trip
// generator (the RandomTrip-style counterpart).
scenoforge::Scenario random_fork_scenario(std::uint64_t seed);

// Replay RunConfig against a shipped transcript fixture.
scenoforge::RunConfig replay_run(const std::string& fixture_name,
                                 const std::string& request,
                                 const std::string& out_dir);

}  // namespace sftest
