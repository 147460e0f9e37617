// Rebuilds the recorded-transcript fixtures under tests/fixtures/ by running
// the real pipeline in record mode against a scripted local chat server.
// Run from the repository root (or pass it as the first argument) after
// changing prompt templates or the canned responses below, then commit the
// regenerated fixtures.

#include <fmt/format.h>

#include <deque>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "scenoforge/net_compiler.hpp"
#include "scenoforge/pipeline.hpp"
#include "scenoforge/rag.hpp"
#include "scenoforge/util.hpp"

namespace fs = std::filesystem;
using namespace scenoforge;

namespace {

// --- scripted chat server ----------------------------------------------------

class ScriptedServer {
 public:
  ScriptedServer() {
    server_.Post("/chat/completions",
                 [this](const httplib::Request&, httplib::Response& res) {
                   std::lock_guard lock(mutex_);
                   if (queue_.empty()) {
                     res.status = 500;
                     res.set_content("script exhausted", "text/plain");
                     return;
                   }
                   nlohmann::json body;
                   body["choices"] = {{{"message", {{"content", queue_.front()}}}}};
                   queue_.pop_front();
                   res.set_content(body.dump(), "application/json");
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~ScriptedServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const {
    return fmt::format("http://127.0.0.1:{}", port_);
  }

  void script(std::vector<std::string> responses) {
    std::lock_guard lock(mutex_);
    queue_.assign(responses.begin(), responses.end());
  }

  std::size_t remaining() {
    std::lock_guard lock(mutex_);
    return queue_.size();
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mutex_;
  std::deque<std::string> queue_;
};

// --- canned interpreter responses ---------------------------------------------

std::string interp(const std::string& description, const std::string& reasoning,
                   const std::string& scene, const std::string& lanes,
                   int vehicles) {
  return fmt::format(
      "Description:\n{}\n\nReasoning:\n{}\n\n```footer\nscene_type: {}\nlanes: "
      "{}\nvehicles: {}\n```\n",
      description, reasoning, scene, lanes, vehicles);
}

const std::string kInterpT = interp(
    "A T-intersection where Main Street (east-west, 2 lanes per direction, 13.89 "
    "m/s) meets Side Street (south stem, 2 lanes per direction, 11.11 m/s). The "
    "AV crosses west to east while a leading vehicle turns right onto the stem, "
    "a side-street vehicle turns left across the AV's path, and an oncoming "
    "vehicle turns into the stem.",
    "Step by step: the request names a T-intersection, so two collinear arms "
    "form the top bar and one perpendicular arm forms the stem. Each arm is an "
    "approach/exit pair so every movement is available. Placing one BV ahead of "
    "the AV, one on the stem and one oncoming concentrates all interaction at "
    "the junction exactly when the AV arrives.",
    "t_intersection", "Main Street=2, Side Street=2", 4);

const std::string kInterpY = interp(
    "A Y-intersection of three single-lane two-way arms meeting at 120-degree "
    "spacing: North Arm, Southwest Arm and Southeast Arm, all at 11.11 m/s. The "
    "AV rides the North Arm down through the junction toward the southeast "
    "while both other arms feed vehicles into the junction.",
    "Step by step: a Y splits three ways with no continuing straight axis, so "
    "the three arms sit at roughly equal 120-degree separations. Single lanes "
    "force merging decisions. One BV approaches from the southwest and one from "
    "the southeast so the AV must negotiate the junction with crossing traffic.",
    "y_intersection", "North Arm=1, Southwest Arm=1, Southeast Arm=1", 3);

const std::string kInterpX = interp(
    "A four-way intersection of Oak Avenue (east-west, 2 lanes per direction, "
    "13.89 m/s) and Elm Street (north-south, 2 lanes per direction, 11.11 m/s). "
    "The AV drives Oak Avenue west to east; cross traffic enters from both Elm "
    "Street directions and one vehicle leads the AV through the box.",
    "Step by step: four approaches of two roads crossing at right angles give "
    "the four-way layout. Two-lane approaches let vehicles pick turn lanes. "
    "Scheduling the crossing BVs to reach the box while the AV is inside it "
    "creates the yield-and-go decisions the request is after.",
    "four_way", "Oak Avenue=2, Elm Street=2", 5);

const std::string kInterpFork = interp(
    "A fork where the two-lane Main Road (13.89 m/s) splits at a slight angle "
    "into the single-lane North Branch and South Branch. The AV follows the "
    "main road and takes the north branch; background vehicles crowd both "
    "branch choices around the split.",
    "Step by step: a fork needs one approach road splitting into two exits at a "
    "shallow angle, so the two branches leave at about 18 degrees either side. "
    "The main road keeps two lanes so vehicles can sit beside the AV before the "
    "gore point, and one BV ahead plus one behind bracket the AV as it chooses "
    "a branch.",
    "fork", "Main Road=2, North Branch=1, South Branch=1", 4);

const std::string kInterpRamp = interp(
    "A freeway off-ramp: Interstate 80 runs straight east with 2 lanes at 33.33 "
    "m/s, and the single-lane Exit 12 Off-Ramp (16.67 m/s) peels off rightward "
    "at the gore, curving away to the southeast. The AV leaves the freeway via "
    "the ramp while through traffic continues at speed.",
    "Step by step: an off-ramp is a high-speed fork whose minor branch leaves "
    "at a very shallow angle and then curves away. The mainline keeps its two "
    "lanes downstream so the split is 1-into-2 with no reverse directions. One "
    "BV exits ahead of the AV, one brushes past it on the mainline, and one "
    "follows it onto the ramp.",
    "ramp", "Interstate 80=2, Exit 12 Off-Ramp=1", 4);

// --- canned net responses -------------------------------------------------------

const std::string kNetT = R"(The layout places the junction at the origin.

```nodes
<nodes>
    <node id="center" x="0.00" y="0.00"/>
    <node id="west" x="-120.00" y="0.00"/>
    <node id="east" x="120.00" y="0.00"/>
    <node id="south" x="0.00" y="-100.00"/>
</nodes>
```

```edges
<edges>
    <!-- Main Street, eastbound then westbound -->
    <edge id="west_in" from="west" to="center" numLanes="2" speed="13.89" name="Main Street"/>
    <edge id="east_out" from="center" to="east" numLanes="2" speed="13.89" name="Main Street"/>
    <edge id="east_in" from="east" to="center" numLanes="2" speed="13.89" name="Main Street"/>
    <edge id="west_out" from="center" to="west" numLanes="2" speed="13.89" name="Main Street"/>
    <!-- Side Street stem -->
    <edge id="south_in" from="south" to="center" numLanes="2" speed="11.11" name="Side Street"/>
    <edge id="south_out" from="center" to="south" numLanes="2" speed="11.11" name="Side Street"/>
</edges>
```
)";

const std::string kNetTDangling = R"(The layout places the junction at the origin.

```nodes
<nodes>
    <node id="center" x="0.00" y="0.00"/>
    <node id="west" x="-120.00" y="0.00"/>
    <node id="east" x="120.00" y="0.00"/>
    <node id="south" x="0.00" y="-100.00"/>
</nodes>
```

```edges
<edges>
    <edge id="west_in" from="west" to="center" numLanes="2" speed="13.89" name="Main Street"/>
    <edge id="east_out" from="center" to="east" numLanes="2" speed="13.89" name="Main Street"/>
    <edge id="east_in" from="east" to="center" numLanes="2" speed="13.89" name="Main Street"/>
    <edge id="west_out" from="center" to="west" numLanes="2" speed="13.89" name="Main Street"/>
    <edge id="south_in" from="n_missing" to="center" numLanes="2" speed="11.11" name="Side Street"/>
    <edge id="south_out" from="center" to="south" numLanes="2" speed="11.11" name="Side Street"/>
</edges>
```
)";

const std::string kNetY = R"(Three arms at 120 degrees around the junction.

```nodes
<nodes>
    <node id="hub" x="0.00" y="0.00"/>
    <node id="top" x="0.00" y="110.00"/>
    <node id="sw" x="-95.26" y="-55.00"/>
    <node id="se" x="95.26" y="-55.00"/>
</nodes>
```

```edges
<edges>
    <edge id="top_in" from="top" to="hub" numLanes="1" speed="11.11" name="North Arm"/>
    <edge id="top_out" from="hub" to="top" numLanes="1" speed="11.11" name="North Arm"/>
    <edge id="sw_in" from="sw" to="hub" numLanes="1" speed="11.11" name="Southwest Arm"/>
    <edge id="sw_out" from="hub" to="sw" numLanes="1" speed="11.11" name="Southwest Arm"/>
    <edge id="se_in" from="se" to="hub" numLanes="1" speed="11.11" name="Southeast Arm"/>
    <edge id="se_out" from="hub" to="se" numLanes="1" speed="11.11" name="Southeast Arm"/>
</edges>
```
)";

const std::string kNetX = R"(Standard crossing, junction at the origin.

```nodes
<nodes>
    <node id="mid" x="0.00" y="0.00" type="traffic_light"/>
    <node id="w" x="-130.00" y="0.00"/>
    <node id="e" x="130.00" y="0.00"/>
    <node id="n" x="0.00" y="110.00"/>
    <node id="s" x="0.00" y="-110.00"/>
</nodes>
```

```edges
<edges>
    <edge id="we_in" from="w" to="mid" numLanes="2" speed="13.89" name="Oak Avenue"/>
    <edge id="we_out" from="mid" to="e" numLanes="2" speed="13.89" name="Oak Avenue"/>
    <edge id="ew_in" from="e" to="mid" numLanes="2" speed="13.89" name="Oak Avenue"/>
    <edge id="ew_out" from="mid" to="w" numLanes="2" speed="13.89" name="Oak Avenue"/>
    <edge id="ns_in" from="n" to="mid" numLanes="2" speed="11.11" name="Elm Street"/>
    <edge id="ns_out" from="mid" to="s" numLanes="2" speed="11.11" name="Elm Street"/>
    <edge id="sn_in" from="s" to="mid" numLanes="2" speed="11.11" name="Elm Street"/>
    <edge id="sn_out" from="mid" to="n" numLanes="2" speed="11.11" name="Elm Street"/>
</edges>
```
)";

std::string fork_net(double branch_y, const char* main_name) {
  return fmt::format(R"(The main road splits at the gore point.

```nodes
<nodes>
    <node id="a" x="-250.00" y="0.00"/>
    <node id="split" x="0.00" y="0.00"/>
    <node id="nb" x="209.23" y="{:.2f}"/>
    <node id="sb" x="209.23" y="-{:.2f}"/>
</nodes>
```

```edges
<edges>
    <edge id="main" from="a" to="split" numLanes="2" speed="13.89" name="{}"/>
    <edge id="north" from="split" to="nb" numLanes="1" speed="13.89" name="North Branch"/>
    <edge id="south" from="split" to="sb" numLanes="1" speed="13.89" name="South Branch"/>
</edges>
```
)",
                     branch_y, branch_y, main_name);
}

const std::string kNetFork = fork_net(67.99, "Main Road");

const std::string kNetRamp = R"(Mainline along the x axis; the ramp bends away rightward.

```nodes
<nodes>
    <node id="approach" x="-400.00" y="0.00"/>
    <node id="gore" x="0.00" y="0.00"/>
    <node id="east_end" x="400.00" y="0.00"/>
    <node id="ramp_end" x="200.00" y="-88.00"/>
</nodes>
```

```edges
<edges>
    <edge id="mainline_in" from="approach" to="gore" numLanes="2" speed="33.33" name="Interstate 80"/>
    <edge id="mainline_out" from="gore" to="east_end" numLanes="2" speed="33.33" name="Interstate 80"/>
    <edge id="ramp" from="gore" to="ramp_end" numLanes="1" speed="16.67" name="Exit 12 Off-Ramp" shape="0.00,0.00 80.00,-8.00 150.00,-38.00 200.00,-88.00"/>
</edges>
```
)";

// --- canned trips ----------------------------------------------------------------

const std::string kTripsT = R"(Departures bracket the AV's junction arrival.

```trips
<trips>
    <trip id="av" type="AV" from="west_in" to="east_out" depart="5.00"/>
    <trip id="bv_lead" type="BV" from="west_in" to="south_out" depart="0.00"/>
    <trip id="bv_side" type="BV" from="south_in" to="west_out" depart="2.00"/>
    <trip id="bv_oncoming" type="BV" from="east_in" to="south_out" depart="3.00"/>
</trips>
```
)";

const std::string kTripsY = R"(```trips
<trips>
    <trip id="av" type="AV" from="top_in" to="se_out" depart="4.00"/>
    <trip id="bv_sw" type="BV" from="sw_in" to="top_out" depart="1.00"/>
    <trip id="bv_se" type="BV" from="se_in" to="sw_out" depart="2.00"/>
</trips>
```
)";

const std::string kTripsX = R"(```trips
<trips>
    <trip id="av" type="AV" from="we_in" to="we_out" depart="6.00"/>
    <trip id="bv_lead" type="BV" from="we_in" to="ns_out" depart="1.00"/>
    <trip id="bv_cross_n" type="BV" from="ns_in" to="ns_out" depart="3.00"/>
    <trip id="bv_cross_s" type="BV" from="sn_in" to="ew_out" depart="4.00"/>
    <trip id="bv_oncoming" type="BV" from="ew_in" to="sn_out" depart="2.00"/>
</trips>
```
)";

const std::string kTripsFork = R"(```trips
<trips>
    <trip id="av" type="AV" from="main" to="north" depart="4.00"/>
    <trip id="bv_front" type="BV" from="main" to="north" depart="0.00"/>
    <trip id="bv_beside" type="BV" from="main" to="south" depart="1.00"/>
    <trip id="bv_rear" type="BV" from="main" to="south" depart="8.00"/>
</trips>
```
)";

const std::string kTripsForkLate = R"(```trips
<trips>
    <trip id="av" type="AV" from="main" to="north" depart="30.00"/>
    <trip id="bv_front" type="BV" from="main" to="north" depart="0.00"/>
    <trip id="bv_beside" type="BV" from="main" to="south" depart="1.00"/>
    <trip id="bv_rear" type="BV" from="main" to="south" depart="2.00"/>
</trips>
```
)";

const std::string kTripsRamp = R"(```trips
<trips>
    <trip id="av" type="AV" from="mainline_in" to="ramp" depart="4.00"/>
    <trip id="bv_exit" type="BV" from="mainline_in" to="ramp" depart="1.00"/>
    <trip id="bv_through" type="BV" from="mainline_in" to="mainline_out" depart="2.00"/>
    <trip id="bv_follow" type="BV" from="mainline_in" to="mainline_out" depart="6.00"/>
</trips>
```
)";

const std::string kVerdictPass =
    "```verdict\nPASS: the background routes and departure times converge on "
    "the junction while the AV crosses it, which matches the requested "
    "interaction.\n```\n";

const std::string kVerdictFailLate =
    "```verdict\nFAIL: the AV departs at 30.00 s but every background vehicle "
    "has cleared the fork by then, so the AV meets an empty junction; move the "
    "AV departure to within a few seconds of the background vehicles.\n```\n";

// --- ablation fixtures ------------------------------------------------------------

std::string fork3_description(int i) {
  return interp(
      fmt::format("Fork scenario {}: the two-lane Main Road splits at a gore "
                  "point into two single-lane branches; the AV takes the north "
                  "branch with background vehicles bracketing it.",
                  i),
      "Step by step: the request asks for several fork scenarios, so each one "
      "keeps the 1-into-2 split but varies the branch angles. Vehicles ahead, "
      "beside and behind the AV force a branch choice under pressure.",
      "fork", "Main Road=2, North Branch=1, South Branch=1", 4);
}

// Interpreter on: five structurally different forks (edge counts vary).
std::string ablate_interp_description(int i) {
  return interp(
      fmt::format("Fork variant {}: a main approach splits into two branches; "
                  "this variant uses a distinct segment layout around the gore "
                  "point.",
                  i),
      "Step by step: varying the number of feeder and continuation segments "
      "changes the network complexity while keeping the fork topology at the "
      "gore point.",
      "fork", "Main Road=2", 3);
}

std::string simple_fork_trips() {
  return std::string(R"(```trips
<trips>
    <trip id="av" type="AV" from="main" to="north" depart="3.00"/>
    <trip id="bv_a" type="BV" from="main" to="north" depart="0.00"/>
    <trip id="bv_b" type="BV" from="main" to="south" depart="1.00"/>
</trips>
```
)");
}

// Edge counts 3, 4, 5, 6, 3.
std::string ablate_interp_net(int i) {
  switch (i) {
    case 0:
      return fork_net(67.99, "Main Road");
    case 1:
      return R"(```nodes
<nodes>
    <node id="feed" x="-420.00" y="0.00"/>
    <node id="a" x="-250.00" y="0.00"/>
    <node id="split" x="0.00" y="0.00"/>
    <node id="nb" x="209.23" y="67.99"/>
    <node id="sb" x="209.23" y="-67.99"/>
</nodes>
```

```edges
<edges>
    <edge id="feeder" from="feed" to="a" numLanes="2" speed="13.89" name="Main Road"/>
    <edge id="main" from="a" to="split" numLanes="2" speed="13.89" name="Main Road"/>
    <edge id="north" from="split" to="nb" numLanes="1" speed="13.89" name="North Branch"/>
    <edge id="south" from="split" to="sb" numLanes="1" speed="13.89" name="South Branch"/>
</edges>
```
)";
    case 2:
      return R"(```nodes
<nodes>
    <node id="feed" x="-420.00" y="0.00"/>
    <node id="a" x="-250.00" y="0.00"/>
    <node id="split" x="0.00" y="0.00"/>
    <node id="nb" x="209.23" y="67.99"/>
    <node id="nb2" x="420.00" y="135.00"/>
    <node id="sb" x="209.23" y="-67.99"/>
</nodes>
```

```edges
<edges>
    <edge id="feeder" from="feed" to="a" numLanes="2" speed="13.89" name="Main Road"/>
    <edge id="main" from="a" to="split" numLanes="2" speed="13.89" name="Main Road"/>
    <edge id="north" from="split" to="nb" numLanes="1" speed="13.89" name="North Branch"/>
    <edge id="north_ext" from="nb" to="nb2" numLanes="1" speed="13.89" name="North Branch"/>
    <edge id="south" from="split" to="sb" numLanes="1" speed="13.89" name="South Branch"/>
</edges>
```
)";
    case 3:
      return R"(```nodes
<nodes>
    <node id="feed" x="-420.00" y="0.00"/>
    <node id="a" x="-250.00" y="0.00"/>
    <node id="split" x="0.00" y="0.00"/>
    <node id="nb" x="209.23" y="67.99"/>
    <node id="nb2" x="420.00" y="135.00"/>
    <node id="sb" x="209.23" y="-67.99"/>
    <node id="sb2" x="420.00" y="-135.00"/>
</nodes>
```

```edges
<edges>
    <edge id="feeder" from="feed" to="a" numLanes="2" speed="13.89" name="Main Road"/>
    <edge id="main" from="a" to="split" numLanes="2" speed="13.89" name="Main Road"/>
    <edge id="north" from="split" to="nb" numLanes="1" speed="13.89" name="North Branch"/>
    <edge id="north_ext" from="nb" to="nb2" numLanes="1" speed="13.89" name="North Branch"/>
    <edge id="south" from="split" to="sb" numLanes="1" speed="13.89" name="South Branch"/>
    <edge id="south_ext" from="sb" to="sb2" numLanes="1" speed="13.89" name="South Branch"/>
</edges>
```
)";
    default:
      return fork_net(55.00, "Main Road");
  }
}

// Interpreter off: the same 4-node 6-edge layout with tiny coordinate drift.
std::string ablate_nointerp_net(int i) {
  const double dx = 2.0 * i;
  return fmt::format(R"(```nodes
<nodes>
    <node id="c" x="0.00" y="0.00"/>
    <node id="a" x="{:.2f}" y="0.00"/>
    <node id="b" x="{:.2f}" y="60.00"/>
    <node id="d" x="{:.2f}" y="-60.00"/>
</nodes>
```

```edges
<edges>
    <edge id="a_in" from="a" to="c" numLanes="1" speed="13.89" name="Main Road"/>
    <edge id="a_out" from="c" to="a" numLanes="1" speed="13.89" name="Main Road"/>
    <edge id="b_out" from="c" to="b" numLanes="1" speed="13.89" name="North Branch"/>
    <edge id="b_in" from="b" to="c" numLanes="1" speed="13.89" name="North Branch"/>
    <edge id="d_out" from="c" to="d" numLanes="1" speed="13.89" name="South Branch"/>
    <edge id="d_in" from="d" to="c" numLanes="1" speed="13.89" name="South Branch"/>
</edges>
```
)",
                     -150.0 + dx, 150.0 + dx, 150.0 + dx);
}

const std::string kTripsNoInterp = R"(```trips
<trips>
    <trip id="av" type="AV" from="a_in" to="b_out" depart="3.00"/>
    <trip id="bv_a" type="BV" from="a_in" to="d_out" depart="0.00"/>
    <trip id="bv_b" type="BV" from="b_in" to="a_out" depart="1.00"/>
</trips>
```
)";

// --- crash-report fixture -------------------------------------------------------

const std::string kCrashReport =
    "State crash report 2023-117 (abridged).\n"
    "\n"
    "Location: intersection of Oak Avenue (posted limit 50 km/h, two travel\n"
    "lanes northbound) and Elm Street (posted limit 30 km/h, single lane each\n"
    "way), urban arterial, daylight, dry pavement.\n"
    "\n"
    "Sequence of events: Vehicle 3, a silver hatchback, was northbound on Oak\n"
    "Avenue and slowed near the intersection to turn right onto Elm Street.\n"
    "Vehicle 1, a blue sedan traveling northbound behind it, reduced speed\n"
    "while the turn completed. Vehicle 2, a white SUV following Vehicle 1,\n"
    "braked too late and its front bumper contacted the rear bumper of\n"
    "Vehicle 1, pushing it forward toward the junction.\n"
    "\n"
    "Vehicle 2's driver reported a sight-distance problem caused by afternoon\n"
    "glare.\n";

const std::string kNetCrash = R"(Oak Avenue runs south to north; Elm Street joins from the east. The posted
limits convert to SUMO's m/s unit: 50 km/h becomes 13.89 m/s and 30 km/h
becomes 8.33 m/s.

```nodes
<nodes>
    <node id="junction" x="0.00" y="0.00"/>
    <node id="oak_s" x="0.00" y="-150.00"/>
    <node id="oak_n" x="0.00" y="150.00"/>
    <node id="elm_e" x="120.00" y="0.00"/>
</nodes>
```

```edges
<edges>
    <edge id="oak_nb" from="oak_s" to="junction" numLanes="2" speed="13.89" name="Oak Avenue"/>
    <edge id="oak_nb_out" from="junction" to="oak_n" numLanes="2" speed="13.89" name="Oak Avenue"/>
    <edge id="oak_sb" from="oak_n" to="junction" numLanes="2" speed="13.89" name="Oak Avenue"/>
    <edge id="oak_sb_out" from="junction" to="oak_s" numLanes="2" speed="13.89" name="Oak Avenue"/>
    <edge id="elm_in" from="elm_e" to="junction" numLanes="1" speed="8.33" name="Elm Street"/>
    <edge id="elm_out" from="junction" to="elm_e" numLanes="1" speed="8.33" name="Elm Street"/>
</edges>
```
)";

const std::string kTripsCrash = R"(Vehicle 3 turns right from Oak Avenue onto Elm Street ahead of the others;
Vehicle 1 follows it northbound with Vehicle 2 close behind.

```trips
<trips>
    <trip id="vehicle3" type="BV" from="oak_nb" to="elm_out" depart="0.00"/>
    <trip id="vehicle1" type="AV" from="oak_nb" to="oak_nb_out" depart="2.00"/>
    <trip id="vehicle2" type="BV" from="oak_nb" to="oak_nb_out" depart="3.50"/>
</trips>
```
)";

// --- RAG fixture plans -------------------------------------------------------------

struct PlanFixture {
  std::string name;
  std::string nodes;
  std::string edges;
};

std::vector<PlanFixture> rag_plan_fixtures() {
  std::vector<PlanFixture> fixtures;
  fixtures.push_back(
      {"offramp",
       R"(<nodes>
    <node id="w" x="-350.00" y="0.00"/>
    <node id="gore" x="0.00" y="0.00"/>
    <node id="e" x="350.00" y="0.00"/>
    <node id="exit" x="190.00" y="-80.00"/>
</nodes>
)",
       R"(<edges>
    <edge id="fw_in" from="w" to="gore" numLanes="2" speed="33.33" name="Freeway Mainline"/>
    <edge id="fw_out" from="gore" to="e" numLanes="2" speed="33.33" name="Freeway Mainline"/>
    <edge id="offramp" from="gore" to="exit" numLanes="1" speed="16.67" name="Offramp Exit Lane" shape="0.00,0.00 75.00,-7.00 140.00,-35.00 190.00,-80.00"/>
</edges>
)"});
  fixtures.push_back(
      {"onramp",
       R"(<nodes>
    <node id="w" x="-350.00" y="0.00"/>
    <node id="merge" x="0.00" y="0.00"/>
    <node id="e" x="350.00" y="0.00"/>
    <node id="entry" x="-190.00" y="-80.00"/>
</nodes>
)",
       R"(<edges>
    <edge id="fw_in" from="w" to="merge" numLanes="2" speed="33.33" name="Freeway Mainline"/>
    <edge id="fw_out" from="merge" to="e" numLanes="2" speed="33.33" name="Freeway Mainline"/>
    <edge id="onramp" from="entry" to="merge" numLanes="1" speed="16.67" name="Onramp Entry Lane" shape="-190.00,-80.00 -140.00,-35.00 -75.00,-7.00 0.00,0.00"/>
</edges>
)"});
  fixtures.push_back(
      {"t_cross",
       R"(<nodes>
    <node id="center" x="0.00" y="0.00"/>
    <node id="west" x="-100.00" y="0.00"/>
    <node id="east" x="100.00" y="0.00"/>
    <node id="south" x="0.00" y="-90.00"/>
</nodes>
)",
       R"(<edges>
    <edge id="w_in" from="west" to="center" numLanes="2" speed="13.89" name="Crossing Main"/>
    <edge id="e_out" from="center" to="east" numLanes="2" speed="13.89" name="Crossing Main"/>
    <edge id="e_in" from="east" to="center" numLanes="2" speed="13.89" name="Crossing Main"/>
    <edge id="w_out" from="center" to="west" numLanes="2" speed="13.89" name="Crossing Main"/>
    <edge id="s_in" from="south" to="center" numLanes="1" speed="11.11" name="Crossing Stem"/>
    <edge id="s_out" from="center" to="south" numLanes="1" speed="11.11" name="Crossing Stem"/>
</edges>
)"});
  fixtures.push_back(
      {"y_split",
       R"(<nodes>
    <node id="hub" x="0.00" y="0.00"/>
    <node id="top" x="0.00" y="100.00"/>
    <node id="sw" x="-86.60" y="-50.00"/>
    <node id="se" x="86.60" y="-50.00"/>
</nodes>
)",
       R"(<edges>
    <edge id="t_in" from="top" to="hub" numLanes="1" speed="11.11" name="Wye North"/>
    <edge id="t_out" from="hub" to="top" numLanes="1" speed="11.11" name="Wye North"/>
    <edge id="sw_in" from="sw" to="hub" numLanes="1" speed="11.11" name="Wye Southwest"/>
    <edge id="sw_out" from="hub" to="sw" numLanes="1" speed="11.11" name="Wye Southwest"/>
    <edge id="se_in" from="se" to="hub" numLanes="1" speed="11.11" name="Wye Southeast"/>
    <edge id="se_out" from="hub" to="se" numLanes="1" speed="11.11" name="Wye Southeast"/>
</edges>
)"});
  fixtures.push_back(
      {"four_way",
       R"(<nodes>
    <node id="mid" x="0.00" y="0.00" type="traffic_light"/>
    <node id="w" x="-110.00" y="0.00"/>
    <node id="e" x="110.00" y="0.00"/>
    <node id="n" x="0.00" y="110.00"/>
    <node id="s" x="0.00" y="-110.00"/>
</nodes>
)",
       R"(<edges>
    <edge id="we" from="w" to="mid" numLanes="2" speed="13.89" name="Signal Main"/>
    <edge id="we_o" from="mid" to="e" numLanes="2" speed="13.89" name="Signal Main"/>
    <edge id="ew" from="e" to="mid" numLanes="2" speed="13.89" name="Signal Main"/>
    <edge id="ew_o" from="mid" to="w" numLanes="2" speed="13.89" name="Signal Main"/>
    <edge id="ns" from="n" to="mid" numLanes="1" speed="11.11" name="Signal Cross"/>
    <edge id="ns_o" from="mid" to="s" numLanes="1" speed="11.11" name="Signal Cross"/>
    <edge id="sn" from="s" to="mid" numLanes="1" speed="11.11" name="Signal Cross"/>
    <edge id="sn_o" from="mid" to="n" numLanes="1" speed="11.11" name="Signal Cross"/>
</edges>
)"});
  return fixtures;
}

// --- driver ---------------------------------------------------------------------

struct FixtureSpec {
  std::string name;
  std::string request;
  int count = 1;
  bool use_rag = false;
  bool use_interpreter = true;
  bool use_feedback = true;
  bool crash_mode = false;
  bool expect_generated = true;
  std::vector<std::string> responses;
};

int run_all(const fs::path& root) {
  const fs::path fixture_root = root / "tests" / "fixtures";
  const fs::path transcripts = fixture_root / "transcripts";
  const fs::path nets_dir = fixture_root / "nets";
  const fs::path rag_dir = fixture_root / "rag";
  fs::create_directories(transcripts);
  fs::create_directories(nets_dir);
  fs::create_directories(rag_dir);

  // 1. Compile the RAG plan fixtures into net files and build the store.
  const fs::path store_path = rag_dir / "store.jsonl";
  fs::remove(store_path);
  RagStore store = RagStore::open(store_path.string());
  for (const PlanFixture& fixture : rag_plan_fixtures()) {
    auto plan = parse_plain(fixture.nodes, fixture.edges);
    if (!plan.ok()) {
      std::cerr << "rag fixture " << fixture.name << " does not parse\n";
      return 1;
    }
    auto compiled = compile(plan.value());
    if (!compiled.ok()) {
      std::cerr << "rag fixture " << fixture.name << " does not compile\n";
      return 1;
    }
    const std::string net_text = serialize_net(compiled.value().network);
    write_file((nets_dir / (fixture.name + ".net.xml")).string(), net_text);
    auto id = store.ingest_net(net_text, {fixture.name});
    if (!id.ok()) {
      std::cerr << "rag ingest failed for " << fixture.name << "\n";
      return 1;
    }
    std::cout << fmt::format("rag store: {} -> {}\n", fixture.name, id.value());
  }

  // 2. The crash report text fixture.
  write_file((fixture_root / "crash_report.txt").string(), kCrashReport);

  // 3. Record every transcript fixture through the live pipeline.
  ScriptedServer server;
  std::vector<FixtureSpec> specs;

  specs.push_back({"t_intersection",
                   "Generate a scenario with a T-intersection.",
                   1, false, true, true, false, true,
                   {kInterpT, kNetT, kTripsT, kVerdictPass}});
  specs.push_back({"y_intersection",
                   "Generate a scenario with a Y-intersection.",
                   1, false, true, true, false, true,
                   {kInterpY, kNetY, kTripsY, kVerdictPass}});
  specs.push_back({"four_way",
                   "Generate a scenario with a four-way intersection.",
                   1, false, true, true, false, true,
                   {kInterpX, kNetX, kTripsX, kVerdictPass}});
  specs.push_back({"fork",
                   "Generate a scenario with a fork.",
                   1, false, true, true, false, true,
                   {kInterpFork, kNetFork, kTripsFork, kVerdictPass}});
  specs.push_back({"off_ramp",
                   "Generate a freeway off-ramp scenario.",
                   1, true, true, true, false, true,
                   {kInterpRamp, kNetRamp, kTripsRamp, kVerdictPass}});
  specs.push_back({"fork3",
                   "Generate 3 scenarios with a fork.",
                   3, false, true, true, false, true,
                   {fork3_description(1), fork_net(67.99, "Main Road"),
                    kTripsFork, kVerdictPass,
                    fork3_description(2), fork_net(60.00, "Main Road"),
                    kTripsForkLate, kVerdictFailLate, kTripsFork, kVerdictPass,
                    fork3_description(3), fork_net(75.00, "Main Road"),
                    kTripsFork, kVerdictPass}});
  specs.push_back({"repair_dangling",
                   "Generate a scenario with a T-intersection.",
                   1, false, true, true, false, true,
                   {kInterpT, kNetTDangling, kNetT, kTripsT, kVerdictPass}});
  specs.push_back({"repair_nofeedback",
                   "Generate a scenario with a T-intersection.",
                   1, false, true, false, false, false,
                   {kInterpT, kNetTDangling, kNetTDangling, kNetTDangling}});
  {
    FixtureSpec ablate;
    ablate.name = "ablate_interp";
    ablate.request = "Generate a scenario with a fork.";
    ablate.count = 5;
    for (int i = 0; i < 5; ++i) {
      ablate.responses.push_back(ablate_interp_description(i + 1));
      ablate.responses.push_back(ablate_interp_net(i));
      ablate.responses.push_back(simple_fork_trips());
      ablate.responses.push_back(kVerdictPass);
    }
    specs.push_back(std::move(ablate));
  }
  {
    FixtureSpec ablate;
    ablate.name = "ablate_nointerp";
    ablate.request = "Generate a scenario with a fork.";
    ablate.count = 5;
    ablate.use_interpreter = false;
    for (int i = 0; i < 5; ++i) {
      ablate.responses.push_back(ablate_nointerp_net(i));
      ablate.responses.push_back(kTripsNoInterp);
      ablate.responses.push_back(kVerdictPass);
    }
    specs.push_back(std::move(ablate));
  }
  specs.push_back({"crash",
                   "",
                   1, false, true, true, true, true,
                   {kNetCrash, kTripsCrash}});

  for (const FixtureSpec& spec : specs) {
    const fs::path dir = transcripts / spec.name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    server.script(spec.responses);

    RunConfig config;
    config.request = spec.request;
    config.count = spec.count;
    config.backend.mode = BackendMode::record;
    config.backend.endpoint = server.endpoint();
    config.backend.transcript_dir = dir.string();
    config.backend.max_retries = 0;
    config.use_rag = spec.use_rag;
    config.rag_db = store_path.string();
    config.use_interpreter = spec.use_interpreter;
    config.use_feedback = spec.use_feedback;
    config.template_dir = (root / "data" / "templates").string();
    const fs::path out_dir =
        fs::temp_directory_path() / "scenoforge_fixture_out" / spec.name;
    fs::remove_all(out_dir);
    config.out_dir = out_dir.string();

    BatchSummary summary;
    if (spec.crash_mode) {
      summary = run_crash_report(config, kCrashReport);
    } else {
      summary = run_generate(config);
    }
    bool generated_all = true;
    for (const auto& outcome : summary.outcomes) {
      if (!outcome.generated) generated_all = false;
    }
    if (generated_all != spec.expect_generated) {
      std::cerr << fmt::format("fixture {}: expected generated={}, recorded run "
                               "disagrees\n",
                               spec.name, spec.expect_generated);
      for (const auto& outcome : summary.outcomes) {
        std::cerr << outcome.attempts_log << "\n";
      }
      return 1;
    }
    if (server.remaining() != 0) {
      std::cerr << fmt::format("fixture {}: {} scripted response(s) were never "
                               "requested\n",
                               spec.name, server.remaining());
      return 1;
    }
    std::cout << fmt::format("recorded {}\n", spec.name);
  }
  std::cout << "all fixtures recorded\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::current_path();
  if (!fs::exists(root / "data" / "templates")) {
    std::cerr << "run from the repository root (data/templates not found)\n";
    return 2;
  }
  try {
    return run_all(root);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
