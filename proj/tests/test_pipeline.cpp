#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "doctest.h"
#include "fmt/format.h"
#include "json.hpp"
#include "scenoforge/net_compiler.hpp"
#include "scenoforge/pipeline.hpp"
#include "scenoforge/svg.hpp"
#include "scenoforge/util.hpp"
#include "scenoforge/xml.hpp"
#include "support/fixtures.hpp"
#include "support/paths.hpp"
#include "support/stub_server.hpp"

using namespace scenoforge;
namespace fs = std::filesystem;

namespace {

std::string hash_directory(const fs::path& dir) {
  std::vector<std::string> entries;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    entries.push_back(fs::relative(entry.path(), dir).string() + ":" +
                      hex_digest(read_file(entry.path().string())));
  }
  std::sort(entries.begin(), entries.end());
  std::string all;
  for (const auto& entry : entries) all += entry + "\n";
  return hex_digest(all);
}

int count_occurrences(const std::string& text, const std::string& needle) {
  int count = 0;
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

}  // namespace

TEST_CASE("the fork3 replay produces three scenario directories and reports") {
  const auto out = sftest::scratch_dir("pipe_fork3");
  RunConfig config = sftest::replay_run("fork3", "Generate 3 scenarios with a fork.",
                                        out.string());
  config.count = 3;
  config.scene = SceneType::fork;
  const BatchSummary summary = run_generate(config);
  CHECK(summary.exit_code == 0);
  REQUIRE(summary.outcomes.size() == 3);
  for (const auto& outcome : summary.outcomes) {
    CHECK(outcome.generated);
    for (const char* file :
         {"description.txt", "nodes.nod.xml", "edges.edg.xml", "net.net.xml",
          "trips.trips.xml", "routes.rou.xml", "scenario.sumocfg", "attempts.log",
          "verdict.txt", "render.svg"}) {
      CHECK_MESSAGE(fs::exists(fs::path(outcome.dir) / file), file);
    }
  }
  CHECK(fs::exists(out / "report.json"));
  CHECK(fs::exists(out / "report.txt"));
  CHECK(summary.conformity.scene_type_accuracy == doctest::Approx(1.0));
  CHECK(summary.conformity.vehicles_accuracy == doctest::Approx(1.0));

  // Scenario 1's evaluator failed once and triggered a vehicle regeneration.
  CHECK(summary.outcomes[1].vehicle_attempts == 2);
  REQUIRE(summary.outcomes[1].verdict.has_value());
  CHECK(summary.outcomes[1].verdict->passed);
  const std::string log = summary.outcomes[1].attempts_log;
  CHECK(log.find("regenerating with the evaluator's reasoning") != std::string::npos);

  // Diversity over three scenarios exists and is finite.
  REQUIRE(summary.diversity.has_value());
  CHECK(summary.diversity->vehicles.mean == doctest::Approx(4.0));
}

TEST_CASE("replay runs are byte-stable across repetitions") {
  const auto out1 = sftest::scratch_dir("pipe_det1");
  const auto out2 = sftest::scratch_dir("pipe_det2");
  for (const auto* out : {&out1, &out2}) {
    RunConfig config = sftest::replay_run(
        "t_intersection", "Generate a scenario with a T-intersection.",
        out->string());
    const BatchSummary summary = run_generate(config);
    REQUIRE(summary.exit_code == 0);
  }
  CHECK(hash_directory(out1) == hash_directory(out2));
}

TEST_CASE("every artifact a run writes re-parses with this artifact's parsers") {
  const auto out = sftest::scratch_dir("pipe_selfcheck");
  RunConfig config = sftest::replay_run(
      "four_way", "Generate a scenario with a four-way intersection.",
      out.string());
  const BatchSummary summary = run_generate(config);
  REQUIRE(summary.exit_code == 0);
  const fs::path dir = summary.outcomes[0].dir;
  auto plan = parse_plain(read_file((dir / "nodes.nod.xml").string()),
                          read_file((dir / "edges.edg.xml").string()));
  CHECK(plan.ok());
  auto net = parse_net(read_file((dir / "net.net.xml").string()));
  CHECK(net.ok());
  CHECK(parse_trips(read_file((dir / "trips.trips.xml").string())).ok());
  CHECK(parse_routes(read_file((dir / "routes.rou.xml").string())).ok());
  CHECK(xml::parse(read_file((dir / "scenario.sumocfg").string())).ok());
  CHECK(xml::parse(read_file((dir / "render.svg").string())).ok());
  CHECK_NOTHROW(nlohmann::json::parse(read_file((out / "report.json").string())));
  // The serialized plan compiles to the serialized net, byte for byte.
  auto compiled = compile(plan.value());
  REQUIRE(compiled.ok());
  CHECK(serialize_net(compiled.value().network) ==
        read_file((dir / "net.net.xml").string()));
}

TEST_CASE("the dangling-node fixture repairs itself on the second attempt") {
  const auto out = sftest::scratch_dir("pipe_repair");
  RunConfig config = sftest::replay_run(
      "repair_dangling", "Generate a scenario with a T-intersection.",
      out.string());
  const BatchSummary summary = run_generate(config);
  REQUIRE(summary.exit_code == 0);
  REQUIRE(summary.outcomes.size() == 1);
  CHECK(summary.outcomes[0].net_attempts == 2);
  CHECK(!summary.outcomes[0].single_pass);
  // The diagnostic subject from attempt 1 is in the attempt-2 feedback...
  const std::string log = summary.outcomes[0].attempts_log;
  CHECK(log.find("n_missing") != std::string::npos);
  // ...and verbatim inside the recorded attempt-2 prompt.
  const auto entries = read_transcript_file(
      (sftest::fixture_dir() / "transcripts" / "repair_dangling" /
       "net_generator.transcript")
          .string());
  REQUIRE(entries.size() == 2);
  const auto request = nlohmann::json::parse(entries[1].request_json);
  const std::string prompt = request["messages"][1]["content"].get<std::string>();
  CHECK(prompt.find("n_missing") != std::string::npos);
}

TEST_CASE("disabling feedback turns the repairable fixture into a failure") {
  const auto out = sftest::scratch_dir("pipe_nofeedback");
  RunConfig config = sftest::replay_run(
      "repair_nofeedback", "Generate a scenario with a T-intersection.",
      out.string());
  config.use_feedback = false;
  const BatchSummary summary = run_generate(config);
  CHECK(summary.exit_code == 1);
  REQUIRE(summary.outcomes.size() == 1);
  CHECK(!summary.outcomes[0].generated);
  CHECK(summary.outcomes[0].net_attempts == 3);
  CHECK(fs::exists(fs::path(summary.outcomes[0].dir) / "attempts.log"));
}

TEST_CASE("interpreter ablation: fixed topology without it, variety with it") {
  const auto out_with = sftest::scratch_dir("pipe_ablate_interp");
  RunConfig with_interp = sftest::replay_run(
      "ablate_interp", "Generate a scenario with a fork.", out_with.string());
  with_interp.count = 5;
  const BatchSummary with_summary = run_generate(with_interp);
  REQUIRE(with_summary.exit_code == 0);
  REQUIRE(with_summary.diversity.has_value());
  CHECK(with_summary.diversity->edges.stddev > 0.0);

  const auto out_without = sftest::scratch_dir("pipe_ablate_nointerp");
  RunConfig without_interp = sftest::replay_run(
      "ablate_nointerp", "Generate a scenario with a fork.", out_without.string());
  without_interp.count = 5;
  without_interp.use_interpreter = false;
  const BatchSummary without_summary = run_generate(without_interp);
  REQUIRE(without_summary.exit_code == 0);
  REQUIRE(without_summary.diversity.has_value());
  CHECK(without_summary.diversity->edges.stddev == 0.0);
  CHECK(without_summary.diversity->edges.mean == doctest::Approx(6.0));
}

TEST_CASE("the crash report reconstructs the documented situation") {
  const auto out = sftest::scratch_dir("pipe_crash");
  RunConfig config = sftest::replay_run("crash", "", out.string());
  const std::string report_text =
      read_file((sftest::fixture_dir() / "crash_report.txt").string());
  const BatchSummary summary = run_crash_report(config, report_text);
  REQUIRE(summary.exit_code == 0);
  const Scenario& scenario = *summary.outcomes[0].scenario;

  // Three vehicles, inferred from the report's enumeration.
  CHECK(infer_vehicle_count(report_text) == 3);
  REQUIRE(scenario.routes.size() == 3);

  // Vehicle 1 departs ahead of Vehicle 2.
  std::map<std::string, const Route*> by_id;
  for (const Route& route : scenario.routes) by_id[route.vehicle_id] = &route;
  REQUIRE(by_id.count("vehicle1"));
  REQUIRE(by_id.count("vehicle2"));
  REQUIRE(by_id.count("vehicle3"));
  CHECK(by_id["vehicle1"]->depart_time < by_id["vehicle2"]->depart_time);

  // Vehicle 3 turns right at the junction.
  const Route* veh3 = by_id["vehicle3"];
  REQUIRE(veh3->edges.size() >= 2);
  bool turns_right = false;
  for (const Connection& connection : scenario.network.connections) {
    if (connection.from_edge == veh3->edges[0] &&
        connection.to_edge == veh3->edges[1] &&
        connection.dir == ConnectionDir::right) {
      turns_right = true;
    }
  }
  CHECK(turns_right);

  // An intersection exists and the 50 km/h limit landed as 13.89 m/s.
  bool has_intersection = false;
  for (const Junction& junction : scenario.network.junctions) {
    std::set<std::string> neighbors;
    for (const CompiledEdge& edge : scenario.network.edges) {
      if (edge.from_junction == junction.id) neighbors.insert(edge.to_junction);
      if (edge.to_junction == junction.id) neighbors.insert(edge.from_junction);
    }
    if (neighbors.size() >= 3) has_intersection = true;
  }
  CHECK(has_intersection);
  const std::string net_text =
      read_file((fs::path(summary.outcomes[0].dir) / "net.net.xml").string());
  CHECK(net_text.find("speed=\"13.89\"") != std::string::npos);

  const CompiledEdge* oak = scenario.network.find_edge("oak_nb");
  REQUIRE(oak);
  CHECK(oak->lanes.front().speed == doctest::Approx(13.89).epsilon(0.01 / 13.89));
}

TEST_CASE("an empty crash report is a usage error") {
  RunConfig config = sftest::replay_run("crash", "", "/tmp/never_used");
  CHECK_THROWS_AS(run_crash_report(config, "  \n"), std::invalid_argument);
}

TEST_CASE("vehicle counts come from distinct Vehicle-N mentions only") {
  CHECK(infer_vehicle_count("Vehicle 1 hit Vehicle 2; Vehicle 1 stopped.") == 2);
  CHECK(infer_vehicle_count("vehicle 3 turned right") == 1);
  CHECK(!infer_vehicle_count("two cars and a truck").has_value());
}

TEST_CASE("the evaluation digest stays within 2000 characters") {
  Scenario scenario;
  scenario.network = sftest::compile_or_die(sftest::fork_plan());
  for (int i = 0; i < 200; ++i) {
    Route route;
    route.vehicle_id = fmt::format("vehicle_with_a_long_name_{}", i);
    route.kind = i == 0 ? VehicleKind::AV : VehicleKind::BV;
    route.edges = {"main", "out_left"};
    route.depart_time = i;
    scenario.routes.push_back(route);
  }
  scenario.av_id = "vehicle_with_a_long_name_0";
  const std::string digest = scenario_digest(scenario);
  CHECK(digest.size() <= 2000);
  CHECK(digest.find("fork") != std::string::npos);
  CHECK(digest.find("vehicle_with_a_long_name_0") != std::string::npos);
}

TEST_CASE("invalid run configurations are rejected before any work") {
  RunConfig config = sftest::replay_run("fork", "x", "/tmp/never_used");
  config.count = 0;
  CHECK_THROWS_AS(run_generate(config), std::invalid_argument);
  config.count = 1;
  config.max_attempts = 0;
  CHECK_THROWS_AS(run_generate(config), std::invalid_argument);
  config.max_attempts = 3;
  config.out_dir = "";
  CHECK_THROWS_AS(run_generate(config), std::invalid_argument);
}

TEST_CASE("the RAG run injects the retrieved example and logs its id") {
  const auto out = sftest::scratch_dir("pipe_rag");
  RunConfig config = sftest::replay_run(
      "off_ramp", "Generate a freeway off-ramp scenario.", out.string());
  config.use_rag = true;
  config.rag_db = (sftest::fixture_dir() / "rag" / "store.jsonl").string();
  config.scene = SceneType::ramp;
  const BatchSummary summary = run_generate(config);
  REQUIRE(summary.exit_code == 0);
  CHECK(summary.outcomes[0].injected_example == "entry_0");  // the off-ramp
  const std::string log = read_file(
      (fs::path(summary.outcomes[0].dir) / "attempts.log").string());
  CHECK(log.find("entry_0") != std::string::npos);
  CHECK(summary.conformity.scene_type_accuracy == doctest::Approx(1.0));
}

// --- SVG rendering -------------------------------------------------------------------

TEST_CASE("the SVG census matches the network") {
  const CompiledNetwork net = sftest::compile_or_die(sftest::t_plan());
  const std::string svg = render_svg(net);
  const NetworkStats stats = network_stats(net);
  CHECK(count_occurrences(svg, "<polyline class=\"lane\"") == stats.total_lanes);
  long shaped_junctions = 0;
  for (const Junction& junction : net.junctions) {
    if (!junction.shape.empty()) ++shaped_junctions;
  }
  CHECK(net.junctions.size() == 4);  // three dead ends and the center
  CHECK(count_occurrences(svg, "<polygon class=\"junction\"") == shaped_junctions);
  CHECK(count_occurrences(svg, "<text class=\"edge-label\"") ==
        static_cast<int>(net.edges.size()));
  CHECK(render_svg(net) == svg);
  CHECK(xml::parse(svg).ok());
}

TEST_CASE("a single-edge net renders one polyline per lane") {
  const CompiledNetwork net =
      sftest::compile_or_die(sftest::straight_plan(100.0, 3, 13.89));
  const std::string svg = render_svg(net);
  CHECK(count_occurrences(svg, "<polyline class=\"lane\"") == 3);
}

// --- record/replay round trip over the whole pipeline --------------------------------------

TEST_CASE("a recorded run replays to byte-identical artifacts") {
  sftest::StubChat stub;
  const std::string description =
      "Description:\nA short chain.\n\nReasoning:\nMinimal.\n\n"
      "```footer\nscene_type: general\nlanes: Link Road=1\nvehicles: 2\n```\n";
  const std::string net =
      "```nodes\n<nodes><node id=\"a\" x=\"0.00\" y=\"0.00\"/>"
      "<node id=\"b\" x=\"150.00\" y=\"0.00\"/>"
      "<node id=\"c\" x=\"300.00\" y=\"0.00\"/></nodes>\n```\n"
      "```edges\n<edges>"
      "<edge id=\"ab\" from=\"a\" to=\"b\" numLanes=\"1\" speed=\"13.89\" "
      "name=\"Link Road\"/>"
      "<edge id=\"bc\" from=\"b\" to=\"c\" numLanes=\"1\" speed=\"13.89\" "
      "name=\"Link Road\"/></edges>\n```\n";
  const std::string trips =
      "```trips\n<trips>"
      "<trip id=\"av\" type=\"AV\" from=\"ab\" to=\"bc\" depart=\"1.00\"/>"
      "<trip id=\"bv\" type=\"BV\" from=\"ab\" to=\"bc\" depart=\"0.00\"/>"
      "</trips>\n```\n";
  stub.script({description, net, trips, "```verdict\nPASS: fine.\n```\n"});

  const auto transcript_dir = sftest::scratch_dir("pipe_rr_transcripts");
  const auto out_record = sftest::scratch_dir("pipe_rr_record");
  RunConfig config;
  config.request = "Generate a simple two-edge road.";
  config.backend.mode = BackendMode::record;
  config.backend.endpoint = stub.endpoint();
  config.backend.transcript_dir = transcript_dir.string();
  config.backend.max_retries = 0;
  config.out_dir = out_record.string();
  config.template_dir = sftest::template_dir().string();
  const BatchSummary recorded = run_generate(config);
  REQUIRE(recorded.exit_code == 0);

  const auto out_replay = sftest::scratch_dir("pipe_rr_replay");
  RunConfig replay = config;
  replay.backend.mode = BackendMode::replay;
  replay.backend.endpoint.clear();
  replay.out_dir = out_replay.string();
  const BatchSummary replayed = run_generate(replay);
  REQUIRE(replayed.exit_code == 0);
  CHECK(hash_directory(out_record) == hash_directory(out_replay));
}

TEST_CASE("parallel http pipelines produce the same bytes as sequential ones") {
  sftest::StubChat stub;
  stub.respond_with([](const std::string& prompt) -> std::string {
    if (prompt.find("tagged footer") != std::string::npos) {
      return "Description:\nA chain.\n\nReasoning:\nOk.\n\n"
             "```footer\nscene_type: general\nvehicles: 1\n```\n";
    }
    if (prompt.find("tagged nodes") != std::string::npos) {
      return "```nodes\n<nodes><node id=\"a\" x=\"0.00\" y=\"0.00\"/>"
             "<node id=\"b\" x=\"200.00\" y=\"0.00\"/></nodes>\n```\n"
             "```edges\n<edges><edge id=\"ab\" from=\"a\" to=\"b\" "
             "numLanes=\"1\" speed=\"13.89\"/></edges>\n```\n";
    }
    if (prompt.find("tagged trips") != std::string::npos) {
      return "```trips\n<trips><trip id=\"av\" type=\"AV\" from=\"ab\" "
             "to=\"ab\" depart=\"0.00\"/></trips>\n```\n";
    }
    return "```verdict\nPASS: fine.\n```\n";
  });
  auto run_with_jobs = [&](const std::string& name, int jobs) {
    const auto out = sftest::scratch_dir(name);
    RunConfig config;
    config.request = "Generate a simple road.";
    config.count = 4;
    config.jobs = jobs;
    config.backend.mode = BackendMode::http;
    config.backend.endpoint = stub.endpoint();
    config.backend.max_retries = 0;
    config.out_dir = out.string();
    config.template_dir = sftest::template_dir().string();
    const BatchSummary summary = run_generate(config);
    REQUIRE(summary.exit_code == 0);
    return hash_directory(out);
  };
  CHECK(run_with_jobs("pipe_jobs_seq", 1) == run_with_jobs("pipe_jobs_par", 3));
}

// --- scenario independence over a live backend -------------------------------------------

TEST_CASE("scenarios share no hidden state across a batch") {
  sftest::StubChat stub;
  // Content-addressed responses: the reply depends only on the prompt.
  stub.respond_with([](const std::string& prompt) -> std::string {
    if (prompt.find("tagged footer") != std::string::npos) {
      return "Description:\nA fork split.\n\nReasoning:\nRequested.\n\n"
             "```footer\nscene_type: fork\nlanes: Main Road=2\nvehicles: 2\n```\n";
    }
    if (prompt.find("tagged nodes") != std::string::npos) {
      return "```nodes\n<nodes><node id=\"a\" x=\"-250.00\" y=\"0.00\"/>"
             "<node id=\"g\" x=\"0.00\" y=\"0.00\"/>"
             "<node id=\"l\" x=\"200.00\" y=\"70.00\"/>"
             "<node id=\"r\" x=\"200.00\" y=\"-70.00\"/></nodes>\n```\n"
             "```edges\n<edges>"
             "<edge id=\"main\" from=\"a\" to=\"g\" numLanes=\"2\" speed=\"13.89\" "
             "name=\"Main Road\"/>"
             "<edge id=\"left\" from=\"g\" to=\"l\" numLanes=\"1\" speed=\"13.89\"/>"
             "<edge id=\"right\" from=\"g\" to=\"r\" numLanes=\"1\" speed=\"13.89\"/>"
             "</edges>\n```\n";
    }
    if (prompt.find("tagged trips") != std::string::npos) {
      return "```trips\n<trips>"
             "<trip id=\"av\" type=\"AV\" from=\"main\" to=\"left\" depart=\"2.00\"/>"
             "<trip id=\"bv\" type=\"BV\" from=\"main\" to=\"right\" depart=\"0.00\"/>"
             "</trips>\n```\n";
    }
    return "```verdict\nPASS: fine.\n```\n";
  });

  auto run_batch = [&](const std::string& name, int count) {
    const auto out = sftest::scratch_dir(name);
    RunConfig config;
    config.request = "Generate a scenario with a fork.";
    config.count = count;
    config.backend.mode = BackendMode::http;
    config.backend.endpoint = stub.endpoint();
    config.backend.max_retries = 0;
    config.out_dir = out.string();
    config.template_dir = sftest::template_dir().string();
    const BatchSummary summary = run_generate(config);
    REQUIRE(summary.exit_code == 0);
    return out;
  };

  const auto pair_dir = run_batch("pipe_independent_two", 2);
  const auto solo_dir = run_batch("pipe_independent_one", 1);
  // Scenario 1 of the batch equals scenario 0 of a fresh run byte for byte,
  // and equals its own batch sibling: nothing leaked between pipelines.
  CHECK(hash_directory(pair_dir / "scenario_0") ==
        hash_directory(solo_dir / "scenario_0"));
  CHECK(hash_directory(pair_dir / "scenario_1") ==
        hash_directory(pair_dir / "scenario_0"));
}
