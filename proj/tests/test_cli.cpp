// End-to-end checks of the command-line surface: subcommands, exit codes,
// the configuration file, and artifact files, by running the real binary.

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "fmt/format.h"
#include "scenoforge/net_model.hpp"
#include "scenoforge/util.hpp"
#include "support/paths.hpp"

namespace fs = std::filesystem;
using namespace scenoforge;

namespace {

int run_cli(const std::string& args) {
  const std::string command =
      fmt::format("{} {} >/dev/null 2>&1", SCENOFORGE_CLI_PATH, args);
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

void write_plain_fixture(const fs::path& dir) {
  write_file((dir / "nodes.xml").string(),
             "<nodes>\n"
             "    <node id=\"a\" x=\"0.00\" y=\"0.00\"/>\n"
             "    <node id=\"b\" x=\"0.00\" y=\"220.00\"/>\n"
             "    <node id=\"c\" x=\"180.00\" y=\"220.00\"/>\n"
             "</nodes>\n");
  write_file((dir / "edges.xml").string(),
             "<edges>\n"
             "    <edge id=\"up\" from=\"a\" to=\"b\" numLanes=\"2\" "
             "speed=\"13.89\"/>\n"
             "    <edge id=\"right\" from=\"b\" to=\"c\" numLanes=\"1\" "
             "speed=\"11.11\"/>\n"
             "</edges>\n");
}

}  // namespace

TEST_CASE("compile, route, randtrips, render and simulate chain together") {
  const auto dir = sftest::scratch_dir("cli_chain");
  write_plain_fixture(dir);
  const std::string net = (dir / "out.net.xml").string();

  CHECK(run_cli(fmt::format("compile --nodes {} --edges {} --out {}",
                            (dir / "nodes.xml").string(),
                            (dir / "edges.xml").string(), net)) == 0);
  REQUIRE(fs::exists(net));
  CHECK(parse_net(read_file(net)).ok());

  write_file((dir / "trips.xml").string(),
             "<trips>\n"
             "    <trip id=\"av\" type=\"AV\" from=\"up\" to=\"right\" "
             "depart=\"0.00\"/>\n"
             "</trips>\n");
  const std::string routes = (dir / "out.rou.xml").string();
  CHECK(run_cli(fmt::format("route --net {} --trips {} --out {}", net,
                            (dir / "trips.xml").string(), routes)) == 0);
  REQUIRE(fs::exists(routes));
  CHECK(parse_routes(read_file(routes)).ok());

  const std::string trips_a = (dir / "rand_a.trips.xml").string();
  const std::string trips_b = (dir / "rand_b.trips.xml").string();
  CHECK(run_cli(fmt::format(
            "randtrips --net {} --rate 0.2 --horizon 60 --seed 5 --out {}", net,
            trips_a)) == 0);
  CHECK(run_cli(fmt::format(
            "randtrips --net {} --rate 0.2 --horizon 60 --seed 5 --out {}", net,
            trips_b)) == 0);
  CHECK(read_file(trips_a) == read_file(trips_b));

  const std::string svg = (dir / "net.svg").string();
  CHECK(run_cli(fmt::format("render --net {} --out {}", net, svg)) == 0);
  CHECK(fs::exists(svg));

  CHECK(run_cli(fmt::format("simulate --net {} --routes {} --horizon 90", net,
                            routes)) == 0);
}

TEST_CASE("a failing compile returns 1 and a bad flag returns 2") {
  const auto dir = sftest::scratch_dir("cli_fail");
  write_file((dir / "nodes.xml").string(),
             "<nodes><node id=\"a\" x=\"0\" y=\"0\"/></nodes>");
  write_file((dir / "edges.xml").string(),
             "<edges><edge id=\"e\" from=\"a\" to=\"ghost\"/></edges>");
  CHECK(run_cli(fmt::format("compile --nodes {} --edges {} --out {}",
                            (dir / "nodes.xml").string(),
                            (dir / "edges.xml").string(),
                            (dir / "x.net.xml").string())) == 1);
  CHECK(run_cli("compile --nodes only") == 2);
  CHECK(run_cli("definitely-not-a-subcommand") == 2);
  CHECK(run_cli("generate --request x --backend nonsense --out /tmp/cli_bad") ==
        2);
}

TEST_CASE("generate runs from a config file and flags override it") {
  const auto dir = sftest::scratch_dir("cli_config");
  const auto transcripts =
      sftest::fixture_dir() / "transcripts" / "t_intersection";
  const auto config_out = dir / "from_config";
  const auto flag_out = dir / "from_flag";
  write_file((dir / "run.conf").string(),
             fmt::format("request=\"Generate a scenario with a T-intersection.\"\n"
                         "backend=\"replay:{}\"\n"
                         "templates=\"{}\"\n"
                         "out=\"{}\"\n",
                         transcripts.string(), sftest::template_dir().string(),
                         config_out.string()));
  CHECK(run_cli(fmt::format("generate --config {}", (dir / "run.conf").string())) ==
        0);
  CHECK(fs::exists(config_out / "scenario_0" / "net.net.xml"));
  // The same config with --out on the command line wins over the file.
  CHECK(run_cli(fmt::format("generate --config {} --out {}",
                            (dir / "run.conf").string(), flag_out.string())) == 0);
  CHECK(fs::exists(flag_out / "scenario_0" / "net.net.xml"));

  // report and evaluate consume the generated directory.
  CHECK(run_cli(fmt::format("report --dir {}", flag_out.string())) == 0);
  CHECK(run_cli(fmt::format("evaluate --dir {} --baseline-seed 3",
                            flag_out.string())) == 0);
  CHECK(fs::exists(flag_out / "challenge_report.json"));
  CHECK(fs::exists(flag_out / "challenge_report.txt"));
}

TEST_CASE("crash-report runs end to end from the CLI") {
  const auto dir = sftest::scratch_dir("cli_crash");
  const auto transcripts = sftest::fixture_dir() / "transcripts" / "crash";
  CHECK(run_cli(fmt::format(
            "crash-report --report {} --backend replay:{} --templates {} --out {}",
            (sftest::fixture_dir() / "crash_report.txt").string(),
            transcripts.string(), sftest::template_dir().string(),
            (dir / "out").string())) == 0);
  CHECK(fs::exists(dir / "out" / "scenario_0" / "net.net.xml"));
}

TEST_CASE("rag subcommands manage a store file") {
  const auto dir = sftest::scratch_dir("cli_rag");
  write_plain_fixture(dir);
  const std::string db = (dir / "store.jsonl").string();
  CHECK(run_cli(fmt::format(
            "rag add --rag-db {} --id bend --description \"a two-edge bend\" "
            "--nodes {} --edges {} --tags demo",
            db, (dir / "nodes.xml").string(), (dir / "edges.xml").string())) == 0);
  const std::string net = (dir / "r.net.xml").string();
  REQUIRE(run_cli(fmt::format("compile --nodes {} --edges {} --out {}",
                              (dir / "nodes.xml").string(),
                              (dir / "edges.xml").string(), net)) == 0);
  CHECK(run_cli(fmt::format("rag ingest --rag-db {} --net {}", db, net)) == 0);
  CHECK(run_cli(fmt::format("rag query --rag-db {} --text bend -k 2", db)) == 0);
  CHECK(file_exists(db));
}
