// Command-line surface for the scenario generation engine: generation runs,
// standalone compile/route/simulate, RAG management, rendering, crash-report
// reconstruction and metric reports.

#include <fmt/format.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scenoforge/metrics.hpp"
#include "scenoforge/net_compiler.hpp"
#include "scenoforge/pipeline.hpp"
#include "scenoforge/rag.hpp"
#include "scenoforge/route_planner.hpp"
#include "scenoforge/svg.hpp"
#include "scenoforge/util.hpp"

namespace sf = scenoforge;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct BackendFlags {
  std::string backend = "replay:transcripts";
  std::string endpoint = "https://api.openai.com/v1";
  std::string model = "gpt-4";
  double temperature = 0.2;
};

sf::BackendConfig to_backend_config(const BackendFlags& flags) {
  sf::BackendConfig config;
  config.endpoint = flags.endpoint;
  config.model_name = flags.model;
  config.temperature = flags.temperature;
  if (flags.backend == "http") {
    config.mode = sf::BackendMode::http;
  } else if (sf::starts_with(flags.backend, "replay:")) {
    config.mode = sf::BackendMode::replay;
    config.transcript_dir = flags.backend.substr(7);
  } else if (sf::starts_with(flags.backend, "record:")) {
    config.mode = sf::BackendMode::record;
    config.transcript_dir = flags.backend.substr(7);
  } else {
    throw std::invalid_argument("--backend must be http, replay:DIR or record:DIR");
  }
  return config;
}

void add_backend_flags(CLI::App* cmd, BackendFlags& flags) {
  cmd->add_option("--backend", flags.backend,
                  "Backend mode: http, replay:DIR or record:DIR");
  cmd->add_option("--endpoint", flags.endpoint,
                  "Chat endpoint base URL (http/record modes)");
  cmd->add_option("--model", flags.model, "Model name sent to the endpoint");
  cmd->add_option("--temperature", flags.temperature, "Sampling temperature");
}

sf::CompiledNetwork load_net_or_die(const std::string& path) {
  auto parsed = sf::parse_net(sf::read_file(path));
  if (!parsed.ok()) {
    for (const auto& diag : parsed.diagnostics()) {
      std::cerr << sf::to_string(diag) << "\n";
    }
    throw std::runtime_error(fmt::format("cannot load net file {}", path));
  }
  for (const std::string& warning : parsed.value().warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  return std::move(parsed.value().network);
}

int print_diags_and_fail(const sf::Diagnostics& diags) {
  for (const auto& diag : diags) std::cerr << sf::to_string(diag) << "\n";
  std::cerr << "\n" << sf::diagnostics_to_feedback(diags);
  return kExitFailure;
}

// Recomputes batch statistics from the on-disk artifacts; doubles as a
// self-consistency sweep since every file goes back through our own parsers.
int cmd_report(const std::string& dir) {
  std::vector<sf::Scenario> scenarios;
  std::vector<sf::ConformityInput> conformity_inputs;
  std::vector<std::string> scenario_dirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() &&
        sf::starts_with(entry.path().filename().string(), "scenario_")) {
      scenario_dirs.push_back(entry.path().string());
    }
  }
  std::sort(scenario_dirs.begin(), scenario_dirs.end());
  for (const std::string& scenario_dir : scenario_dirs) {
    const fs::path base(scenario_dir);
    if (!sf::file_exists((base / "net.net.xml").string())) continue;
    sf::Scenario scenario;
    scenario.network = load_net_or_die((base / "net.net.xml").string());
    auto routes = sf::parse_routes(sf::read_file((base / "routes.rou.xml").string()));
    if (!routes.ok()) return print_diags_and_fail(routes.diagnostics());
    scenario.routes = routes.value();
    for (const auto& route : scenario.routes) {
      if (route.kind == sf::VehicleKind::AV) scenario.av_id = route.vehicle_id;
    }
    sf::ConformityInput input;
    input.generated = true;
    input.single_pass = true;
    const std::string description_path = (base / "description.txt").string();
    if (sf::file_exists(description_path)) {
      auto description = sf::parse_description(sf::read_file(description_path));
      if (description.ok()) input.description = description.value();
    }
    input.scenario = scenario;
    conformity_inputs.push_back(input);
    scenarios.push_back(std::move(scenario));
  }
  if (scenarios.empty()) {
    std::cerr << "no compiled scenarios under " << dir << "\n";
    return kExitFailure;
  }
  std::cout << sf::conformity_table(sf::conformity_report(conformity_inputs))
            << "\n"
            << sf::diversity_table(sf::diversity_stats(scenarios));
  return kExitOk;
}

// RandomTrip counterpart of a generated scenario: background trips drawn at
// a 1.5x over-provisioned arrival rate over the horizon, then subsampled to
// the scenario's background-vehicle count. The AV route stays unchanged.
std::optional<sf::Scenario> randomtrip_counterpart(const sf::Scenario& scenario,
                                                   double horizon,
                                                   std::uint64_t seed) {
  const sf::Route* av = scenario.av_route();
  if (!av) return std::nullopt;
  const std::size_t bv_count = scenario.routes.size() - 1;
  sf::TripGenParams params;
  params.horizon = horizon;
  params.seed = seed;
  params.arrival_rate =
      std::max(1.5 * static_cast<double>(bv_count) / horizon, 1e-3);
  auto generated = sf::random_trips(scenario.network, params);
  if (!generated.ok()) return std::nullopt;
  std::vector<sf::Trip> trips = generated.value();
  if (trips.size() > bv_count) {
    trips = sf::subsample_trips(trips, bv_count, seed).value();
  }
  sf::Scenario counterpart;
  counterpart.network = scenario.network;
  counterpart.av_id = scenario.av_id;
  counterpart.request = scenario.request;
  const sf::ExpandResult expanded = sf::expand_trips(scenario.network, trips);
  counterpart.routes = expanded.routes;
  counterpart.routes.push_back(*av);
  return counterpart;
}

int cmd_evaluate(const std::string& dir, sf::AvPolicy policy, double horizon,
                 long baseline_seed) {
  std::vector<std::string> scenario_dirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() &&
        sf::starts_with(entry.path().filename().string(), "scenario_")) {
      scenario_dirs.push_back(entry.path().string());
    }
  }
  std::sort(scenario_dirs.begin(), scenario_dirs.end());
  std::vector<sf::DrivingScore> scores;
  std::vector<sf::DrivingScore> baseline_scores;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const std::string& scenario_dir : scenario_dirs) {
    const fs::path base(scenario_dir);
    if (!sf::file_exists((base / "net.net.xml").string())) continue;
    sf::Scenario scenario;
    scenario.network = load_net_or_die((base / "net.net.xml").string());
    auto routes = sf::parse_routes(sf::read_file((base / "routes.rou.xml").string()));
    if (!routes.ok()) return print_diags_and_fail(routes.diagnostics());
    scenario.routes = routes.value();
    for (const auto& route : scenario.routes) {
      if (route.kind == sf::VehicleKind::AV) scenario.av_id = route.vehicle_id;
    }
    if (scenario.av_id.empty()) continue;
    sf::SimConfig config;
    config.horizon = horizon;
    const sf::Trace trace = sf::simulate(scenario, config, policy);
    const sf::DrivingScore score = sf::driving_score(trace, scenario, {}, config);
    scores.push_back(score);
    nlohmann::ordered_json row = {{"dir", base.filename().string()},
                                  {"route_completion", score.route_completion},
                                  {"driving_score", score.driving_score},
                                  {"total_score", score.total_score},
                                  {"use_time", score.use_time},
                                  {"success", score.success}};
    if (baseline_seed >= 0) {
      const auto counterpart = randomtrip_counterpart(
          scenario, horizon, static_cast<std::uint64_t>(baseline_seed));
      if (counterpart) {
        const sf::Trace baseline_trace = sf::simulate(*counterpart, config, policy);
        const sf::DrivingScore baseline =
            sf::driving_score(baseline_trace, *counterpart, {}, config);
        baseline_scores.push_back(baseline);
        row["baseline_total_score"] = baseline.total_score;
        row["baseline_success"] = baseline.success;
      } else {
        std::cerr << "warning: no RandomTrip counterpart for "
                  << base.filename().string() << "\n";
      }
    }
    rows.push_back(std::move(row));
  }
  if (scores.empty()) {
    std::cerr << "no simulatable scenarios under " << dir << "\n";
    return kExitFailure;
  }
  const sf::ChallengeStats stats = sf::challenge_stats(scores);
  std::optional<sf::ChallengeStats> baseline_stats;
  if (!baseline_scores.empty()) {
    baseline_stats = sf::challenge_stats(baseline_scores);
  }
  const std::string table = sf::challenge_table(stats, baseline_stats);
  std::cout << table;
  nlohmann::ordered_json report;
  report["scenarios"] = rows;
  auto entry = [](const sf::MeanStd& value) {
    return nlohmann::ordered_json{{"mean", value.mean}, {"std", value.stddev}};
  };
  auto aggregate = [&](const sf::ChallengeStats& s) {
    return nlohmann::ordered_json{{"route_completion", entry(s.route_completion)},
                                  {"driving_score", entry(s.driving_score)},
                                  {"total_score", entry(s.total_score)},
                                  {"use_time", entry(s.use_time)},
                                  {"success_rate", entry(s.success_rate)}};
  };
  report["aggregate"] = aggregate(stats);
  if (baseline_stats) report["baseline"] = aggregate(*baseline_stats);
  sf::write_file((fs::path(dir) / "challenge_report.json").string(),
                 report.dump(2) + "\n");
  sf::write_file((fs::path(dir) / "challenge_report.txt").string(), table);
  return kExitOk;
}

}  // namespace

// Flat key=value configuration support: every key is a long flag name, and
// flags given on the command line win over the file.
std::vector<std::string> apply_config_file(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (sf::starts_with(args[i], "--config=")) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (config_path.empty()) return args;
  std::set<std::string> given;
  for (const std::string& arg : args) {
    if (sf::starts_with(arg, "--")) {
      given.insert(arg.substr(0, arg.find('=')));
    }
  }
  for (const std::string& raw_line : sf::split(sf::read_file(config_path), '\n')) {
    const std::string line = sf::trim(raw_line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(
          fmt::format("config file line is not key=value: {}", line));
    }
    const std::string key = "--" + sf::trim(line.substr(0, eq));
    std::string value = sf::trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (given.count(key)) continue;  // command line wins
    if (value == "true") {
      args.push_back(key);  // bare flag
    } else {
      args.push_back(key);
      args.push_back(value);
    }
  }
  return args;
}

int main(int argc, char** argv) {
  CLI::App app{"scenoforge: text-conditioned road scenario generation and "
               "evaluation"};
  app.require_subcommand(1);

  // generate ---------------------------------------------------------------
  auto* generate = app.add_subcommand("generate", "Run the full pipeline");
  sf::RunConfig run;
  BackendFlags backend_flags;
  std::string scene_flag;
  bool no_interpreter = false;
  bool no_feedback = false;
  generate->add_option("--request", run.request, "Testing request text")->required();
  generate->add_option("--count", run.count, "Number of scenarios");
  generate->add_option("--scene", scene_flag,
                       "Scene type hint for conformity scoring");
  add_backend_flags(generate, backend_flags);
  generate->add_flag("--rag", run.use_rag, "Inject the closest stored geometry");
  generate->add_option("--rag-db", run.rag_db, "RAG store file");
  generate->add_option("--seed", run.seed, "Seed for seeded sub-steps");
  generate->add_option("--max-attempts", run.max_attempts,
                       "Self-improvement attempt budget per stage");
  generate->add_option("--out", run.out_dir, "Output directory")->required();
  generate->add_option("--jobs", run.jobs, "Concurrent pipelines (http mode)");
  generate->add_option("--templates", run.template_dir, "Prompt template directory");
  generate->add_flag("--no-interpreter", no_interpreter,
                     "Bypass the interpreter stage (ablation)");
  generate->add_flag("--no-feedback", no_feedback,
                     "Retry without diagnostic feedback (ablation)");

  // compile ------------------------------------------------------------------
  auto* compile_cmd = app.add_subcommand("compile", "Compile plain files to a net");
  std::string nodes_path, edges_path, out_path;
  compile_cmd->add_option("--nodes", nodes_path, "Node file")->required();
  compile_cmd->add_option("--edges", edges_path, "Edge file")->required();
  compile_cmd->add_option("--out", out_path, "Output net file")->required();

  // route ---------------------------------------------------------------------
  auto* route_cmd = app.add_subcommand("route", "Expand trips into routes");
  std::string net_path, trips_path;
  route_cmd->add_option("--net", net_path, "Net file")->required();
  route_cmd->add_option("--trips", trips_path, "Trips file")->required();
  route_cmd->add_option("--out", out_path, "Output route file")->required();

  // randtrips -------------------------------------------------------------------
  auto* randtrips = app.add_subcommand("randtrips", "Generate random trips");
  sf::TripGenParams trip_params;
  bool all_edges = false;
  randtrips->add_option("--net", net_path, "Net file")->required();
  randtrips->add_option("--rate", trip_params.arrival_rate, "Arrivals per second");
  randtrips->add_option("--horizon", trip_params.horizon, "Time horizon, seconds");
  randtrips->add_option("--seed", trip_params.seed, "PRNG seed");
  randtrips->add_flag("--all-edges", all_edges,
                      "Draw origins/destinations from all edges, not the fringe");
  randtrips->add_option("--out", out_path, "Output trips file")->required();

  // simulate ---------------------------------------------------------------------
  auto* simulate_cmd = app.add_subcommand("simulate", "Run the mini simulator");
  std::string routes_path;
  std::string policy_flag = "idm_follow";
  double horizon = 120.0;
  simulate_cmd->add_option("--net", net_path, "Net file")->required();
  simulate_cmd->add_option("--routes", routes_path, "Route file")->required();
  simulate_cmd->add_option("--policy", policy_flag,
                           "AV policy: idm_follow or idm_with_lane_change");
  simulate_cmd->add_option("--horizon", horizon, "Simulated seconds");

  // evaluate ------------------------------------------------------------------
  auto* evaluate_cmd =
      app.add_subcommand("evaluate", "Simulate and score a generated batch");
  std::string dir_path;
  long baseline_seed = -1;
  evaluate_cmd->add_option("--dir", dir_path, "Batch output directory")->required();
  evaluate_cmd->add_option("--policy", policy_flag,
                           "AV policy: idm_follow or idm_with_lane_change");
  evaluate_cmd->add_option("--horizon", horizon, "Simulated seconds");
  evaluate_cmd->add_option(
      "--baseline-seed", baseline_seed,
      "Also score a seeded RandomTrip counterpart per scenario");

  // rag -------------------------------------------------------------------------
  auto* rag = app.add_subcommand("rag", "Manage the retrieval store");
  rag->require_subcommand(1);
  std::string rag_db, rag_id, rag_text, rag_tags;
  std::size_t rag_k = 3;
  auto* rag_add = rag->add_subcommand("add", "Add an entry from plain files");
  rag_add->add_option("--rag-db", rag_db, "Store file")->required();
  rag_add->add_option("--id", rag_id, "Entry id")->required();
  rag_add->add_option("--description", rag_text, "Entry description")->required();
  rag_add->add_option("--nodes", nodes_path, "Node file")->required();
  rag_add->add_option("--edges", edges_path, "Edge file")->required();
  rag_add->add_option("--tags", rag_tags, "Comma-separated tags");
  auto* rag_query = rag->add_subcommand("query", "Rank stored entries");
  rag_query->add_option("--rag-db", rag_db, "Store file")->required();
  rag_query->add_option("--text", rag_text, "Query text")->required();
  rag_query->add_option("-k,--top", rag_k, "Result count");
  auto* rag_ingest = rag->add_subcommand("ingest", "Ingest a net file");
  rag_ingest->add_option("--rag-db", rag_db, "Store file")->required();
  rag_ingest->add_option("--net", net_path, "Net file")->required();
  rag_ingest->add_option("--tags", rag_tags, "Comma-separated tags");

  // render ------------------------------------------------------------------------
  auto* render = app.add_subcommand("render", "Render a net to SVG");
  render->add_option("--net", net_path, "Net file")->required();
  render->add_option("--out", out_path, "Output SVG file")->required();

  // crash-report ---------------------------------------------------------------
  auto* crash = app.add_subcommand(
      "crash-report", "Reconstruct a scenario from a crash report");
  std::string report_path;
  crash->add_option("--report", report_path, "Crash report text file")->required();
  add_backend_flags(crash, backend_flags);
  crash->add_option("--out", run.out_dir, "Output directory")->required();
  crash->add_option("--max-attempts", run.max_attempts,
                    "Self-improvement attempt budget per stage");
  crash->add_option("--templates", run.template_dir, "Prompt template directory");

  // report -------------------------------------------------------------------------
  auto* report_cmd =
      app.add_subcommand("report", "Recompute batch reports from artifacts");
  report_cmd->add_option("--dir", dir_path, "Batch output directory")->required();

  std::vector<std::string> args;
  try {
    args = apply_config_file(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    // CLI11 consumes arguments in reverse order.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*generate) {
      if (!scene_flag.empty()) {
        const auto scene = sf::scene_type_from(scene_flag);
        if (!scene) {
          std::cerr << "unknown scene type: " << scene_flag << "\n";
          return kExitConfig;
        }
        run.scene = scene;
      }
      run.backend = to_backend_config(backend_flags);
      run.use_interpreter = !no_interpreter;
      run.use_feedback = !no_feedback;
      const sf::BatchSummary summary = sf::run_generate(run);
      for (const auto& outcome : summary.outcomes) {
        std::cout << fmt::format(
            "scenario_{}: {}{}\n", outcome.index,
            outcome.generated ? "generated" : "failed",
            outcome.generated
                ? fmt::format(" (net attempts {}, vehicle attempts {})",
                              outcome.net_attempts, outcome.vehicle_attempts)
                : "");
      }
      std::cout << sf::conformity_table(summary.conformity);
      return summary.exit_code;
    }
    if (*compile_cmd) {
      auto plan = sf::parse_plain(sf::read_file(nodes_path), sf::read_file(edges_path));
      if (!plan.ok()) return print_diags_and_fail(plan.diagnostics());
      auto compiled = sf::compile(plan.value());
      if (!compiled.ok()) return print_diags_and_fail(compiled.diagnostics());
      for (const std::string& warning : compiled.value().warnings) {
        std::cerr << "warning: " << warning << "\n";
      }
      sf::write_file(out_path, sf::serialize_net(compiled.value().network));
      std::cout << fmt::format("wrote {} ({})\n", out_path,
                               sf::scene_type_name(sf::classify_scene(
                                   compiled.value().network)));
      return kExitOk;
    }
    if (*route_cmd) {
      const sf::CompiledNetwork net = load_net_or_die(net_path);
      auto trips = sf::parse_trips(sf::read_file(trips_path));
      if (!trips.ok()) return print_diags_and_fail(trips.diagnostics());
      const sf::ExpandResult expanded = sf::expand_trips(net, trips.value());
      sf::write_file(out_path, sf::serialize_routes(expanded.routes));
      for (const auto& [trip, diag] : expanded.failures) {
        std::cerr << sf::to_string(diag) << "\n";
      }
      std::cout << fmt::format("wrote {} ({} route(s), {} failure(s))\n", out_path,
                               expanded.routes.size(), expanded.failures.size());
      return expanded.failures.empty() ? kExitOk : kExitFailure;
    }
    if (*randtrips) {
      const sf::CompiledNetwork net = load_net_or_die(net_path);
      trip_params.fringe_only = !all_edges;
      auto trips = sf::random_trips(net, trip_params);
      if (!trips.ok()) return print_diags_and_fail(trips.diagnostics());
      sf::write_file(out_path, sf::serialize_trips(trips.value()));
      std::cout << fmt::format("wrote {} ({} trip(s))\n", out_path,
                               trips.value().size());
      return kExitOk;
    }
    if (*simulate_cmd) {
      sf::Scenario scenario;
      scenario.network = load_net_or_die(net_path);
      auto routes = sf::parse_routes(sf::read_file(routes_path));
      if (!routes.ok()) return print_diags_and_fail(routes.diagnostics());
      scenario.routes = routes.value();
      for (const auto& route : scenario.routes) {
        if (route.kind == sf::VehicleKind::AV) scenario.av_id = route.vehicle_id;
      }
      if (scenario.av_id.empty()) {
        std::cerr << "route file declares no AV vehicle\n";
        return kExitConfig;
      }
      const sf::AvPolicy policy = policy_flag == "idm_with_lane_change"
                                      ? sf::AvPolicy::idm_with_lane_change
                                      : sf::AvPolicy::idm_follow;
      sf::SimConfig config;
      config.horizon = horizon;
      const sf::Trace trace = sf::simulate(scenario, config, policy);
      for (const auto& event : trace.events) {
        std::string ids;
        for (const auto& id : event.vehicle_ids) ids += " " + id;
        std::cout << fmt::format("t={:>7}s {}:{}\n", sf::format_fixed(event.time, 1),
                                 sf::sim_event_name(event.kind), ids);
      }
      const sf::DrivingScore score = sf::driving_score(trace, scenario, {}, config);
      std::cout << fmt::format(
          "route_completion={} driving_score={} total_score={} use_time={} "
          "success={}\n",
          sf::format_fixed(score.route_completion), sf::format_fixed(score.driving_score),
          sf::format_fixed(score.total_score), sf::format_fixed(score.use_time),
          score.success);
      return kExitOk;
    }
    if (*evaluate_cmd) {
      const sf::AvPolicy policy = policy_flag == "idm_with_lane_change"
                                      ? sf::AvPolicy::idm_with_lane_change
                                      : sf::AvPolicy::idm_follow;
      return cmd_evaluate(dir_path, policy, horizon, baseline_seed);
    }
    if (*rag_add) {
      sf::RagStore store = sf::RagStore::open(rag_db);
      sf::RagEntry entry;
      entry.id = rag_id;
      entry.description = rag_text;
      entry.node_text = sf::read_file(nodes_path);
      entry.edge_text = sf::read_file(edges_path);
      auto embedded = store.embedder().embed(entry.description);
      if (!embedded.ok()) return print_diags_and_fail(embedded.diagnostics());
      entry.embedding = embedded.value();
      if (!rag_tags.empty()) {
        for (auto& tag : sf::split(rag_tags, ',')) {
          entry.tags.push_back(sf::trim(tag));
        }
      }
      auto added = store.add_entry(entry);
      if (!added.ok()) return print_diags_and_fail(added.diagnostics());
      std::cout << fmt::format("added \"{}\" ({} entr{})\n", rag_id, store.size(),
                               store.size() == 1 ? "y" : "ies");
      return kExitOk;
    }
    if (*rag_query) {
      const sf::RagStore store = sf::RagStore::open(rag_db);
      auto hits = store.query(rag_text, rag_k);
      if (!hits.ok()) return print_diags_and_fail(hits.diagnostics());
      for (const auto& [entry, similarity] : hits.value()) {
        std::cout << fmt::format("{}  {}\n", sf::format_fixed(similarity, 4),
                                 entry.id);
      }
      return kExitOk;
    }
    if (*rag_ingest) {
      sf::RagStore store = sf::RagStore::open(rag_db);
      std::vector<std::string> tags;
      if (!rag_tags.empty()) {
        for (auto& tag : sf::split(rag_tags, ',')) tags.push_back(sf::trim(tag));
      }
      auto id = store.ingest_net(sf::read_file(net_path), tags);
      if (!id.ok()) return print_diags_and_fail(id.diagnostics());
      std::cout << fmt::format("ingested as \"{}\"\n", id.value());
      return kExitOk;
    }
    if (*render) {
      const sf::CompiledNetwork net = load_net_or_die(net_path);
      sf::render_svg_file(net, out_path);
      std::cout << fmt::format("wrote {}\n", out_path);
      return kExitOk;
    }
    if (*crash) {
      run.backend = to_backend_config(backend_flags);
      const std::string text = sf::read_file(report_path);
      if (sf::trim(text).empty()) {
        std::cerr << "crash report file is empty\n";
        return kExitConfig;
      }
      const sf::BatchSummary summary = sf::run_crash_report(run, text);
      std::cout << (summary.outcomes.front().generated
                        ? "scenario reconstructed\n"
                        : "reconstruction failed\n");
      return summary.exit_code;
    }
    if (*report_cmd) {
      return cmd_report(dir_path);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitConfig;
}
