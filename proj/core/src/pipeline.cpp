#include "scenoforge/pipeline.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <future>
#include <regex>
#include <set>

#include "json.hpp"
#include "scenoforge/net_compiler.hpp"
#include "scenoforge/route_planner.hpp"
#include "scenoforge/svg.hpp"
#include "scenoforge/util.hpp"

namespace scenoforge {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct StageBackends {
  ChatBackend interpreter;
  ChatBackend net_generator;
  ChatBackend vehicle_generator;
  ChatBackend evaluator;

  explicit StageBackends(const BackendConfig& config)
      : interpreter(config, "interpreter"),
        net_generator(config, "net_generator"),
        vehicle_generator(config, "vehicle_generator"),
        evaluator(config, "evaluator") {}
};

std::string diag_lines(const Diagnostics& diags) {
  std::string out;
  for (const Diagnostic& diag : diags) {
    out += fmt::format("    - {}\n", to_string(diag));
  }
  return out;
}

void log_repair(std::string& log, const std::string& stage,
                const std::vector<AttemptRecord>& records, bool succeeded) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const AttemptRecord& record = records[i];
    const bool last = i + 1 == records.size();
    const bool ok = succeeded && last;
    log += fmt::format("[{}] attempt {}{}: {} (response digest {})\n", stage, i + 1,
                       record.feedback_used.empty() ? "" : " (with feedback)",
                       ok ? "OK" : "FAILED",
                       record.response_digest.empty() ? "n/a"
                                                      : record.response_digest);
    log += diag_lines(record.diagnostics);
  }
}

struct PipelineContext {
  const RunConfig& config;
  const TemplateSet& templates;
  RagStore* rag = nullptr;
};

ScenarioOutcome run_scenario(const PipelineContext& ctx, StageBackends& backends,
                             int index, const std::string& description_override,
                             std::optional<int> vehicle_count_override,
                             bool run_evaluator) {
  const RunConfig& config = ctx.config;
  ScenarioOutcome outcome;
  outcome.index = index;
  std::string& log = outcome.attempts_log;

  // 1. Interpreter (or the raw request / crash report in bypass modes).
  std::string description_text;
  std::optional<int> expected_vehicles = vehicle_count_override;
  if (!description_override.empty()) {
    description_text = description_override;
    log += "[interpreter] bypassed; using the raw request text\n";
  } else {
    auto descriptions = interpret(backends.interpreter, ctx.templates,
                                  config.request, 1);
    if (!descriptions.ok()) {
      outcome.failure = fmt::format("interpreter output rejected:\n{}",
                                    diag_lines(descriptions.diagnostics()));
      log += "[interpreter] FAILED\n" + diag_lines(descriptions.diagnostics());
      return outcome;
    }
    outcome.description = std::move(descriptions.value().front());
    description_text = outcome.description->narrative;
    expected_vehicles = outcome.description->footer.vehicle_count;
    log += fmt::format("[interpreter] OK (scene_type {}, vehicles {})\n",
                       scene_type_name(outcome.description->footer.scene_type),
                       outcome.description->footer.vehicle_count);
  }

  // 2. Retrieval-augmented example.
  std::vector<RagExample> rag_examples;
  if (config.use_rag && ctx.rag && ctx.rag->size() > 0) {
    auto hits = ctx.rag->query(description_text, 1);
    if (hits.ok() && !hits.value().empty()) {
      const auto& [entry, similarity] = hits.value().front();
      rag_examples.push_back(
          {entry.id, entry.description, entry.node_text, entry.edge_text});
      outcome.injected_example = entry.id;
      log += fmt::format("[rag] injected example \"{}\" (similarity {})\n",
                         entry.id, format_fixed(similarity, 4));
    } else {
      log += "[rag] no usable example retrieved\n";
    }
  }

  // 3. Network generation inside the self-improvement loop.
  RepairConfig repair{config.max_attempts};
  std::optional<CompileResult> compiled;
  auto net_outcome = repair_loop<NetworkPlan>(
      [&](const std::optional<std::string>& feedback) {
        Attempt<NetworkPlan> attempt;
        std::string raw;
        auto plan = generate_net(backends.net_generator, ctx.templates,
                                 description_text, rag_examples,
                                 config.use_feedback ? feedback : std::nullopt,
                                 &raw);
        attempt.response_digest = hex_digest(raw);
        if (plan.ok()) {
          attempt.value = std::move(plan.value());
        } else {
          attempt.diagnostics = plan.diagnostics();
        }
        return attempt;
      },
      [&](const NetworkPlan& plan) {
        auto result = compile(plan);
        if (!result.ok()) return result.diagnostics();
        compiled = std::move(result.value());
        return Diagnostics{};
      },
      repair);
  outcome.net_attempts = static_cast<int>(net_outcome.log.size());
  log_repair(log, "net_generator", net_outcome.log, net_outcome.ok());
  if (!net_outcome.ok()) {
    outcome.failure = "network generation exhausted its attempts";
    return outcome;
  }
  const NetworkPlan& plan = *net_outcome.result;
  const CompiledNetwork& network = compiled->network;
  for (const std::string& warning : compiled->warnings) {
    log += fmt::format("[net_compiler] warning: {}\n", warning);
  }

  // 4. Vehicle generation inside the self-improvement loop.
  const std::string net_summary = summarize_network(network);
  std::vector<Route> routes;
  auto vehicle_outcome = repair_loop<std::vector<Trip>>(
      [&](const std::optional<std::string>& feedback) {
        Attempt<std::vector<Trip>> attempt;
        std::string raw;
        auto trips = generate_vehicles(backends.vehicle_generator, ctx.templates,
                                       description_text, net_summary,
                                       expected_vehicles,
                                       config.use_feedback ? feedback : std::nullopt,
                                       &raw);
        attempt.response_digest = hex_digest(raw);
        if (trips.ok()) {
          attempt.value = std::move(trips.value());
        } else {
          attempt.diagnostics = trips.diagnostics();
        }
        return attempt;
      },
      [&](const std::vector<Trip>& trips) {
        ExpandResult expanded = expand_trips(network, trips);
        Diagnostics diags;
        for (const auto& [trip, diag] : expanded.failures) {
          diags.push_back(diag);
        }
        if (diags.empty()) routes = std::move(expanded.routes);
        return diags;
      },
      repair);
  outcome.vehicle_attempts = static_cast<int>(vehicle_outcome.log.size());
  log_repair(log, "vehicle_generator", vehicle_outcome.log, vehicle_outcome.ok());
  if (!vehicle_outcome.ok()) {
    outcome.failure = "vehicle generation exhausted its attempts";
    return outcome;
  }
  std::vector<Trip> trips = std::move(*vehicle_outcome.result);

  Scenario scenario;
  scenario.network = network;
  scenario.routes = routes;
  scenario.request = config.request;
  scenario.description = outcome.description;
  for (const Trip& trip : trips) {
    if (trip.kind == VehicleKind::AV) scenario.av_id = trip.vehicle_id;
  }

  // 5. Evaluation, with one feedback-driven vehicle regeneration on FAIL.
  if (run_evaluator) {
    auto verdict = evaluate_scenario(backends.evaluator, ctx.templates,
                                     scenario_digest(scenario), config.request);
    if (!verdict.ok()) {
      log += "[evaluator] FAILED\n" + diag_lines(verdict.diagnostics());
    } else {
      outcome.verdict = verdict.value();
      log += fmt::format("[evaluator] verdict: {}\n",
                         verdict.value().passed ? "PASS" : "FAIL");
      if (!verdict.value().passed &&
          outcome.vehicle_attempts < config.max_attempts) {
        log += "[vehicle_generator] regenerating with the evaluator's reasoning\n";
        std::string raw;
        auto retry = generate_vehicles(
            backends.vehicle_generator, ctx.templates, description_text,
            net_summary, expected_vehicles,
            config.use_feedback
                ? std::optional<std::string>(verdict.value().reasoning)
                : std::nullopt,
            &raw);
        outcome.vehicle_attempts += 1;
        if (retry.ok()) {
          ExpandResult expanded = expand_trips(network, retry.value());
          if (expanded.failures.empty()) {
            trips = std::move(retry.value());
            scenario.routes = std::move(expanded.routes);
            scenario.av_id.clear();
            for (const Trip& trip : trips) {
              if (trip.kind == VehicleKind::AV) scenario.av_id = trip.vehicle_id;
            }
            auto second = evaluate_scenario(backends.evaluator, ctx.templates,
                                            scenario_digest(scenario),
                                            config.request);
            if (second.ok()) {
              outcome.verdict = second.value();
              log += fmt::format("[evaluator] verdict after regeneration: {}\n",
                                 second.value().passed ? "PASS" : "FAIL");
            }
          } else {
            log += "[vehicle_generator] regeneration produced unroutable trips; "
                   "keeping the previous set\n";
          }
        } else {
          log += "[vehicle_generator] regeneration rejected:\n" +
                 diag_lines(retry.diagnostics());
        }
      }
    }
  }

  outcome.generated = true;
  outcome.single_pass = outcome.net_attempts == 1 && outcome.vehicle_attempts == 1;
  outcome.scenario = std::move(scenario);

  // 6. Artifacts.
  const fs::path dir = fs::path(config.out_dir) / fmt::format("scenario_{}", index);
  fs::create_directories(dir);
  outcome.dir = dir.string();
  const auto [node_text, edge_text] = serialize_plain(plan);
  write_file((dir / "description.txt").string(), description_text);
  write_file((dir / "nodes.nod.xml").string(), node_text);
  write_file((dir / "edges.edg.xml").string(), edge_text);
  write_file((dir / "net.net.xml").string(), serialize_net(network));
  write_file((dir / "trips.trips.xml").string(), serialize_trips(trips));
  write_file((dir / "routes.rou.xml").string(),
             serialize_routes(outcome.scenario->routes));
  write_file((dir / "scenario.sumocfg").string(),
             serialize_sumocfg("net.net.xml", "routes.rou.xml"));
  render_svg_file(network, (dir / "render.svg").string());
  std::string verdict_text = "NOT EVALUATED\n";
  if (outcome.verdict) {
    verdict_text = fmt::format("{}\n{}\n", outcome.verdict->passed ? "PASS" : "FAIL",
                               outcome.verdict->reasoning);
  }
  write_file((dir / "verdict.txt").string(), verdict_text);
  return outcome;
}

void write_failed_scenario_dir(const RunConfig& config, ScenarioOutcome& outcome) {
  const fs::path dir =
      fs::path(config.out_dir) / fmt::format("scenario_{}", outcome.index);
  fs::create_directories(dir);
  outcome.dir = dir.string();
  write_file((dir / "attempts.log").string(), outcome.attempts_log);
}

BatchSummary finalize_batch(const RunConfig& config,
                            std::vector<ScenarioOutcome> outcomes) {
  BatchSummary summary;
  summary.outcomes = std::move(outcomes);

  std::vector<ConformityInput> batch;
  std::vector<Scenario> generated;
  for (ScenarioOutcome& outcome : summary.outcomes) {
    // attempts.log is written last so evaluation notes are included.
    if (!outcome.dir.empty()) {
      write_file((fs::path(outcome.dir) / "attempts.log").string(),
                 outcome.attempts_log);
    }
    ConformityInput input;
    input.request = config.request;
    input.requested_scene = config.scene;
    input.generated = outcome.generated;
    input.single_pass = outcome.single_pass;
    input.attempts_used = std::max(outcome.net_attempts, outcome.vehicle_attempts);
    input.description = outcome.description;
    input.scenario = outcome.scenario;
    batch.push_back(std::move(input));
    if (outcome.generated && outcome.scenario) {
      generated.push_back(*outcome.scenario);
    }
  }
  summary.conformity = conformity_report(batch);
  if (!generated.empty()) summary.diversity = diversity_stats(generated);
  summary.exit_code = generated.empty() ? 1 : 0;

  // Batch reports: machine-readable plus the plain-text tables.
  ordered_json report;
  report["request"] = config.request;
  report["count"] = config.count;
  report["conformity"] = {
      {"scene_type_accuracy", summary.conformity.scene_type_accuracy},
      {"lanes_accuracy", summary.conformity.lanes_accuracy},
      {"vehicles_accuracy", summary.conformity.vehicles_accuracy},
      {"success_rate", summary.conformity.success_rate},
      {"success_rate_with_repair", summary.conformity.success_rate_with_repair},
  };
  if (summary.diversity) {
    auto entry = [](const MeanStd& value) {
      return ordered_json{{"mean", value.mean}, {"std", value.stddev}};
    };
    report["diversity"] = {{"lanes", entry(summary.diversity->lanes)},
                           {"edges", entry(summary.diversity->edges)},
                           {"route_length", entry(summary.diversity->route_length)},
                           {"vehicles", entry(summary.diversity->vehicles)}};
  }
  report["scenarios"] = ordered_json::array();
  for (const ScenarioOutcome& outcome : summary.outcomes) {
    ordered_json row;
    row["index"] = outcome.index;
    row["generated"] = outcome.generated;
    row["single_pass"] = outcome.single_pass;
    row["net_attempts"] = outcome.net_attempts;
    row["vehicle_attempts"] = outcome.vehicle_attempts;
    if (outcome.scenario) {
      row["scene_type"] =
          std::string(scene_type_name(classify_scene(outcome.scenario->network)));
      row["vehicles"] = outcome.scenario->routes.size();
    }
    if (!outcome.injected_example.empty()) {
      row["rag_example"] = outcome.injected_example;
    }
    if (outcome.verdict) {
      row["verdict"] = outcome.verdict->passed ? "PASS" : "FAIL";
    }
    if (!outcome.failure.empty()) row["failure"] = outcome.failure;
    report["scenarios"].push_back(std::move(row));
  }
  fs::create_directories(config.out_dir);
  write_file((fs::path(config.out_dir) / "report.json").string(),
             report.dump(2) + "\n");

  std::string tables = conformity_table(summary.conformity);
  if (summary.diversity) {
    tables += "\n" + diversity_table(*summary.diversity);
  }
  write_file((fs::path(config.out_dir) / "report.txt").string(), tables);
  return summary;
}

}  // namespace

std::string scenario_digest(const Scenario& scenario) {
  std::string digest = fmt::format(
      "scene type: {}; AV: {}; {} vehicle(s)\n",
      scene_type_name(classify_scene(scenario.network)), scenario.av_id,
      scenario.routes.size());
  for (const Route& route : scenario.routes) {
    std::string edges;
    for (std::size_t i = 0; i < route.edges.size(); ++i) {
      if (i) edges += " ";
      edges += route.edges[i];
    }
    digest += fmt::format("{} ({}): departs {} s, route {}\n", route.vehicle_id,
                          vehicle_kind_name(route.kind),
                          format_fixed(route.depart_time), edges);
  }
  if (digest.size() > 2000) digest.resize(2000);
  return digest;
}

std::optional<int> infer_vehicle_count(const std::string& report_text) {
  static const std::regex pattern("[Vv]ehicle\\s+([0-9]+)");
  std::set<std::string> numbers;
  for (std::sregex_iterator it(report_text.begin(), report_text.end(), pattern), end;
       it != end; ++it) {
    numbers.insert((*it)[1].str());
  }
  if (numbers.empty()) return std::nullopt;
  return static_cast<int>(numbers.size());
}

BatchSummary run_generate(const RunConfig& config) {
  if (config.count < 1) throw std::invalid_argument("count must be >= 1");
  if (config.max_attempts < 1) {
    throw std::invalid_argument("max_attempts must be >= 1");
  }
  if (config.out_dir.empty()) throw std::invalid_argument("out_dir is required");
  const std::string template_dir =
      config.template_dir.empty() ? default_template_dir() : config.template_dir;
  const TemplateSet templates = TemplateSet::load_dir(template_dir);

  std::optional<RagStore> rag;
  if (config.use_rag) {
    rag = RagStore::open(config.rag_db);
  }
  PipelineContext ctx{config, templates, rag ? &*rag : nullptr};
  std::filesystem::create_directories(config.out_dir);

  std::vector<ScenarioOutcome> outcomes(static_cast<std::size_t>(config.count));
  const bool parallel = config.jobs > 1 && config.backend.mode == BackendMode::http;
  if (parallel) {
    // Live HTTP pipelines are independent; transcript-backed modes must stay
    // sequential because stage files are consumed in order.
    std::vector<std::future<ScenarioOutcome>> futures;
    for (int i = 0; i < config.count; ++i) {
      futures.push_back(std::async(std::launch::async, [&, i] {
        StageBackends backends(config.backend);
        const std::string override_text =
            config.use_interpreter ? "" : config.request;
        return run_scenario(ctx, backends, i, override_text, std::nullopt, true);
      }));
    }
    for (int i = 0; i < config.count; ++i) outcomes[i] = futures[i].get();
  } else {
    StageBackends backends(config.backend);
    for (int i = 0; i < config.count; ++i) {
      std::string override_text;
      if (!config.use_interpreter) override_text = config.request;
      outcomes[i] =
          run_scenario(ctx, backends, i, override_text, std::nullopt, true);
    }
  }
  for (ScenarioOutcome& outcome : outcomes) {
    if (!outcome.generated && outcome.dir.empty()) {
      write_failed_scenario_dir(config, outcome);
    }
  }
  return finalize_batch(config, outcomes);
}

BatchSummary run_crash_report(const RunConfig& config,
                              const std::string& report_text) {
  if (trim(report_text).empty()) {
    throw std::invalid_argument("crash report text is empty");
  }
  if (config.out_dir.empty()) throw std::invalid_argument("out_dir is required");
  const std::string template_dir =
      config.template_dir.empty() ? default_template_dir() : config.template_dir;
  const TemplateSet templates = TemplateSet::load_dir(template_dir);
  PipelineContext ctx{config, templates, nullptr};
  std::filesystem::create_directories(config.out_dir);

  StageBackends backends(config.backend);
  std::vector<ScenarioOutcome> outcomes;
  outcomes.push_back(run_scenario(ctx, backends, 0, report_text,
                                  infer_vehicle_count(report_text),
                                  /*run_evaluator=*/false));
  if (!outcomes.front().generated && outcomes.front().dir.empty()) {
    write_failed_scenario_dir(config, outcomes.front());
  }
  return finalize_batch(config, outcomes);
}

}  // namespace scenoforge
