#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scenoforge/llm.hpp"
#include "scenoforge/metrics.hpp"
#include "scenoforge/rag.hpp"
#include "scenoforge/sim.hpp"

namespace scenoforge {

struct RunConfig {
  std::string request;
  int count = 1;
  std::optional<SceneType> scene;  // hint used by conformity scoring
  BackendConfig backend;
  bool use_rag = false;
  std::string rag_db;
  std::uint64_t seed = 0;
  int max_attempts = 3;
  std::string out_dir;
  int jobs = 1;
  // Ablation switches: skip the interpreter stage (the raw request goes
  // straight to the generators) or run the repair loop blind (retries
  // without diagnostic feedback).
  bool use_interpreter = true;
  bool use_feedback = true;
  std::string template_dir;  // empty selects default_template_dir()
};

struct ScenarioOutcome {
  int index = 0;
  bool generated = false;
  bool single_pass = false;
  int net_attempts = 0;
  int vehicle_attempts = 0;
  std::optional<ScenarioDescription> description;
  std::optional<Scenario> scenario;
  std::optional<Verdict> verdict;
  std::string failure;           // nonempty when !generated
  std::string injected_example;  // RAG entry id injected into the prompt
  std::string attempts_log;
  std::string dir;               // scenario output directory
};

struct BatchSummary {
  std::vector<ScenarioOutcome> outcomes;
  ConformityReport conformity;
  std::optional<DiversityStats> diversity;
  int exit_code = 1;  // 0 when at least one scenario generated
};

// The full request-to-scenarios pipeline: interpret, optional retrieval,
// network generation inside the repair loop, vehicle generation inside the
// repair loop, evaluation with one feedback-driven regeneration. Writes the
// per-scenario directories and the batch reports under config.out_dir.
BatchSummary run_generate(const RunConfig& config);

// Crash-report reconstruction: the report text replaces the interpreter's
// description for both generators; the expected vehicle count is inferred
// from the report's "Vehicle N" enumeration.
BatchSummary run_crash_report(const RunConfig& config,
                              const std::string& report_text);

// Evaluation digest handed to the LLM evaluator (scene type, routes, depart
// times), capped at 2000 characters.
std::string scenario_digest(const Scenario& scenario);

// Count of distinct "Vehicle <n>" mentions.
std::optional<int> infer_vehicle_count(const std::string& report_text);

}  // namespace scenoforge
