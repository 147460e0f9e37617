#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scenoforge/sim.hpp"

namespace scenoforge {

struct ScoreWeights {
  double w_comfort = 0.2;
  double w_efficiency = 0.3;
  double w_safety = 0.5;
};

struct DrivingScore {
  double comfort = 0.0;        // [0, 1]
  double efficiency = 0.0;     // [0, 1]
  double safety = 0.0;         // [0, 1]
  double driving_score = 0.0;  // [0, 100]
  double route_completion = 0.0;
  double total_score = 0.0;    // route_completion * driving_score
  bool success = false;
  double use_time = 0.0;       // s of simulated time
};

// Fraction of the preset AV route actually traversed, in [0, 1].
double route_completion(const Trace& trace, const Scenario& scenario);

// Comfort: fraction of steps with |accel| <= 3 and |jerk| <= 5.
// Efficiency: mean speed over limit. Safety: floor of observed TTC over 3 s,
// zero on collision. Weighted into [0, 100].
DrivingScore driving_score(const Trace& trace, const Scenario& scenario,
                           const ScoreWeights& weights = ScoreWeights{},
                           const SimConfig& config = SimConfig{});

// One attempted generation, as the conformity report consumes it.
struct ConformityInput {
  std::string request;
  std::optional<SceneType> requested_scene;
  bool generated = false;    // usable scenario produced (any attempt count)
  bool single_pass = false;  // no repair-loop retries were needed
  int attempts_used = 1;
  std::optional<ScenarioDescription> description;
  std::optional<Scenario> scenario;
};

struct ScenarioConformity {
  std::optional<bool> scene_type_ok;
  std::optional<bool> lanes_ok;
  std::optional<bool> vehicles_ok;
  bool generated = false;
  bool single_pass = false;
  int attempts_used = 1;
};

struct ConformityReport {
  double scene_type_accuracy = 0.0;
  double lanes_accuracy = 0.0;
  double vehicles_accuracy = 0.0;
  double success_rate = 0.0;              // strict single-pass rule
  double success_rate_with_repair = 0.0;  // any attempt within the budget
  std::vector<ScenarioConformity> breakdown;
};

ConformityReport conformity_report(const std::vector<ConformityInput>& batch);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

struct DiversityStats {
  MeanStd lanes;
  MeanStd edges;
  MeanStd route_length;
  MeanStd vehicles;
};

DiversityStats diversity_stats(const std::vector<Scenario>& scenarios);

// Challenge aggregation over per-scenario driving scores (Table-style rows:
// route completion, driving score, total score, use time, success rate).
struct ChallengeStats {
  MeanStd route_completion;
  MeanStd driving_score;
  MeanStd total_score;
  MeanStd use_time;
  MeanStd success_rate;
};

ChallengeStats challenge_stats(const std::vector<DrivingScore>& scores);

// Plain-text tables for reports.
std::string conformity_table(const ConformityReport& report);
std::string diversity_table(const DiversityStats& stats);
std::string challenge_table(const ChallengeStats& ours,
                            const std::optional<ChallengeStats>& baseline = {});

}  // namespace scenoforge
