#include "scenoforge/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "scenoforge/net_compiler.hpp"
#include "scenoforge/route_planner.hpp"
#include "scenoforge/util.hpp"

namespace scenoforge {

namespace {

double clamp01(double value) { return std::clamp(value, 0.0, 1.0); }

const VehicleState* find_state(const TraceStep& step, const std::string& id) {
  for (const VehicleState& state : step.states) {
    if (state.id == id) return &state;
  }
  return nullptr;
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return out;
}

double ratio(long hits, long total) {
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

// Gap and closing speed to the AV's current leader, recomputed from a trace
// step with the same path rules the simulator applies.
struct LeaderView {
  double gap = 0.0;
  double closing = 0.0;
};

std::optional<LeaderView> leader_of(const TraceStep& step, const VehicleState& self,
                                    const Scenario& scenario,
                                    const SimConfig& config) {
  std::optional<LeaderView> best;
  auto consider = [&](double gap, double speed) {
    if (!best || gap < best->gap) best = LeaderView{gap, self.speed - speed};
  };
  for (const VehicleState& other : step.states) {
    if (other.id == self.id) continue;
    if (other.edge == self.edge && other.lane_index == self.lane_index &&
        other.offset > self.offset) {
      consider(other.offset - config.idm.veh_length - self.offset, other.speed);
    }
  }
  if (best) return best;
  const Route* route = scenario.av_route();
  if (!route || self.route_index + 1 >= static_cast<int>(route->edges.size())) {
    return std::nullopt;
  }
  const std::string& next = route->edges[self.route_index + 1];
  const CompiledEdge* current = scenario.network.find_edge(self.edge);
  if (!current || self.lane_index >= static_cast<int>(current->lanes.size())) {
    return std::nullopt;
  }
  const double remaining =
      current->lanes[self.lane_index].length - self.offset;
  for (const VehicleState& other : step.states) {
    if (other.id == self.id || other.edge != next) continue;
    consider(remaining + other.offset - config.idm.veh_length, other.speed);
  }
  return best;
}

}  // namespace

double route_completion(const Trace& trace, const Scenario& scenario) {
  const Route* route = scenario.av_route();
  if (!route) return 0.0;
  if (trace.event_time(SimEventKind::arrive, scenario.av_id)) return 1.0;

  auto total = route_length(scenario.network, *route);
  if (!total.ok() || total.value() <= 0.0) return 0.0;

  // Furthest progress the AV reached along its preset route.
  double traversed = 0.0;
  std::vector<double> edge_lengths;
  for (const std::string& edge_id : route->edges) {
    const CompiledEdge* edge = scenario.network.find_edge(edge_id);
    edge_lengths.push_back(edge ? edge->mean_lane_length() : 0.0);
  }
  for (const TraceStep& step : trace.steps) {
    const VehicleState* state = find_state(step, scenario.av_id);
    if (!state) continue;
    double progress = 0.0;
    for (int i = 0; i < state->route_index &&
                    i < static_cast<int>(edge_lengths.size());
         ++i) {
      progress += edge_lengths[i];
    }
    if (state->route_index < static_cast<int>(edge_lengths.size())) {
      progress += std::min(state->offset, edge_lengths[state->route_index]);
    }
    traversed = std::max(traversed, progress);
  }
  return clamp01(traversed / total.value());
}

DrivingScore driving_score(const Trace& trace, const Scenario& scenario,
                           const ScoreWeights& weights, const SimConfig& config) {
  if (weights.w_comfort < 0.0 || weights.w_efficiency < 0.0 ||
      weights.w_safety < 0.0 ||
      std::abs(weights.w_comfort + weights.w_efficiency + weights.w_safety -
               1.0) > 1e-9) {
    throw std::invalid_argument("score weights must be nonnegative and sum to 1");
  }
  DrivingScore score;
  score.route_completion = route_completion(trace, scenario);

  const bool collided =
      trace.event_time(SimEventKind::collision, scenario.av_id).has_value();
  const auto depart = trace.event_time(SimEventKind::depart, scenario.av_id);
  const auto arrive = trace.event_time(SimEventKind::arrive, scenario.av_id);
  const double horizon =
      trace.steps.empty() ? config.horizon : trace.steps.back().time;

  long active_steps = 0;
  long comfortable_steps = 0;
  double efficiency_sum = 0.0;
  double min_ttc = std::numeric_limits<double>::infinity();
  double previous_accel = 0.0;
  bool have_previous = false;
  for (const TraceStep& step : trace.steps) {
    const VehicleState* state = find_state(step, scenario.av_id);
    if (!state || !state->active) continue;
    ++active_steps;
    const double jerk =
        have_previous ? (state->accel - previous_accel) / config.dt : 0.0;
    previous_accel = state->accel;
    have_previous = true;
    if (std::abs(state->accel) <= 3.0 && std::abs(jerk) <= 5.0) {
      ++comfortable_steps;
    }
    const CompiledEdge* edge = scenario.network.find_edge(state->edge);
    const double limit =
        edge && state->lane_index < static_cast<int>(edge->lanes.size())
            ? edge->lanes[state->lane_index].speed
            : 1.0;
    efficiency_sum += clamp01(state->speed / std::max(limit, 0.01));
    const auto leader = leader_of(step, *state, scenario, config);
    if (leader && leader->closing > 0.0 && leader->gap > 0.0) {
      min_ttc = std::min(min_ttc, leader->gap / leader->closing);
    }
  }

  score.comfort = active_steps == 0
                      ? 0.0
                      : static_cast<double>(comfortable_steps) /
                            static_cast<double>(active_steps);
  score.efficiency =
      active_steps == 0 ? 0.0 : efficiency_sum / static_cast<double>(active_steps);
  if (collided) {
    score.safety = 0.0;
  } else if (std::isinf(min_ttc)) {
    score.safety = 1.0;
  } else {
    score.safety = clamp01(min_ttc / 3.0);
  }
  score.driving_score = 100.0 * (weights.w_comfort * score.comfort +
                                 weights.w_efficiency * score.efficiency +
                                 weights.w_safety * score.safety);
  score.total_score = score.route_completion * score.driving_score;
  score.success = arrive.has_value() && !collided;
  score.use_time = (depart && arrive) ? (*arrive - *depart) : horizon;
  return score;
}

ConformityReport conformity_report(const std::vector<ConformityInput>& batch) {
  ConformityReport report;
  long attempted = 0;
  long single_pass = 0;
  long generated = 0;
  long scene_total = 0;
  long scene_ok = 0;
  long lanes_total = 0;
  long lanes_ok = 0;
  long vehicles_total = 0;
  long vehicles_ok = 0;

  for (const ConformityInput& input : batch) {
    ++attempted;
    ScenarioConformity row;
    row.generated = input.generated;
    row.single_pass = input.generated && input.single_pass;
    row.attempts_used = input.attempts_used;
    if (row.single_pass) ++single_pass;
    if (input.generated) ++generated;

    if (input.generated && input.scenario) {
      const Scenario& scenario = *input.scenario;
      std::optional<SceneType> target = input.requested_scene;
      if (!target && input.description) {
        target = input.description->footer.scene_type;
      }
      if (target) {
        const bool ok = classify_scene(scenario.network) == *target;
        row.scene_type_ok = ok;
        ++scene_total;
        if (ok) ++scene_ok;
      }
      if (input.description) {
        bool all_named_ok = true;
        for (const auto& [road, lanes] : input.description->footer.lanes_by_road) {
          bool matched = false;
          for (const CompiledEdge& edge : scenario.network.edges) {
            if (edge.name == road &&
                static_cast<int>(edge.lanes.size()) == lanes) {
              matched = true;
              break;
            }
          }
          if (!matched) all_named_ok = false;
        }
        row.lanes_ok = all_named_ok;
        ++lanes_total;
        if (all_named_ok) ++lanes_ok;

        const bool count_ok =
            static_cast<int>(scenario.routes.size()) ==
            input.description->footer.vehicle_count;
        row.vehicles_ok = count_ok;
        ++vehicles_total;
        if (count_ok) ++vehicles_ok;
      }
    }
    report.breakdown.push_back(row);
  }

  report.success_rate = ratio(single_pass, attempted);
  report.success_rate_with_repair = ratio(generated, attempted);
  report.scene_type_accuracy = ratio(scene_ok, scene_total);
  report.lanes_accuracy = ratio(lanes_ok, lanes_total);
  report.vehicles_accuracy = ratio(vehicles_ok, vehicles_total);
  return report;
}

DiversityStats diversity_stats(const std::vector<Scenario>& scenarios) {
  std::vector<double> lanes;
  std::vector<double> edges;
  std::vector<double> lengths;
  std::vector<double> vehicles;
  for (const Scenario& scenario : scenarios) {
    const NetworkStats stats = network_stats(scenario.network);
    lanes.push_back(static_cast<double>(stats.total_lanes));
    edges.push_back(static_cast<double>(stats.total_edges));
    double length_sum = 0.0;
    long counted = 0;
    for (const Route& route : scenario.routes) {
      const auto length = route_length(scenario.network, route);
      if (length.ok()) {
        length_sum += length.value();
        ++counted;
      }
    }
    lengths.push_back(counted == 0 ? 0.0 : length_sum / static_cast<double>(counted));
    vehicles.push_back(static_cast<double>(scenario.routes.size()));
  }
  DiversityStats stats;
  stats.lanes = mean_std(lanes);
  stats.edges = mean_std(edges);
  stats.route_length = mean_std(lengths);
  stats.vehicles = mean_std(vehicles);
  return stats;
}

ChallengeStats challenge_stats(const std::vector<DrivingScore>& scores) {
  std::vector<double> completion;
  std::vector<double> driving;
  std::vector<double> total;
  std::vector<double> use_time;
  std::vector<double> success;
  for (const DrivingScore& score : scores) {
    completion.push_back(score.route_completion);
    driving.push_back(score.driving_score);
    total.push_back(score.total_score);
    use_time.push_back(score.use_time);
    success.push_back(score.success ? 1.0 : 0.0);
  }
  ChallengeStats stats;
  stats.route_completion = mean_std(completion);
  stats.driving_score = mean_std(driving);
  stats.total_score = mean_std(total);
  stats.use_time = mean_std(use_time);
  stats.success_rate = mean_std(success);
  return stats;
}

namespace {

std::string ms(const MeanStd& value) {
  return fmt::format("{} +/- {}", format_fixed(value.mean), format_fixed(value.stddev));
}

}  // namespace

std::string conformity_table(const ConformityReport& report) {
  std::string out;
  out += "Conformity of command\n";
  out += "---------------------------------\n";
  out += fmt::format("{:<24} {:>8}\n", "Accuracy", "Value");
  out += fmt::format("{:<24} {:>8}\n", "Scene Type",
                     format_fixed(report.scene_type_accuracy));
  out += fmt::format("{:<24} {:>8}\n", "Number of lanes",
                     format_fixed(report.lanes_accuracy));
  out += fmt::format("{:<24} {:>8}\n", "Number of vehicles",
                     format_fixed(report.vehicles_accuracy));
  out += fmt::format("{:<24} {:>8}\n", "Success rate",
                     format_fixed(report.success_rate));
  out += fmt::format("{:<24} {:>8}\n", "Success rate (repaired)",
                     format_fixed(report.success_rate_with_repair));
  return out;
}

std::string diversity_table(const DiversityStats& stats) {
  std::string out;
  out += "Diversity of generated scenarios\n";
  out += "---------------------------------\n";
  out += fmt::format("{:<24} {:>20}\n", "Metric", "Mean +/- Std");
  out += fmt::format("{:<24} {:>20}\n", "#Lanes", ms(stats.lanes));
  out += fmt::format("{:<24} {:>20}\n", "#Edges", ms(stats.edges));
  out += fmt::format("{:<24} {:>20}\n", "Route Length", ms(stats.route_length));
  out += fmt::format("{:<24} {:>20}\n", "#Vehicles", ms(stats.vehicles));
  return out;
}

std::string challenge_table(const ChallengeStats& ours,
                            const std::optional<ChallengeStats>& baseline) {
  std::string out;
  out += "Challenge metrics\n";
  out += "---------------------------------\n";
  if (baseline) {
    out += fmt::format("{:<20} {:>20} {:>20}\n", "Metric", "Ours", "RandomTrip");
    auto row = [&](const char* name, const MeanStd& a, const MeanStd& b) {
      out += fmt::format("{:<20} {:>20} {:>20}\n", name, ms(a), ms(b));
    };
    row("Route completion", ours.route_completion, baseline->route_completion);
    row("Driving score", ours.driving_score, baseline->driving_score);
    row("Total score", ours.total_score, baseline->total_score);
    row("Use Time (s)", ours.use_time, baseline->use_time);
    row("Success rate", ours.success_rate, baseline->success_rate);
  } else {
    out += fmt::format("{:<20} {:>20}\n", "Metric", "Value");
    out += fmt::format("{:<20} {:>20}\n", "Route completion", ms(ours.route_completion));
    out += fmt::format("{:<20} {:>20}\n", "Driving score", ms(ours.driving_score));
    out += fmt::format("{:<20} {:>20}\n", "Total score", ms(ours.total_score));
    out += fmt::format("{:<20} {:>20}\n", "Use Time (s)", ms(ours.use_time));
    out += fmt::format("{:<20} {:>20}\n", "Success rate", ms(ours.success_rate));
  }
  return out;
}

}  // namespace scenoforge
