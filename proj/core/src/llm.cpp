#include "scenoforge/llm.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <set>

#include "scenoforge/util.hpp"

#ifndef SCENOFORGE_SOURCE_TEMPLATE_DIR
#define SCENOFORGE_SOURCE_TEMPLATE_DIR ""
#endif

namespace scenoforge {

namespace {

const std::set<std::string, std::less<>> kPlaceholders = {
    "request", "description", "examples", "feedback", "net_summary", "count"};

Conversation agent_conversation(std::string_view system_line, std::string prompt) {
  Conversation conversation;
  conversation.messages.push_back({Role::system, std::string(system_line)});
  conversation.messages.push_back({Role::user, std::move(prompt)});
  return conversation;
}

// Section header detection for the interpreter output: a line is a header
// for `title` when, stripped of markdown decoration and a trailing colon, it
// starts with the title (case-insensitive).
bool is_section_header(const std::string& line, std::string_view title) {
  std::string stripped = trim(line);
  while (!stripped.empty() && (stripped.front() == '#' || stripped.front() == '*')) {
    stripped.erase(stripped.begin());
  }
  while (!stripped.empty() && (stripped.back() == '*')) stripped.pop_back();
  stripped = trim(stripped);
  if (!stripped.empty() && stripped.back() == ':') stripped.pop_back();
  return to_lower(stripped) == to_lower(std::string(title));
}

}  // namespace

// --- templates --------------------------------------------------------------

Fallible<PromptTemplate> PromptTemplate::load(std::string name, std::string body) {
  std::size_t pos = 0;
  while ((pos = body.find('{', pos)) != std::string::npos) {
    const std::size_t end = body.find('}', pos);
    if (end == std::string::npos) {
      return make_diag(DiagCode::FormatError, name,
                       fmt::format("template \"{}\" has an unclosed '{{'", name));
    }
    const std::string token = body.substr(pos + 1, end - pos - 1);
    if (!kPlaceholders.count(token)) {
      return make_diag(
          DiagCode::FormatError, name,
          fmt::format("template \"{}\" uses unknown placeholder {{{}}}", name, token));
    }
    pos = end + 1;
  }
  PromptTemplate tpl;
  tpl.name_ = std::move(name);
  tpl.body_ = std::move(body);
  return tpl;
}

Fallible<std::string> PromptTemplate::render(
    const std::map<std::string, std::string>& bindings) const {
  std::string out;
  out.reserve(body_.size());
  std::size_t pos = 0;
  while (pos < body_.size()) {
    const std::size_t open = body_.find('{', pos);
    if (open == std::string::npos) {
      out += body_.substr(pos);
      break;
    }
    out += body_.substr(pos, open - pos);
    const std::size_t close = body_.find('}', open);
    const std::string token = body_.substr(open + 1, close - open - 1);
    const auto bound = bindings.find(token);
    if (bound == bindings.end()) {
      return make_diag(
          DiagCode::FormatError, name_,
          fmt::format("template \"{}\": placeholder {{{}}} is not bound", name_,
                      token));
    }
    out += bound->second;
    pos = close + 1;
  }
  return out;
}

TemplateSet TemplateSet::load_dir(const std::string& dir) {
  auto load_one = [&](const char* name) -> PromptTemplate {
    const std::string path = (std::filesystem::path(dir) / name).string() + ".txt";
    if (!file_exists(path)) {
      throw std::runtime_error(fmt::format("template file not found: {}", path));
    }
    auto loaded = PromptTemplate::load(name, read_file(path));
    if (!loaded.ok()) {
      throw std::runtime_error(to_string(loaded.diagnostics().front()));
    }
    return loaded.value();
  };
  return TemplateSet{load_one("interpreter"), load_one("net_generator"),
                     load_one("vehicle_generator"), load_one("evaluator")};
}

std::string default_template_dir() {
  if (const char* env = std::getenv("SCENOFORGE_TEMPLATE_DIR")) return env;
  return SCENOFORGE_SOURCE_TEMPLATE_DIR;
}

// --- fenced block extraction --------------------------------------------------

Fallible<std::vector<std::string>> extract_tagged_blocks(const std::string& text,
                                                         const std::string& tag) {
  std::vector<std::string> blocks;
  const std::string opener = "```" + tag;
  std::size_t offset = 0;
  bool in_block = false;
  std::size_t block_open_offset = 0;
  std::string current;
  bool in_foreign_block = false;
  while (offset <= text.size()) {
    const std::size_t eol = text.find('\n', offset);
    const std::string line =
        text.substr(offset, eol == std::string::npos ? std::string::npos
                                                     : eol - offset);
    const std::string stripped = trim(line);
    if (in_block) {
      if (stripped == "```") {
        blocks.push_back(current);
        current.clear();
        in_block = false;
      } else {
        current += line;
        current += "\n";
      }
    } else if (in_foreign_block) {
      if (stripped == "```") in_foreign_block = false;
    } else if (stripped == opener) {
      in_block = true;
      block_open_offset = offset;
    } else if (starts_with(stripped, "```") && stripped.size() > 3) {
      in_foreign_block = true;
    }
    if (eol == std::string::npos) break;
    offset = eol + 1;
  }
  if (in_block) {
    return make_diag(DiagCode::FormatError, tag,
                     fmt::format("fenced block ```{} opened at byte offset {} is "
                                 "never closed",
                                 tag, block_open_offset));
  }
  return blocks;
}

// --- interpreter output -------------------------------------------------------

Fallible<ScenarioDescription> parse_description(const std::string& response) {
  Diagnostics diags;
  bool has_description = false;
  bool has_reasoning = false;
  for (const std::string& line : split(response, '\n')) {
    if (is_section_header(line, "Description")) has_description = true;
    if (is_section_header(line, "Reasoning")) has_reasoning = true;
  }
  if (!has_description) {
    diags.push_back(make_diag(DiagCode::FormatError, "Description",
                              "the response has no \"Description\" section"));
  }
  if (!has_reasoning) {
    diags.push_back(make_diag(DiagCode::FormatError, "Reasoning",
                              "the response has no \"Reasoning\" section"));
  }

  auto blocks = extract_tagged_blocks(response, "footer");
  if (!blocks.ok()) return blocks.diagnostics();
  if (blocks.value().size() != 1) {
    diags.push_back(make_diag(
        DiagCode::FormatError, "footer",
        fmt::format("expected exactly one ```footer block, found {}",
                    blocks.value().size())));
    return diags;
  }

  ScenarioDescription description;
  description.narrative = response;
  bool saw_scene = false;
  bool saw_vehicles = false;
  for (const std::string& raw_line : split(blocks.value().front(), '\n')) {
    const std::string line = trim(raw_line);
    if (line.empty()) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) {
      diags.push_back(make_diag(
          DiagCode::FormatError, line,
          fmt::format("footer line \"{}\" is not a key: value pair", line)));
      continue;
    }
    const std::string key = trim(line.substr(0, colon));
    const std::string value = trim(line.substr(colon + 1));
    if (key == "scene_type") {
      const auto scene = scene_type_from(value);
      if (!scene) {
        diags.push_back(make_diag(
            DiagCode::BadAttribute, value,
            fmt::format("footer scene_type \"{}\" is not one of the documented "
                        "scene types",
                        value)));
      } else {
        description.footer.scene_type = *scene;
        saw_scene = true;
      }
    } else if (key == "lanes") {
      for (const std::string& item : split(value, ',')) {
        const std::string entry = trim(item);
        if (entry.empty()) continue;
        const std::size_t eq = entry.rfind('=');
        const auto count =
            eq == std::string::npos ? std::nullopt : parse_int(entry.substr(eq + 1));
        if (!count || *count < 1) {
          diags.push_back(make_diag(
              DiagCode::BadAttribute, entry,
              fmt::format("footer lanes entry \"{}\" must look like RoadName=2",
                          entry)));
          continue;
        }
        description.footer.lanes_by_road.emplace_back(trim(entry.substr(0, eq)),
                                                      static_cast<int>(*count));
      }
    } else if (key == "vehicles") {
      const auto count = parse_int(value);
      if (!count || *count < 1) {
        diags.push_back(make_diag(
            DiagCode::BadAttribute, value,
            fmt::format("footer vehicles value \"{}\" must be an integer >= 1",
                        value)));
      } else {
        description.footer.vehicle_count = static_cast<int>(*count);
        saw_vehicles = true;
      }
    } else {
      diags.push_back(make_diag(
          DiagCode::FormatError, key,
          fmt::format("footer key \"{}\" is not one of scene_type, lanes, vehicles",
                      key)));
    }
  }
  if (!saw_scene) {
    diags.push_back(make_diag(DiagCode::FormatError, "scene_type",
                              "footer is missing the scene_type line"));
  }
  if (!saw_vehicles) {
    diags.push_back(make_diag(DiagCode::FormatError, "vehicles",
                              "footer is missing the vehicles line"));
  }
  if (!diags.empty()) return diags;
  return description;
}

// --- agents -------------------------------------------------------------------

Fallible<std::vector<ScenarioDescription>> interpret(ChatBackend& backend,
                                                     const TemplateSet& templates,
                                                     const std::string& request,
                                                     int k) {
  auto prompt = templates.interpreter.render({{"request", request}});
  if (!prompt.ok()) return prompt.diagnostics();
  std::vector<ScenarioDescription> descriptions;
  for (int i = 0; i < k; ++i) {
    const std::string response = backend.complete(agent_conversation(
        "You are the scenario interpreter of an autonomous-vehicle testing "
        "pipeline.",
        prompt.value()));
    auto parsed = parse_description(response);
    if (!parsed.ok()) {
      Diagnostics indexed;
      for (Diagnostic diag : parsed.diagnostics()) {
        diag.message = fmt::format("description {} of {}: {}", i + 1, k, diag.message);
        indexed.push_back(std::move(diag));
      }
      return indexed;
    }
    descriptions.push_back(std::move(parsed.value()));
  }
  return descriptions;
}

Fallible<NetworkPlan> generate_net(ChatBackend& backend,
                                   const TemplateSet& templates,
                                   const std::string& description,
                                   const std::vector<RagExample>& examples,
                                   const std::optional<std::string>& feedback,
                                   std::string* raw_response) {
  std::string example_text;
  for (const RagExample& example : examples) {
    example_text += fmt::format(
        "Reference geometry \"{}\":\n{}\n\nIts node file:\n{}\nIts edge file:\n{}\n",
        example.id, example.description, example.node_text, example.edge_text);
  }
  if (example_text.empty()) example_text = "(no reference geometry available)";
  auto prompt = templates.net_generator.render(
      {{"description", description},
       {"examples", example_text},
       {"feedback", feedback.value_or("(first attempt, no feedback yet)")}});
  if (!prompt.ok()) return prompt.diagnostics();
  const std::string response = backend.complete(agent_conversation(
      "You are the road-network generator of an autonomous-vehicle testing "
      "pipeline.",
      prompt.value()));
  if (raw_response) *raw_response = response;

  auto nodes = extract_tagged_blocks(response, "nodes");
  if (!nodes.ok()) return nodes.diagnostics();
  auto edges = extract_tagged_blocks(response, "edges");
  if (!edges.ok()) return edges.diagnostics();
  if (nodes.value().size() != 1) {
    return make_diag(DiagCode::FormatError, "nodes",
                     fmt::format("expected exactly one ```nodes block, found {}",
                                 nodes.value().size()));
  }
  if (edges.value().size() != 1) {
    return make_diag(DiagCode::FormatError, "edges",
                     fmt::format("expected exactly one ```edges block, found {}",
                                 edges.value().size()));
  }
  return parse_plain(nodes.value().front(), edges.value().front());
}

Fallible<std::vector<Trip>> generate_vehicles(
    ChatBackend& backend, const TemplateSet& templates,
    const std::string& description, const std::string& net_summary,
    std::optional<int> expected_count, const std::optional<std::string>& feedback,
    std::string* raw_response) {
  auto prompt = templates.vehicle_generator.render(
      {{"description", description},
       {"net_summary", net_summary},
       {"count", expected_count ? fmt::format("{}", *expected_count)
                                : std::string("an appropriate number of")},
       {"feedback", feedback.value_or("(first attempt, no feedback yet)")}});
  if (!prompt.ok()) return prompt.diagnostics();
  const std::string response = backend.complete(agent_conversation(
      "You are the vehicle-route generator of an autonomous-vehicle testing "
      "pipeline.",
      prompt.value()));
  if (raw_response) *raw_response = response;

  auto blocks = extract_tagged_blocks(response, "trips");
  if (!blocks.ok()) return blocks.diagnostics();
  if (blocks.value().size() != 1) {
    return make_diag(DiagCode::FormatError, "trips",
                     fmt::format("expected exactly one ```trips block, found {}",
                                 blocks.value().size()));
  }
  auto trips = parse_trips(blocks.value().front());
  if (!trips.ok()) return trips.diagnostics();

  int av_count = 0;
  for (const Trip& trip : trips.value()) {
    if (trip.kind == VehicleKind::AV) ++av_count;
  }
  if (av_count != 1) {
    return make_diag(
        DiagCode::BadAttribute, "AV",
        fmt::format("exactly one trip must have type AV, found {}", av_count));
  }
  if (expected_count &&
      static_cast<int>(trips.value().size()) != *expected_count) {
    return make_diag(
        DiagCode::CountMismatch, "vehicles",
        fmt::format("the description calls for {} vehicles but the response "
                    "declares {} trips",
                    *expected_count, trips.value().size()));
  }
  return trips;
}

Fallible<Verdict> evaluate_scenario(ChatBackend& backend,
                                    const TemplateSet& templates,
                                    const std::string& scenario_digest,
                                    const std::string& intent) {
  auto prompt = templates.evaluator.render(
      {{"request", intent}, {"net_summary", scenario_digest}});
  if (!prompt.ok()) return prompt.diagnostics();
  const std::string response = backend.complete(agent_conversation(
      "You are the scenario evaluator of an autonomous-vehicle testing pipeline.",
      prompt.value()));

  auto blocks = extract_tagged_blocks(response, "verdict");
  if (!blocks.ok()) return blocks.diagnostics();
  if (blocks.value().size() != 1) {
    return make_diag(DiagCode::FormatError, "verdict",
                     fmt::format("expected exactly one ```verdict block, found {}",
                                 blocks.value().size()));
  }
  const std::string& block = blocks.value().front();
  const std::size_t pass_pos = block.find("PASS");
  const std::size_t fail_pos = block.find("FAIL");
  if (pass_pos == std::string::npos && fail_pos == std::string::npos) {
    return make_diag(DiagCode::FormatError, "verdict",
                     "the verdict block contains neither PASS nor FAIL");
  }
  Verdict verdict;
  verdict.passed = pass_pos != std::string::npos &&
                   (fail_pos == std::string::npos || pass_pos < fail_pos);
  std::string reasoning =
      trim(block.substr((verdict.passed ? pass_pos : fail_pos) + 4));
  if (!reasoning.empty() && (reasoning.front() == ':' || reasoning.front() == '-')) {
    reasoning = trim(reasoning.substr(1));
  }
  verdict.reasoning = reasoning;
  if (!verdict.passed && verdict.reasoning.empty()) {
    return make_diag(DiagCode::FormatError, "verdict",
                     "a FAIL verdict must explain its reasoning");
  }
  return verdict;
}

}  // namespace scenoforge
