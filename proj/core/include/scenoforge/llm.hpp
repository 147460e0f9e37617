#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "scenoforge/diagnostics.hpp"
#include "scenoforge/net_compiler.hpp"
#include "scenoforge/net_model.hpp"

namespace scenoforge {

// ---------------------------------------------------------------------------
// Conversations and the chat backend.
// ---------------------------------------------------------------------------

enum class Role { system, user, assistant };

std::string_view role_name(Role role);

struct ChatMessage {
  Role role = Role::user;
  std::string content;
};

struct Conversation {
  std::vector<ChatMessage> messages;
};

enum class BackendMode { http, replay, record };

struct BackendConfig {
  BackendMode mode = BackendMode::replay;
  std::string endpoint;        // http/record
  std::string model_name = "gpt-4";
  double temperature = 0.7;    // in [0, 2]
  std::string transcript_dir;  // replay/record
  double timeout_seconds = 60.0;
  int max_retries = 3;
};

// Environmental failures (network, exhausted or mismatching transcripts).
// Content-level failures are Diagnostics, never exceptions.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TranscriptEntry {
  std::string request_json;  // model, temperature, messages
  std::string response;
};

// Transcript files hold a length-prefixed sequence of request/response
// records, one file per pipeline stage:
//   REQUEST <byte count>\n<bytes>\nRESPONSE <byte count>\n<bytes>\n
std::string encode_transcript(const std::vector<TranscriptEntry>& entries);
std::vector<TranscriptEntry> decode_transcript(const std::string& text);
std::vector<TranscriptEntry> read_transcript_file(const std::string& path);

std::string conversation_to_json(const BackendConfig& config,
                                 const Conversation& conversation);

// One stage's connection to the model: live HTTP, deterministic replay of a
// recorded transcript, or HTTP with recording. A backend owns its transcript
// cursor; pipelines never share one.
class ChatBackend {
 public:
  ChatBackend(BackendConfig config, std::string stage);
  ~ChatBackend();

  ChatBackend(const ChatBackend&) = delete;
  ChatBackend& operator=(const ChatBackend&) = delete;

  std::string complete(const Conversation& conversation);

  const BackendConfig& config() const { return config_; }
  const std::string& stage() const { return stage_; }
  int calls() const { return calls_; }
  std::string transcript_path() const;

 private:
  std::string complete_http(const Conversation& conversation);

  BackendConfig config_;
  std::string stage_;
  int calls_ = 0;
  std::vector<TranscriptEntry> replay_entries_;
  std::size_t replay_cursor_ = 0;
  bool replay_loaded_ = false;
  struct HttpState;
  std::unique_ptr<HttpState> http_;
};

// ---------------------------------------------------------------------------
// Prompt templates.
// ---------------------------------------------------------------------------

// Templates are data files, one per agent, with {placeholder} slots from a
// fixed set. Rendering with every slot bound leaves no residue.
class PromptTemplate {
 public:
  static Fallible<PromptTemplate> load(std::string name, std::string body);

  Fallible<std::string> render(
      const std::map<std::string, std::string>& bindings) const;

  const std::string& name() const { return name_; }
  const std::string& body() const { return body_; }

 private:
  std::string name_;
  std::string body_;
};

struct TemplateSet {
  PromptTemplate interpreter;
  PromptTemplate net_generator;
  PromptTemplate vehicle_generator;
  PromptTemplate evaluator;

  // Throws std::runtime_error when a template file is missing or invalid.
  static TemplateSet load_dir(const std::string& dir);
};

// Resolution order: explicit argument, SCENOFORGE_TEMPLATE_DIR, the source
// tree location compiled into the library.
std::string default_template_dir();

// ---------------------------------------------------------------------------
// Structured responses.
// ---------------------------------------------------------------------------

// Contents of all fenced blocks labeled `tag` (``` + tag on its own line,
// closed by ```), in order, tolerant of surrounding prose.
Fallible<std::vector<std::string>> extract_tagged_blocks(const std::string& text,
                                                         const std::string& tag);

struct ScenarioFooter {
  SceneType scene_type = SceneType::general;
  std::vector<std::pair<std::string, int>> lanes_by_road;
  int vehicle_count = 1;
};

struct ScenarioDescription {
  std::string narrative;  // full response: Description + Reasoning sections
  ScenarioFooter footer;
};

Fallible<ScenarioDescription> parse_description(const std::string& response);

struct Verdict {
  bool passed = false;
  std::string reasoning;
};

// ---------------------------------------------------------------------------
// Agents.
// ---------------------------------------------------------------------------

Fallible<std::vector<ScenarioDescription>> interpret(ChatBackend& backend,
                                                     const TemplateSet& templates,
                                                     const std::string& request,
                                                     int k);

struct RagExample {
  std::string id;
  std::string description;
  std::string node_text;
  std::string edge_text;
};

// `raw_response`, when given, receives the unparsed model output (for
// attempt logs and digests) even when extraction fails.
Fallible<NetworkPlan> generate_net(ChatBackend& backend,
                                   const TemplateSet& templates,
                                   const std::string& description,
                                   const std::vector<RagExample>& examples,
                                   const std::optional<std::string>& feedback = {},
                                   std::string* raw_response = nullptr);

Fallible<std::vector<Trip>> generate_vehicles(
    ChatBackend& backend, const TemplateSet& templates,
    const std::string& description, const std::string& net_summary,
    std::optional<int> expected_count,
    const std::optional<std::string>& feedback = {},
    std::string* raw_response = nullptr);

Fallible<Verdict> evaluate_scenario(ChatBackend& backend,
                                    const TemplateSet& templates,
                                    const std::string& scenario_digest,
                                    const std::string& intent);

// ---------------------------------------------------------------------------
// Self-improvement loop.
// ---------------------------------------------------------------------------

struct RepairConfig {
  int max_attempts = 3;
};

struct AttemptRecord {
  std::string response_digest;
  Diagnostics diagnostics;
  std::string feedback_used;  // empty on the first attempt
};

template <typename T>
struct RepairOutcome {
  std::optional<T> result;
  std::vector<AttemptRecord> log;

  bool ok() const { return result.has_value(); }
};

template <typename T>
struct Attempt {
  std::optional<T> value;
  Diagnostics diagnostics;
  std::string response_digest;
};

// Runs `generate` up to max_attempts times. Diagnostics from a failed
// attempt (either from generation itself or from `check`) are rendered into
// corrective feedback for the next attempt.
template <typename T>
RepairOutcome<T> repair_loop(
    const std::function<Attempt<T>(const std::optional<std::string>& feedback)>&
        generate,
    const std::function<Diagnostics(const T&)>& check, const RepairConfig& config) {
  RepairOutcome<T> outcome;
  std::optional<std::string> feedback;
  for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
    Attempt<T> produced = generate(feedback);
    Diagnostics diags = produced.diagnostics;
    if (produced.value && diags.empty()) {
      diags = check(*produced.value);
    }
    AttemptRecord record;
    record.response_digest = produced.response_digest;
    record.diagnostics = diags;
    record.feedback_used = feedback.value_or("");
    outcome.log.push_back(std::move(record));
    if (produced.value && diags.empty()) {
      outcome.result = std::move(produced.value);
      return outcome;
    }
    feedback = diagnostics_to_feedback(diags);
  }
  return outcome;  // exhausted; full log retained
}

}  // namespace scenoforge
