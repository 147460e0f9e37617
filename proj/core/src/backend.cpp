#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "scenoforge/llm.hpp"
#include "scenoforge/util.hpp"

namespace scenoforge {

namespace {

using nlohmann::ordered_json;

constexpr std::string_view kApiKeyEnv = "SCENOFORGE_API_KEY";

}  // namespace

std::string_view role_name(Role role) {
  switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

std::string encode_transcript(const std::vector<TranscriptEntry>& entries) {
  std::string out;
  for (const TranscriptEntry& entry : entries) {
    out += fmt::format("REQUEST {}\n", entry.request_json.size());
    out += entry.request_json;
    out += "\n";
    out += fmt::format("RESPONSE {}\n", entry.response.size());
    out += entry.response;
    out += "\n";
  }
  return out;
}

std::vector<TranscriptEntry> decode_transcript(const std::string& text) {
  std::vector<TranscriptEntry> entries;
  std::size_t pos = 0;
  auto read_block = [&](std::string_view keyword) -> std::string {
    const std::string header = fmt::format("{} ", keyword);
    if (text.compare(pos, header.size(), header) != 0) {
      throw BackendError(fmt::format(
          "malformed transcript: expected \"{}\" at byte {}", keyword, pos));
    }
    pos += header.size();
    const std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) {
      throw BackendError("malformed transcript: unterminated length line");
    }
    const auto count = parse_int(text.substr(pos, eol - pos));
    if (!count || *count < 0) {
      throw BackendError("malformed transcript: bad byte count");
    }
    pos = eol + 1;
    if (pos + static_cast<std::size_t>(*count) > text.size()) {
      throw BackendError("malformed transcript: truncated payload");
    }
    std::string payload = text.substr(pos, static_cast<std::size_t>(*count));
    pos += static_cast<std::size_t>(*count);
    if (pos >= text.size() || text[pos] != '\n') {
      throw BackendError("malformed transcript: missing payload terminator");
    }
    ++pos;
    return payload;
  };
  while (pos < text.size()) {
    TranscriptEntry entry;
    entry.request_json = read_block("REQUEST");
    entry.response = read_block("RESPONSE");
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<TranscriptEntry> read_transcript_file(const std::string& path) {
  return decode_transcript(read_file(path));
}

std::string conversation_to_json(const BackendConfig& config,
                                 const Conversation& conversation) {
  ordered_json body;
  body["model"] = config.model_name;
  body["temperature"] = config.temperature;
  body["messages"] = ordered_json::array();
  for (const ChatMessage& message : conversation.messages) {
    body["messages"].push_back(
        {{"role", std::string(role_name(message.role))}, {"content", message.content}});
  }
  return body.dump();
}

struct ChatBackend::HttpState {
  std::unique_ptr<httplib::Client> client;
  std::string prefix;
};

std::string ChatBackend::transcript_path() const {
  return (std::filesystem::path(config_.transcript_dir) / (stage_ + ".transcript"))
      .string();
}

ChatBackend::ChatBackend(BackendConfig config, std::string stage)
    : config_(std::move(config)), stage_(std::move(stage)) {
  const bool needs_dir =
      config_.mode == BackendMode::replay || config_.mode == BackendMode::record;
  const bool needs_endpoint =
      config_.mode == BackendMode::http || config_.mode == BackendMode::record;
  if (needs_dir && config_.transcript_dir.empty()) {
    throw std::invalid_argument("replay/record backends need a transcript directory");
  }
  if (needs_endpoint && config_.endpoint.empty()) {
    throw std::invalid_argument("http/record backends need an endpoint");
  }
  if (config_.temperature < 0.0 || config_.temperature > 2.0) {
    throw std::invalid_argument("temperature must be within [0, 2]");
  }
  if (needs_endpoint) {
    const EndpointParts parsed = split_endpoint(config_.endpoint);
    http_ = std::make_unique<HttpState>();
    http_->client = std::make_unique<httplib::Client>(parsed.base);
    http_->prefix = parsed.prefix;
    http_->client->set_connection_timeout(static_cast<int>(config_.timeout_seconds));
    http_->client->set_read_timeout(static_cast<int>(config_.timeout_seconds), 0);
  }
}

ChatBackend::~ChatBackend() = default;

std::string ChatBackend::complete_http(const Conversation& conversation) {
  const std::string body = conversation_to_json(config_, conversation);
  httplib::Headers headers;
  if (const char* key = std::getenv(kApiKeyEnv.data())) {
    headers.emplace("Authorization", fmt::format("Bearer {}", key));
  }
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      const auto backoff = std::chrono::milliseconds(100ll << (attempt - 1));
      std::this_thread::sleep_for(std::min(backoff, std::chrono::milliseconds(2000)));
    }
    auto res = http_->client->Post(http_->prefix + "/chat/completions", headers,
                                   body, "application/json");
    if (!res) {
      last_error = fmt::format("transport error: {}", httplib::to_string(res.error()));
      continue;
    }
    if (res->status != 200) {
      last_error = fmt::format("HTTP status {}", res->status);
      continue;
    }
    try {
      const auto parsed = nlohmann::json::parse(res->body);
      return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception& e) {
      last_error = fmt::format("malformed completion response: {}", e.what());
    }
  }
  throw BackendError(fmt::format("stage {}: chat completion failed after {} "
                                 "attempt(s): {}",
                                 stage_, config_.max_retries + 1, last_error));
}

std::string ChatBackend::complete(const Conversation& conversation) {
  ++calls_;
  switch (config_.mode) {
    case BackendMode::http:
      return complete_http(conversation);
    case BackendMode::record: {
      const std::string response = complete_http(conversation);
      TranscriptEntry entry{conversation_to_json(config_, conversation), response};
      std::filesystem::create_directories(config_.transcript_dir);
      const std::string path = transcript_path();
      std::string existing = file_exists(path) ? read_file(path) : "";
      write_file(path, existing + encode_transcript({entry}));
      return response;
    }
    case BackendMode::replay: {
      if (!replay_loaded_) {
        replay_entries_ = read_transcript_file(transcript_path());
        replay_loaded_ = true;
      }
      if (replay_cursor_ >= replay_entries_.size()) {
        throw BackendError(fmt::format(
            "stage {}: transcript exhausted after {} entr{}", stage_,
            replay_entries_.size(), replay_entries_.size() == 1 ? "y" : "ies"));
      }
      const TranscriptEntry& entry = replay_entries_[replay_cursor_++];
      // The recorded request must match the live one, whitespace aside.
      const auto recorded = nlohmann::json::parse(entry.request_json);
      const auto& messages = recorded.at("messages");
      const std::size_t live_count = conversation.messages.size();
      if (messages.size() != live_count) {
        throw BackendError(fmt::format(
            "stage {}: transcript mismatch at entry {}: recorded {} messages, live "
            "conversation has {}",
            stage_, replay_cursor_ - 1, messages.size(), live_count));
      }
      for (std::size_t i = 0; i < live_count; ++i) {
        const std::string recorded_role = messages[i].at("role").get<std::string>();
        const std::string recorded_content =
            normalize_whitespace(messages[i].at("content").get<std::string>());
        const ChatMessage& live = conversation.messages[i];
        if (recorded_role != role_name(live.role) ||
            recorded_content != normalize_whitespace(live.content)) {
          throw BackendError(fmt::format(
              "stage {}: transcript mismatch at entry {}: first differing message "
              "index {}",
              stage_, replay_cursor_ - 1, i));
        }
      }
      return entry.response;
    }
  }
  throw BackendError("unknown backend mode");
}

}  // namespace scenoforge
