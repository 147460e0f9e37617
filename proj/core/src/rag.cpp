#include "scenoforge/rag.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "scenoforge/llm.hpp"
#include "scenoforge/util.hpp"

namespace scenoforge {

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : to_lower(text)) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string_view compass_point(double heading_deg) {
  static constexpr std::string_view kNames[] = {"east",  "northeast", "north",
                                                "northwest", "west",  "southwest",
                                                "south", "southeast"};
  const int sector =
      static_cast<int>(std::floor((heading_deg + 22.5) / 45.0)) % 8;
  return kNames[(sector + 8) % 8];
}

std::string_view dir_word(ConnectionDir dir) {
  switch (dir) {
    case ConnectionDir::straight: return "straight";
    case ConnectionDir::left: return "left";
    case ConnectionDir::right: return "right";
    case ConnectionDir::turn: return "turnaround";
  }
  return "straight";
}

}  // namespace

Fallible<double> cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    return make_diag(DiagCode::BadAttribute, "dimension",
                     fmt::format("cosine needs equal dimension, got {} and {}",
                                 a.dimension(), b.dimension()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na <= 0.0 || nb <= 0.0) {
    return make_diag(DiagCode::BadAttribute, "zero vector",
                     "cosine similarity is undefined for a zero vector");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

Embedder::Embedder(EmbedderConfig config) : config_(std::move(config)) {
  if (config_.mode == EmbedderConfig::Mode::local && config_.dimension < 2) {
    throw std::invalid_argument("local embedder dimension must be >= 2");
  }
  if (config_.mode == EmbedderConfig::Mode::remote && config_.endpoint.empty()) {
    throw std::invalid_argument("remote embedder needs an endpoint");
  }
}

Fallible<EmbeddingVector> Embedder::embed(const std::string& text) const {
  if (trim(text).empty()) {
    return make_diag(DiagCode::BadAttribute, "text",
                     "cannot embed empty text");
  }
  if (config_.mode == EmbedderConfig::Mode::remote) {
    const EndpointParts parsed = split_endpoint(config_.endpoint);
    httplib::Client client(parsed.base);
    client.set_connection_timeout(static_cast<int>(config_.timeout_seconds));
    client.set_read_timeout(static_cast<int>(config_.timeout_seconds), 0);
    httplib::Headers headers;
    if (const char* key = std::getenv("SCENOFORGE_API_KEY")) {
      headers.emplace("Authorization", fmt::format("Bearer {}", key));
    }
    nlohmann::ordered_json body;
    body["model"] = config_.model_name;
    body["input"] = text;
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      auto res = client.Post(parsed.prefix + "/embeddings", headers, body.dump(),
                             "application/json");
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        last_error = fmt::format("HTTP status {}", res->status);
        continue;
      }
      try {
        const auto parsed_body = nlohmann::json::parse(res->body);
        EmbeddingVector vector;
        for (const auto& v : parsed_body.at("data").at(0).at("embedding")) {
          vector.values.push_back(v.get<double>());
        }
        if (vector.values.empty()) throw std::runtime_error("empty embedding");
        return vector;
      } catch (const std::exception& e) {
        last_error = fmt::format("malformed embeddings response: {}", e.what());
      }
    }
    throw BackendError(
        fmt::format("embedding request failed after {} attempt(s): {}",
                    config_.max_retries + 1, last_error));
  }

  // Local feature hashing: signed character 3-grams per token.
  EmbeddingVector vector;
  vector.values.assign(static_cast<std::size_t>(config_.dimension), 0.0);
  for (const std::string& token : tokenize(text)) {
    std::vector<std::string> grams;
    if (token.size() < 3) {
      grams.push_back(token);
    } else {
      for (std::size_t i = 0; i + 3 <= token.size(); ++i) {
        grams.push_back(token.substr(i, 3));
      }
    }
    for (const std::string& gram : grams) {
      const std::uint64_t hash = fnv1a(gram);
      const std::size_t bucket = hash % vector.values.size();
      const double sign = ((hash >> 32) & 1) ? 1.0 : -1.0;
      vector.values[bucket] += sign;
    }
  }
  double norm = 0.0;
  for (double v : vector.values) norm += v * v;
  if (norm <= 0.0) {
    // Pathological all-cancelled input; fall back to a fixed unit direction
    // so the vector stays usable.
    vector.values[0] = 1.0;
    return vector;
  }
  norm = std::sqrt(norm);
  for (double& v : vector.values) v /= norm;
  return vector;
}

// --- persistence --------------------------------------------------------------

namespace {

std::string entry_to_line(const RagEntry& entry) {
  nlohmann::ordered_json record;
  record["id"] = entry.id;
  record["tags"] = entry.tags;
  record["description"] = entry.description;
  record["embedding"] = entry.embedding.values;
  record["nodes"] = entry.node_text;
  record["edges"] = entry.edge_text;
  return record.dump();
}

RagEntry entry_from_line(const std::string& line) {
  const auto record = nlohmann::json::parse(line);
  RagEntry entry;
  entry.id = record.at("id").get<std::string>();
  entry.tags = record.at("tags").get<std::vector<std::string>>();
  entry.description = record.at("description").get<std::string>();
  entry.embedding.values = record.at("embedding").get<std::vector<double>>();
  entry.node_text = record.at("nodes").get<std::string>();
  entry.edge_text = record.at("edges").get<std::string>();
  return entry;
}

}  // namespace

RagStore RagStore::open(std::string path, EmbedderConfig embedder) {
  RagStore store;
  store.path_ = std::move(path);
  store.embedder_ = Embedder(std::move(embedder));
  if (!store.path_.empty() && file_exists(store.path_)) {
    std::istringstream in(read_file(store.path_));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      try {
        store.entries_.push_back(entry_from_line(line));
      } catch (const std::exception& e) {
        throw std::runtime_error(fmt::format("corrupt RAG store {} line {}: {}",
                                             store.path_, line_no, e.what()));
      }
    }
  }
  return store;
}

Fallible<bool> RagStore::add_entry(const RagEntry& entry) {
  if (trim(entry.description).empty()) {
    return make_diag(DiagCode::BadAttribute, entry.id,
                     fmt::format("entry \"{}\" needs a nonempty description",
                                 entry.id));
  }
  if (!valid_identifier(entry.id)) {
    return make_diag(DiagCode::BadAttribute, entry.id,
                     fmt::format("entry id \"{}\" is not a plain identifier",
                                 entry.id));
  }
  auto parsed = parse_plain(entry.node_text, entry.edge_text);
  if (!parsed.ok()) {
    Diagnostics diags = parsed.diagnostics();
    diags.insert(diags.begin(),
                 make_diag(DiagCode::BadAttribute, entry.id,
                           fmt::format("entry \"{}\" carries node/edge texts that "
                                       "do not parse",
                                       entry.id)));
    return diags;
  }
  bool any_nonzero = false;
  for (double v : entry.embedding.values) {
    if (!std::isfinite(v)) {
      return make_diag(DiagCode::BadAttribute, entry.id,
                       fmt::format("entry \"{}\" has a non-finite embedding value",
                                   entry.id));
    }
    if (v != 0.0) any_nonzero = true;
  }
  if (entry.embedding.values.empty() || !any_nonzero) {
    return make_diag(DiagCode::BadAttribute, entry.id,
                     fmt::format("entry \"{}\" needs a nonzero embedding", entry.id));
  }

  std::unique_lock lock(*mutex_);
  if (!entries_.empty() &&
      entries_.front().embedding.dimension() != entry.embedding.dimension()) {
    return make_diag(
        DiagCode::BadAttribute, entry.id,
        fmt::format("entry \"{}\" has dimension {} but the store uses {}", entry.id,
                    entry.embedding.dimension(),
                    entries_.front().embedding.dimension()));
  }
  for (const RagEntry& existing : entries_) {
    if (existing.id == entry.id) {
      return make_diag(DiagCode::DuplicateId, entry.id,
                       fmt::format("entry id \"{}\" already exists in the store",
                                   entry.id));
    }
  }
  entries_.push_back(entry);
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot append to RAG store: " + path_);
    out << entry_to_line(entry) << "\n";
  }
  return true;
}

Fallible<std::vector<std::pair<RagEntry, double>>> RagStore::query(
    const std::string& text, std::size_t k) const {
  auto embedded = embedder_.embed(text);
  if (!embedded.ok()) return embedded.diagnostics();

  std::shared_lock lock(*mutex_);
  if (entries_.empty()) {
    return make_diag(DiagCode::FormatError, "store",
                     "cannot query an empty store");
  }
  std::vector<std::pair<RagEntry, double>> scored;
  scored.reserve(entries_.size());
  for (const RagEntry& entry : entries_) {
    auto similarity = cosine(embedded.value(), entry.embedding);
    if (!similarity.ok()) return similarity.diagnostics();
    scored.emplace_back(entry, similarity.value());
  }
  // Stable sort keeps insertion order among ties.
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

Fallible<std::string> RagStore::ingest_net(const std::string& net_text,
                                           const std::vector<std::string>& tags) {
  auto parsed = parse_net(net_text);
  if (!parsed.ok()) return parsed.diagnostics();
  const CompiledNetwork& net = parsed.value().network;
  const NetworkPlan plan = reconstruct_plan(net);
  const std::string description = summarize_network(net);
  auto embedding = embedder_.embed(description);
  if (!embedding.ok()) return embedding.diagnostics();

  RagEntry entry;
  {
    std::shared_lock lock(*mutex_);
    std::set<std::string> used;
    for (const RagEntry& existing : entries_) used.insert(existing.id);
    std::size_t n = entries_.size();
    while (used.count(fmt::format("entry_{}", n))) ++n;
    entry.id = fmt::format("entry_{}", n);
  }
  entry.description = description;
  const auto [node_text, edge_text] = serialize_plain(plan);
  entry.node_text = node_text;
  entry.edge_text = edge_text;
  entry.embedding = std::move(embedding.value());
  entry.tags = tags;
  auto added = add_entry(entry);
  if (!added.ok()) return added.diagnostics();
  return entry.id;
}

std::size_t RagStore::size() const {
  std::shared_lock lock(*mutex_);
  return entries_.size();
}

std::vector<RagEntry> RagStore::entries() const {
  std::shared_lock lock(*mutex_);
  return entries_;
}

// --- summaries ----------------------------------------------------------------

std::string summarize_network(const CompiledNetwork& net, const CompileOptions& opts) {
  const NetworkStats stats = network_stats(net);
  std::string out = fmt::format(
      "General layout: a {} with {} road segment(s) and {} junction(s), {} lane(s) "
      "in total.\n",
      scene_type_label(classify_scene(net, opts)), stats.total_edges,
      net.junctions.size(), stats.total_lanes);
  for (const CompiledEdge& edge : net.edges) {
    const Lane& lane = edge.lanes.front();
    const double bearing = heading_deg(lane.shape.front(), lane.shape.back());
    const double turn = total_turn_deg(lane.shape);
    std::string curve;
    if (std::abs(turn) > 15.0) {
      curve = fmt::format("curves {} by {} degrees", turn > 0 ? "left" : "right",
                          static_cast<long>(std::llround(std::abs(turn))));
    } else {
      curve = "straight";
    }
    out += fmt::format(
        "Segment \"{}\"{}: {} m long, {} lane(s), speed limit {} m/s, heading "
        "{}, {}.\n",
        edge.id, edge.name ? fmt::format(" ({})", *edge.name) : "",
        static_cast<long>(std::llround(edge.mean_lane_length())), edge.lanes.size(),
        format_fixed(lane.speed), compass_point(bearing), curve);
  }
  std::string connectivity;
  std::set<std::pair<std::string, std::string>> seen;
  for (const Connection& connection : net.connections) {
    if (!seen.insert({connection.from_edge, connection.to_edge}).second) continue;
    if (!connectivity.empty()) connectivity += "; ";
    connectivity += fmt::format("{} feeds {} ({})", connection.from_edge,
                                connection.to_edge, dir_word(connection.dir));
  }
  out += fmt::format("Connectivity: {}.\n",
                     connectivity.empty() ? "no junction movements" : connectivity);
  return out;
}

}  // namespace scenoforge
