#pragma once

#include <memory>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "scenoforge/diagnostics.hpp"
#include "scenoforge/net_compiler.hpp"
#include "scenoforge/net_model.hpp"

namespace scenoforge {

struct EmbeddingVector {
  std::vector<double> values;

  bool operator==(const EmbeddingVector&) const = default;
  std::size_t dimension() const { return values.size(); }
};

Fallible<double> cosine(const EmbeddingVector& a, const EmbeddingVector& b);

struct EmbedderConfig {
  enum class Mode { local, remote };
  Mode mode = Mode::local;
  int dimension = 256;  // local embedder; remote dimension accepted as-is
  std::string endpoint;
  std::string model_name = "text-embedding-ada-002";
  double timeout_seconds = 60.0;
  int max_retries = 3;
};

// Text to vector. The local mode is a deterministic feature hasher
// (lowercase, tokenize on non-alphanumerics, hash character 3-grams of each
// token into signed buckets, L2-normalize) so retrieval tests run offline
// and reproduce exactly. Remote mode speaks the embeddings wire protocol.
class Embedder {
 public:
  explicit Embedder(EmbedderConfig config = {});

  // Content errors (empty text) are diagnostics; network failures throw.
  Fallible<EmbeddingVector> embed(const std::string& text) const;

  const EmbedderConfig& config() const { return config_; }

 private:
  EmbedderConfig config_;
};

struct RagEntry {
  std::string id;
  std::string description;
  std::string node_text;
  std::string edge_text;
  EmbeddingVector embedding;
  std::vector<std::string> tags;
};

// Append-ordered vector store persisted as one JSON record per line.
// Writes go through to disk immediately; queries scan exhaustively (store
// sizes are tens of entries, and exactness keeps the oracle tests exact).
class RagStore {
 public:
  // Loads the file when it exists; a missing file is an empty store.
  // Throws std::runtime_error on unreadable or corrupt content.
  static RagStore open(std::string path, EmbedderConfig embedder = {});

  Fallible<bool> add_entry(const RagEntry& entry);

  Fallible<std::vector<std::pair<RagEntry, double>>> query(const std::string& text,
                                                           std::size_t k) const;

  // parse -> reconstruct plan -> summarize -> embed -> add. Nothing is
  // stored when any step fails.
  Fallible<std::string> ingest_net(const std::string& net_text,
                                   const std::vector<std::string>& tags = {});

  std::size_t size() const;
  std::vector<RagEntry> entries() const;
  const std::string& path() const { return path_; }
  const Embedder& embedder() const { return embedder_; }

 private:
  std::string path_;
  Embedder embedder_;
  std::vector<RagEntry> entries_;
  // Shared so the store stays movable; copies of a store share the lock.
  std::shared_ptr<std::shared_mutex> mutex_ = std::make_shared<std::shared_mutex>();
};

// Deterministic description of a network: general layout, per-segment facts
// (length, lanes, speed, compass heading, curvature), connectivity digest.
std::string summarize_network(const CompiledNetwork& net,
                              const CompileOptions& opts = CompileOptions{});

}  // namespace scenoforge
