#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgsmile/graph.hpp"

namespace kgsmile {

/// Fixed-length vector of finite values.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values);

  static EmbeddingVector zeros(std::size_t dim) { return EmbeddingVector(std::vector<double>(dim, 0.0)); }

  std::size_t dim() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double norm() const noexcept;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
};

/// Lowercases and splits on every byte that is not an ASCII letter or digit.
std::vector<std::string> tokenize(std::string_view text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

enum class EmbedderKind { Deterministic, Remote };

struct EmbedderConfig {
  EmbedderKind kind = EmbedderKind::Deterministic;
  std::size_t dim = 256;
  std::string endpoint;
  std::string model_id;
  std::chrono::seconds timeout{30};
  std::size_t max_in_flight = 4;

  void validate() const;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual EmbeddingVector embed(std::string_view text) = 0;
};

/// Hashed bag-of-tokens: bucket = FNV-1a(token) mod dim, counts L2-normalised.
class HashingEmbedder final : public Embedder {
 public:
  explicit HashingEmbedder(std::size_t dim = 256);
  EmbeddingVector embed(std::string_view text) override;
  std::size_t dim() const noexcept { return dim_; }

 private:
  std::size_t dim_;
};

/// Client for an OpenAI-style embeddings endpoint. The first response fixes
/// the dimension; later responses of another length are contract errors.
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(EmbedderConfig cfg);
  EmbeddingVector embed(std::string_view text) override;
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts);

  std::optional<std::size_t> recorded_dim() const;

 private:
  EmbedderConfig cfg_;
  mutable std::mutex mu_;
  std::optional<std::size_t> dim_;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& cfg);

EmbeddingVector embed_text(std::string_view text, const EmbedderConfig& cfg);

/// Canonical text of a graph: "subject predicate object" per triple, newline-joined.
std::string serialize_for_embedding(const KnowledgeGraph& kg);

EmbeddingVector embed_graph(const KnowledgeGraph& kg, Embedder& embedder);
EmbeddingVector embed_graph(const KnowledgeGraph& kg, const EmbedderConfig& cfg);

}  // namespace kgsmile
