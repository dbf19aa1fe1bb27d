#include "kgsmile/embedding.hpp"

#include <cctype>
#include <cmath>

#include "http.hpp"
#include "kgsmile/error.hpp"

namespace kgsmile {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(ErrorKind::Contract, "embedding contains a non-finite value");
}

double EmbeddingVector::norm() const noexcept {
  double sq = 0.0;
  for (double v : values_) sq += v * v;
  return std::sqrt(sq);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

void EmbedderConfig::validate() const {
  if (dim == 0 && kind == EmbedderKind::Deterministic) throw Error(ErrorKind::Contract, "embedding dim must be positive");
  if (kind == EmbedderKind::Remote && (endpoint.empty() || model_id.empty()))
    throw Error(ErrorKind::Contract, "remote embedder needs an endpoint and a model id");
}

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw Error(ErrorKind::Contract, "embedding dim must be positive");
}

EmbeddingVector HashingEmbedder::embed(std::string_view text) {
  std::vector<double> buckets(dim_, 0.0);
  const auto tokens = tokenize(text);
  if (tokens.empty()) return EmbeddingVector(std::move(buckets));
  for (const auto& tok : tokens) buckets[fnv1a64(tok) % dim_] += 1.0;
  double sq = 0.0;
  for (double v : buckets) sq += v * v;
  const double inv = 1.0 / std::sqrt(sq);
  for (double& v : buckets) v *= inv;
  return EmbeddingVector(std::move(buckets));
}

RemoteEmbedder::RemoteEmbedder(EmbedderConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.kind = EmbedderKind::Remote;
  cfg_.validate();
}

std::optional<std::size_t> RemoteEmbedder::recorded_dim() const {
  std::lock_guard lock(mu_);
  return dim_;
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(const std::vector<std::string>& texts) {
  const nlohmann::json body = {{"model", cfg_.model_id}, {"input", texts}};
  const auto res = detail::post_json(cfg_.endpoint, body, cfg_.timeout);

  std::vector<EmbeddingVector> out;
  try {
    const auto& data = res.at("data");
    if (data.size() != texts.size())
      throw Error(ErrorKind::Contract, "endpoint returned " + std::to_string(data.size()) + " embeddings for " +
                                           std::to_string(texts.size()) + " inputs");
    for (const auto& item : data) out.emplace_back(item.at("embedding").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Remote, std::string("malformed embedding response: ") + e.what());
  }

  std::lock_guard lock(mu_);
  for (const auto& v : out) {
    if (!dim_) dim_ = v.dim();
    if (v.dim() != *dim_)
      throw Error(ErrorKind::Contract, "embedding dimension drifted from " + std::to_string(*dim_) + " to " +
                                           std::to_string(v.dim()));
  }
  return out;
}

EmbeddingVector RemoteEmbedder::embed(std::string_view text) {
  return std::move(embed_batch({std::string(text)}).front());
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& cfg) {
  cfg.validate();
  if (cfg.kind == EmbedderKind::Remote) return std::make_unique<RemoteEmbedder>(cfg);
  return std::make_unique<HashingEmbedder>(cfg.dim);
}

EmbeddingVector embed_text(std::string_view text, const EmbedderConfig& cfg) {
  return make_embedder(cfg)->embed(text);
}

std::string serialize_for_embedding(const KnowledgeGraph& kg) {
  std::string out;
  for (const auto& t : kg.triples()) {
    if (!out.empty()) out.push_back('\n');
    out += t.subject.id() + " " + t.predicate.label() + " " + t.object.id();
  }
  return out;
}

EmbeddingVector embed_graph(const KnowledgeGraph& kg, Embedder& embedder) {
  return embedder.embed(serialize_for_embedding(kg));
}

EmbeddingVector embed_graph(const KnowledgeGraph& kg, const EmbedderConfig& cfg) {
  return embed_graph(kg, *make_embedder(cfg));
}

}  // namespace kgsmile
