#pragma once

#include <cstdint>
#include <vector>

#include "kgsmile/embedding.hpp"
#include "kgsmile/generator.hpp"
#include "kgsmile/graph.hpp"
#include "kgsmile/similarity.hpp"

namespace kgsmile {

/// keep[i] == true when triple i survives. A valid mask keeps at least one
/// triple and removes at least one.
struct PerturbationMask {
  std::vector<bool> keep;

  std::size_t size() const noexcept { return keep.size(); }
  std::size_t removed() const noexcept;
  bool valid() const noexcept;

  friend bool operator==(const PerturbationMask&, const PerturbationMask&) = default;
};

struct PerturbationConfig {
  std::size_t num_samples = 20;
  double removal_prob = 0.5;
  std::uint64_t seed = 0;
  bool allow_duplicates = false;
  /// Concurrent generate/embed calls; 1 runs inline.
  std::size_t workers = 1;
  /// Attempts per generator call before the run aborts.
  std::size_t generator_attempts = 3;

  void validate() const;
};

inline constexpr std::size_t kMaxInvariantRedraws = 64;
inline constexpr std::size_t kMaxDuplicateRedraws = 16;

std::vector<PerturbationMask> sample_masks(std::size_t n_triples, const PerturbationConfig& cfg);

/// Graph without the removed triples. Surviving triples keep their index in
/// `kg` as `origin`.
KnowledgeGraph apply_mask(const KnowledgeGraph& kg, const PerturbationMask& mask);

struct PerturbationSample {
  PerturbationMask mask;
  Answer answer;
  double graph_similarity = 1.0;
  ScoreBundle text_scores;
  double kernel_weight = 1.0;
};

struct PerturbationRun {
  Answer original_answer;
  EmbeddingVector original_text_embedding;
  EmbeddingVector original_graph_embedding;
  std::vector<PerturbationSample> samples;
  PerturbationConfig config;
  SimilarityConfig similarity;
};

/// Generates the original answer, then for every mask generates on the
/// perturbed graph and scores it against the original (text metrics on the
/// answers, cosine on the graphs, kernel weight from the graph similarity).
PerturbationRun run_perturbations(const KnowledgeGraph& kg, std::string_view question, Generator& generator,
                                  Embedder& embedder, const PerturbationConfig& pert_cfg,
                                  const SimilarityConfig& sim_cfg);

PerturbationRun run_perturbations(const KnowledgeGraph& kg, std::string_view question,
                                  const GeneratorConfig& gen_cfg, const EmbedderConfig& emb_cfg,
                                  const PerturbationConfig& pert_cfg, const SimilarityConfig& sim_cfg);

}  // namespace kgsmile
