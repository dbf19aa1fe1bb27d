#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "kgsmile/embedding.hpp"
#include "kgsmile/generator.hpp"
#include "kgsmile/graph.hpp"

namespace kgsmile {

struct ExtractedTerms {
  std::vector<Entity> entities;      // ordered by first appearance in the graph
  std::vector<std::string> relations;
};

/// Entities: graph entity ids found case-insensitively in the question, longest
/// first, each question span used at most once. Relations: graph relation
/// labels (underscores read as spaces) found in the question, plus the seed
/// verbs bind / relate / associate / interact.
ExtractedTerms extract_entities_relations(std::string_view question, const KnowledgeGraph& kg);

struct ChainStep {
  Triple triple;
  Entity from;  // entity the step leaves
  Entity to;    // entity the step reaches
};

struct ReasoningChain {
  std::vector<ChainStep> steps;

  bool empty() const noexcept { return steps.empty(); }
  std::size_t size() const noexcept { return steps.size(); }
  std::vector<Entity> entities() const;
  /// "from → [relation] → to" per step.
  std::vector<std::string> rendered_lines() const;
  /// Consecutive steps share an entity and every step is a triple of `kg`.
  bool linked_in(const KnowledgeGraph& kg) const;
};

inline constexpr std::size_t kDefaultChainDepth = 4;

/// Greedy chain growth from the first extracted entity: each step takes the
/// lowest-index unused triple at the tail leading to another extracted
/// entity, falling back to any unused triple at the tail. Entities are not
/// revisited.
ReasoningChain generate_chain_of_thought(const KnowledgeGraph& kg, std::string_view question,
                                         std::size_t max_depth = kDefaultChainDepth);

inline constexpr std::string_view kChainInstruction = "Answer using only the facts above.";

std::string format_triples_for_prompt(const ReasoningChain& chain);

struct PrePromptConfig {
  std::size_t num_rephrases = 5;
  std::vector<std::string> refusal_patterns = {"i do not know", "i don't know", "not enough information"};

  void validate() const;
};

bool is_refusal(std::string_view answer, const PrePromptConfig& cfg);

class Rephraser {
 public:
  virtual ~Rephraser() = default;
  virtual std::vector<std::string> rephrase(std::string_view question, std::size_t count) = 0;
};

/// Deterministic templates ("Define X", "Explain X", ...).
class TemplateRephraser final : public Rephraser {
 public:
  std::vector<std::string> rephrase(std::string_view question, std::size_t count) override;
};

/// Asks a generator for each rephrasing.
class GeneratorRephraser final : public Rephraser {
 public:
  explicit GeneratorRephraser(Generator& gen) : gen_(gen) {}
  std::vector<std::string> rephrase(std::string_view question, std::size_t count) override;

 private:
  Generator& gen_;
};

struct KeptAnswer {
  std::size_t variant = 0;
  std::string question;
  Answer answer;
};

struct PrePromptResult {
  Answer final_answer;
  std::vector<KeptAnswer> kept;
  std::size_t dropped = 0;
  std::vector<std::string> variants;
  std::size_t medoid_variant = 0;  // meaningful only when kept is non-empty
};

/// Index into `answers` maximising the mean mapped-cosine to the others;
/// ties go to the lowest variant number.
std::size_t medoid_index(const std::vector<KeptAnswer>& answers, Embedder& embedder);

PrePromptResult preprompt_answer(std::string_view question, const KnowledgeGraph& kg, Generator& generator,
                                 Rephraser& rephraser, Embedder& embedder, const PrePromptConfig& cfg);

}  // namespace kgsmile
