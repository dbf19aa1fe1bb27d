#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "kgsmile/graph.hpp"

namespace kgsmile {

inline constexpr std::string_view kRefusal = "I do not know.";

enum class GeneratorKind { Mock, Remote };

struct GeneratorConfig {
  GeneratorKind kind = GeneratorKind::Mock;
  double temperature = 0.0;
  std::string model_id;
  std::string endpoint;
  std::uint64_t seed = 0;
  std::size_t max_tokens = 512;
  std::chrono::seconds timeout{30};
  std::size_t max_in_flight = 4;

  void validate() const;
};

struct Answer {
  std::string text;
  GeneratorKind generator_kind = GeneratorKind::Mock;
  std::string prompt_used;
  bool empty_warning = false;  // remote endpoint returned an empty completion
};

/// `subject -[predicate]-> object` lines for the graph, a blank line, then the
/// question. An optional preamble is placed first.
std::string build_prompt(std::string_view question, const KnowledgeGraph& kg, std::string_view preamble = {});

class Generator {
 public:
  virtual ~Generator() = default;

  /// `call_id` distinguishes repeated calls within one run so a stochastic
  /// generator draws independent samples; at temperature 0 it has no effect.
  virtual Answer generate(std::string_view question, const KnowledgeGraph& kg, std::uint64_t call_id = 0) = 0;

  /// Free-form completion without graph context (used for rephrasing).
  virtual std::string complete(std::string_view prompt, std::uint64_t call_id = 0) = 0;

  virtual const GeneratorConfig& config() const = 0;
};

/// Test double mirroring a retrieval-bound model.
///
/// A triple is cited when its subject or object contains, case-insensitively,
/// any question token of length >= 4. At temperature 0 the answer is the cited
/// triples as "subject predicate object." sentences in index order. Above
/// temperature 0 the cited list is shuffled and truncated using a stream
/// keyed by (seed, call_id, question, temperature). With nothing cited the
/// answer is "I do not know.".
class MockGenerator final : public Generator {
 public:
  explicit MockGenerator(GeneratorConfig cfg);

  Answer generate(std::string_view question, const KnowledgeGraph& kg, std::uint64_t call_id = 0) override;
  std::string complete(std::string_view prompt, std::uint64_t call_id = 0) override;
  const GeneratorConfig& config() const override { return cfg_; }

 private:
  GeneratorConfig cfg_;
};

/// Indices of the triples the mock generator cites for `question`.
std::vector<std::size_t> mock_cited_triples(std::string_view question, const KnowledgeGraph& kg);

/// Chat-completion client (OpenAI wire format).
class RemoteGenerator final : public Generator {
 public:
  explicit RemoteGenerator(GeneratorConfig cfg);

  Answer generate(std::string_view question, const KnowledgeGraph& kg, std::uint64_t call_id = 0) override;
  std::string complete(std::string_view prompt, std::uint64_t call_id = 0) override;
  const GeneratorConfig& config() const override { return cfg_; }

 private:
  GeneratorConfig cfg_;
};

std::unique_ptr<Generator> make_generator(const GeneratorConfig& cfg);

/// Convenience wrapper: make_generator(cfg)->generate(q, kg).
Answer generate(std::string_view question, const KnowledgeGraph& kg, const GeneratorConfig& cfg);

}  // namespace kgsmile
