#pragma once

#include <chrono>
#include <memory>

#include "kgsmile/embedding.hpp"
#include "kgsmile/generator.hpp"
#include "kgsmile/metrics.hpp"
#include "kgsmile/perturbation.hpp"
#include "kgsmile/similarity.hpp"
#include "kgsmile/surrogate.hpp"

namespace kgsmile {

struct PipelineConfig {
  GeneratorConfig generator;
  EmbedderConfig embedder;
  PerturbationConfig perturbation;
  SimilarityConfig similarity;
  DesignOptions design;
  SurrogateMethod surrogate = SurrogateMethod::Wls;
};

struct StageTimes {
  double perturb_generate_s = 0.0;
  double fit_s = 0.0;
  double evaluate_s = 0.0;
  double total() const noexcept { return perturb_generate_s + fit_s + evaluate_s; }
};

struct Explanation {
  PerturbationRun run;
  DesignMatrix design;
  SurrogateFit fit;
  AttributionReport report;
  /// Surrogate predictions scored against the observed similarities.
  FidelityReport fidelity;
  StageTimes times;
};

/// Perturb, fit and attribute one question against one graph.
Explanation explain(const KnowledgeGraph& kg, std::string_view question, const PipelineConfig& cfg);
Explanation explain(const KnowledgeGraph& kg, std::string_view question, const PipelineConfig& cfg,
                    Generator& generator, Embedder& embedder);

FidelityReport surrogate_fidelity(const DesignMatrix& design, const SurrogateFit& fit);

}  // namespace kgsmile
