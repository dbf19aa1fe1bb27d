#pragma once

// Evaluation protocols that re-run the attribution pipeline: stability under
// triple injection, consistency across repeated runs, and node-level accuracy
// against ground-truth highlights.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kgsmile/graph.hpp"
#include "kgsmile/pipeline.hpp"

namespace kgsmile {

struct StabilityReport {
  Triple injected;
  double jaccard = 1.0;
  std::size_t top_k = 0;
  std::set<std::string> original_nodes;
  std::set<std::string> perturbed_nodes;
};

inline constexpr std::size_t kDefaultStabilityTopK = 5;

/// Attributes `kg` and `kg` plus `injected`, then compares the top-k node sets.
/// Throws Contract when the injected fact is already present.
StabilityReport stability_run(const KnowledgeGraph& kg, std::string_view question, const Triple& injected,
                              const PipelineConfig& cfg, std::size_t top_k);

/// Top-k size used when none is given: the ground-truth set size if known.
std::size_t default_stability_top_k(const std::set<std::string>& ground_truth);

struct PartConsistency {
  std::size_t part_id = 0;
  /// Cosine of each run's answer embedding to run 1's (first entry is run 1 itself).
  std::vector<double> answer_cosines;
  /// Attribution scores per run, indexed [run][triple].
  std::vector<std::vector<double>> scores;
  double answer_cosine_stddev = 0.0;
  std::vector<double> score_stddev;  // per triple
  double max_score_stddev = 0.0;
};

struct ConsistencyReport {
  std::size_t runs = 0;
  std::vector<PartConsistency> parts;
};

/// Runs the pipeline `runs` times per part. Run r uses generator seed
/// cfg.generator.seed + r; the perturbation masks stay fixed so the spread
/// reflects the generator alone.
ConsistencyReport consistency(const std::vector<KnowledgeGraph>& parts, std::string_view question, std::size_t runs,
                              const PipelineConfig& cfg);

struct QuestionAccuracy {
  std::string question;
  std::optional<double> auc;  // undefined when the labels are single-class
  std::string note;
};

struct AccuracyReport {
  double temperature = 0.0;
  std::vector<QuestionAccuracy> questions;
  std::optional<double> mean_auc;
};

/// Node-level AUC of attribution scores against `ground_truth` over every
/// entity of the graph.
double node_auc(const AttributionReport& report, const KnowledgeGraph& kg, const std::set<std::string>& ground_truth);

AccuracyReport accuracy(const KnowledgeGraph& kg, const std::vector<QAItem>& items, const PipelineConfig& cfg);

}  // namespace kgsmile
