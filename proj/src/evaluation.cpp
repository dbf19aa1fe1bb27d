#include "kgsmile/evaluation.hpp"

#include <algorithm>

#include "kgsmile/error.hpp"

namespace kgsmile {

std::size_t default_stability_top_k(const std::set<std::string>& ground_truth) {
  return ground_truth.empty() ? kDefaultStabilityTopK : ground_truth.size();
}

StabilityReport stability_run(const KnowledgeGraph& kg, std::string_view question, const Triple& injected,
                              const PipelineConfig& cfg, std::size_t top_k) {
  if (kg.contains_fact(injected)) throw Error(ErrorKind::Contract, "injected triple is already in the graph");
  if (top_k == 0) throw Error(ErrorKind::Contract, "top_k must be positive");
  const KnowledgeGraph augmented = kg.with_triple(injected.subject, injected.predicate, injected.object);

  const auto before = explain(kg, question, cfg);
  const auto after = explain(augmented, question, cfg);

  StabilityReport rep;
  rep.injected = augmented.triples().back();
  rep.top_k = top_k;
  for (auto& id : before.report.top_nodes(top_k)) rep.original_nodes.insert(std::move(id));
  for (auto& id : after.report.top_nodes(top_k)) rep.perturbed_nodes.insert(std::move(id));
  rep.jaccard = jaccard(rep.original_nodes, rep.perturbed_nodes);
  return rep;
}

ConsistencyReport consistency(const std::vector<KnowledgeGraph>& parts, std::string_view question, std::size_t runs,
                              const PipelineConfig& cfg) {
  if (runs < 2) throw Error(ErrorKind::Contract, "consistency needs at least 2 runs");
  ConsistencyReport rep;
  rep.runs = runs;
  auto embedder = make_embedder(cfg.embedder);

  for (std::size_t p = 0; p < parts.size(); ++p) {
    PartConsistency pc;
    pc.part_id = p + 1;
    EmbeddingVector first;
    for (std::size_t r = 0; r < runs; ++r) {
      PipelineConfig run_cfg = cfg;
      run_cfg.generator.seed = cfg.generator.seed + r;
      auto gen = make_generator(run_cfg.generator);
      const auto ex = explain(parts[p], question, run_cfg, *gen, *embedder);
      if (r == 0) first = ex.run.original_text_embedding;
      pc.answer_cosines.push_back(cosine(first, ex.run.original_text_embedding));
      pc.scores.push_back(ex.report.triple_scores);
    }
    pc.answer_cosine_stddev = population_stddev(pc.answer_cosines);
    const std::size_t n_triples = pc.scores.front().size();
    std::vector<double> column(runs);
    for (std::size_t k = 0; k < n_triples; ++k) {
      for (std::size_t r = 0; r < runs; ++r) column[r] = pc.scores[r][k];
      pc.score_stddev.push_back(population_stddev(column));
    }
    pc.max_score_stddev =
        pc.score_stddev.empty() ? 0.0 : *std::max_element(pc.score_stddev.begin(), pc.score_stddev.end());
    rep.parts.push_back(std::move(pc));
  }
  return rep;
}

double node_auc(const AttributionReport& report, const KnowledgeGraph& kg, const std::set<std::string>& ground_truth) {
  std::vector<double> scores;
  std::vector<bool> labels;
  for (const auto& e : kg.entities()) {
    auto it = report.node_scores.find(e.id());
    scores.push_back(it == report.node_scores.end() ? 0.0 : it->second);
    labels.push_back(ground_truth.contains(e.id()));
  }
  return roc_auc(scores, labels);
}

AccuracyReport accuracy(const KnowledgeGraph& kg, const std::vector<QAItem>& items, const PipelineConfig& cfg) {
  AccuracyReport rep;
  rep.temperature = cfg.generator.temperature;
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& item : items) {
    QuestionAccuracy qa;
    qa.question = item.question;
    const auto missing = unknown_ground_truth(item, kg);
    if (!missing.empty()) qa.note = std::to_string(missing.size()) + " ground-truth node(s) not in graph";
    const auto ex = explain(kg, item.question, cfg);
    try {
      qa.auc = node_auc(ex.report, kg, item.ground_truth_nodes);
      sum += *qa.auc;
      ++defined;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Undefined) throw;
      qa.note = e.what();
    }
    rep.questions.push_back(std::move(qa));
  }
  if (defined > 0) rep.mean_auc = sum / static_cast<double>(defined);
  return rep;
}

}  // namespace kgsmile
