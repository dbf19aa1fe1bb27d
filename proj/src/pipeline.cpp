#include "kgsmile/pipeline.hpp"

namespace kgsmile {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

FidelityReport surrogate_fidelity(const DesignMatrix& design, const SurrogateFit& fit) {
  const Eigen::VectorXd pred = fit.predict(design.x);
  return fidelity(std::span<const double>(design.y.data(), static_cast<std::size_t>(design.y.size())),
                  std::span<const double>(pred.data(), static_cast<std::size_t>(pred.size())),
                  std::span<const double>(design.w.data(), static_cast<std::size_t>(design.w.size())), design.cols());
}

Explanation explain(const KnowledgeGraph& kg, std::string_view question, const PipelineConfig& cfg,
                    Generator& generator, Embedder& embedder) {
  Explanation ex;
  auto t0 = Clock::now();
  ex.run = run_perturbations(kg, question, generator, embedder, cfg.perturbation, cfg.similarity);
  ex.times.perturb_generate_s = seconds_since(t0);

  t0 = Clock::now();
  DesignOptions opts = cfg.design;
  opts.metric = cfg.similarity.text_metric;
  ex.design = build_design(ex.run, opts);
  ex.fit = fit(ex.design, cfg.surrogate);
  ex.report = attribute(ex.fit, kg);
  ex.times.fit_s = seconds_since(t0);

  t0 = Clock::now();
  ex.fidelity = surrogate_fidelity(ex.design, ex.fit);
  ex.times.evaluate_s = seconds_since(t0);
  return ex;
}

Explanation explain(const KnowledgeGraph& kg, std::string_view question, const PipelineConfig& cfg) {
  auto gen = make_generator(cfg.generator);
  auto emb = make_embedder(cfg.embedder);
  return explain(kg, question, cfg, *gen, *emb);
}

}  // namespace kgsmile
