#include "kgsmile/perturbation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "kgsmile/error.hpp"
#include "kgsmile/random.hpp"

namespace kgsmile {

std::size_t PerturbationMask::removed() const noexcept {
  return static_cast<std::size_t>(std::count(keep.begin(), keep.end(), false));
}

bool PerturbationMask::valid() const noexcept {
  const auto r = removed();
  return r > 0 && r < keep.size();
}

void PerturbationConfig::validate() const {
  if (num_samples == 0) throw Error(ErrorKind::Contract, "num_samples must be positive");
  if (!(removal_prob > 0.0 && removal_prob < 1.0)) throw Error(ErrorKind::Contract, "removal_prob must lie in (0, 1)");
  if (generator_attempts == 0) throw Error(ErrorKind::Contract, "generator_attempts must be positive");
}

namespace {

PerturbationMask draw_mask(const CounterStream& stream, std::size_t n, double removal_prob) {
  PerturbationMask m;
  m.keep.resize(n);
  for (std::size_t j = 0; j < n; ++j) m.keep[j] = stream.uniform(j) >= removal_prob;
  return m;
}

}  // namespace

std::vector<PerturbationMask> sample_masks(std::size_t n_triples, const PerturbationConfig& cfg) {
  cfg.validate();
  if (n_triples < 2) throw Error(ErrorKind::TooSmall, "perturbation needs at least 2 triples");

  const CounterStream root(cfg.seed);
  std::vector<PerturbationMask> masks;
  masks.reserve(cfg.num_samples);
  for (std::size_t i = 0; i < cfg.num_samples; ++i) {
    const CounterStream sample_stream = root.substream(i);
    std::uint64_t attempt = 0;
    PerturbationMask mask;
    for (std::size_t dup_round = 0;; ++dup_round) {
      std::size_t redraws = 0;
      do {
        mask = draw_mask(sample_stream.substream(attempt++), n_triples, cfg.removal_prob);
      } while (!mask.valid() && ++redraws <= kMaxInvariantRedraws);
      if (!mask.valid()) mask.keep[0] = !mask.keep[0];

      const bool duplicate = std::find(masks.begin(), masks.end(), mask) != masks.end();
      if (cfg.allow_duplicates || !duplicate || dup_round >= kMaxDuplicateRedraws) break;
    }
    masks.push_back(std::move(mask));
  }
  return masks;
}

KnowledgeGraph apply_mask(const KnowledgeGraph& kg, const PerturbationMask& mask) {
  if (mask.size() != kg.size())
    throw Error(ErrorKind::Shape, "mask length " + std::to_string(mask.size()) + " does not match " +
                                      std::to_string(kg.size()) + " triples");
  if (mask.removed() == mask.size()) throw Error(ErrorKind::Invariant, "mask removes every triple");
  std::vector<Triple> kept;
  for (const auto& t : kg.triples()) {
    if (!mask.keep[t.index]) continue;
    Triple c = t;
    c.origin = t.index;
    kept.push_back(std::move(c));
  }
  return KnowledgeGraph(std::move(kept));
}

namespace {

Answer generate_with_retry(Generator& gen, std::string_view q, const KnowledgeGraph& kg, std::uint64_t call_id,
                           std::size_t attempts) {
  for (std::size_t a = 1;; ++a) {
    try {
      return gen.generate(q, kg, call_id);
    } catch (const Error& e) {
      if (!e.retryable() || a >= attempts) throw;
    }
  }
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  auto body = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) body(i);
      });
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), "perturbation sample " + std::to_string(i) + ": " + e.what());
    }
  }
}

}  // namespace

PerturbationRun run_perturbations(const KnowledgeGraph& kg, std::string_view question, Generator& generator,
                                  Embedder& embedder, const PerturbationConfig& pert_cfg,
                                  const SimilarityConfig& sim_cfg) {
  sim_cfg.validate();
  const auto masks = sample_masks(kg.size(), pert_cfg);

  PerturbationRun run;
  run.config = pert_cfg;
  run.similarity = sim_cfg;
  run.original_answer = generate_with_retry(generator, question, kg, 0, pert_cfg.generator_attempts);
  run.original_text_embedding = embedder.embed(run.original_answer.text);
  run.original_graph_embedding = embed_graph(kg, embedder);

  run.samples.resize(masks.size());
  parallel_for(masks.size(), pert_cfg.workers, [&](std::size_t i) {
    PerturbationSample& s = run.samples[i];
    s.mask = masks[i];
    const KnowledgeGraph perturbed = apply_mask(kg, s.mask);
    s.answer = generate_with_retry(generator, question, perturbed, i + 1, pert_cfg.generator_attempts);

    const EmbeddingVector text_emb = embedder.embed(s.answer.text);
    const EmbeddingVector graph_emb = embed_graph(perturbed, embedder);
    if (text_emb.dim() != run.original_text_embedding.dim() || graph_emb.dim() != run.original_graph_embedding.dim())
      throw Error(ErrorKind::Contract, "embedding dimension changed during the run");

    s.text_scores = score_bundle(run.original_text_embedding, text_emb, sim_cfg);
    s.graph_similarity = cosine(run.original_graph_embedding, graph_emb);
    const double kernel_input =
        sim_cfg.kernel_mode == KernelMode::Distance ? mapped_cosine(s.graph_similarity) : s.graph_similarity;
    s.kernel_weight = kernel_weight(kernel_input, sim_cfg);
  });
  return run;
}

PerturbationRun run_perturbations(const KnowledgeGraph& kg, std::string_view question,
                                  const GeneratorConfig& gen_cfg, const EmbedderConfig& emb_cfg,
                                  const PerturbationConfig& pert_cfg, const SimilarityConfig& sim_cfg) {
  auto gen = make_generator(gen_cfg);
  auto emb = make_embedder(emb_cfg);
  return run_perturbations(kg, question, *gen, *emb, pert_cfg, sim_cfg);
}

}  // namespace kgsmile
