#include "kgsmile/reasoning.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "kgsmile/error.hpp"
#include "kgsmile/similarity.hpp"

namespace kgsmile {

namespace {

constexpr std::string_view kSeedVerbs[] = {"bind", "relate", "associate", "interact"};

std::string relation_stem(const Relation& r) {
  std::string s = to_lower_ascii(r.label());
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

}  // namespace

ExtractedTerms extract_entities_relations(std::string_view question, const KnowledgeGraph& kg) {
  const std::string q = to_lower_ascii(question);

  std::vector<const Entity*> candidates;
  for (const auto& e : kg.entities()) candidates.push_back(&e);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Entity* a, const Entity* b) { return a->id().size() > b->id().size(); });

  std::vector<bool> consumed(q.size(), false);
  std::set<Entity> matched;
  for (const Entity* e : candidates) {
    const std::string needle = to_lower_ascii(e->id());
    for (auto pos = q.find(needle); pos != std::string::npos; pos = q.find(needle, pos + 1)) {
      const bool free = std::none_of(consumed.begin() + static_cast<std::ptrdiff_t>(pos),
                                     consumed.begin() + static_cast<std::ptrdiff_t>(pos + needle.size()),
                                     [](bool b) { return b; });
      if (!free) continue;
      std::fill(consumed.begin() + static_cast<std::ptrdiff_t>(pos),
                consumed.begin() + static_cast<std::ptrdiff_t>(pos + needle.size()), true);
      matched.insert(*e);
      break;
    }
  }

  ExtractedTerms out;
  for (const auto& t : kg.triples()) {
    for (const Entity* e : {&t.subject, &t.object}) {
      if (matched.contains(*e) && std::find(out.entities.begin(), out.entities.end(), *e) == out.entities.end())
        out.entities.push_back(*e);
    }
  }
  for (const auto& r : kg.relations())
    if (q.find(relation_stem(r)) != std::string::npos) out.relations.push_back(r.label());
  for (auto verb : kSeedVerbs)
    if (q.find(verb) != std::string::npos &&
        std::find(out.relations.begin(), out.relations.end(), verb) == out.relations.end())
      out.relations.emplace_back(verb);
  return out;
}

std::vector<Entity> ReasoningChain::entities() const {
  std::vector<Entity> out;
  if (steps.empty()) return out;
  out.push_back(steps.front().from);
  for (const auto& s : steps) out.push_back(s.to);
  return out;
}

std::vector<std::string> ReasoningChain::rendered_lines() const {
  std::vector<std::string> out;
  for (const auto& s : steps) {
    std::string rel = s.triple.predicate.label();
    std::replace(rel.begin(), rel.end(), '_', ' ');
    out.push_back(s.from.id() + " → [" + rel + "] → " + s.to.id());
  }
  return out;
}

bool ReasoningChain::linked_in(const KnowledgeGraph& kg) const {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    if (!kg.contains_fact(s.triple)) return false;
    const bool forward = s.triple.subject == s.from && s.triple.object == s.to;
    const bool backward = s.triple.object == s.from && s.triple.subject == s.to;
    if (!forward && !backward) return false;
    if (i > 0 && !s.triple.touches(steps[i - 1].to)) return false;
  }
  return true;
}

ReasoningChain generate_chain_of_thought(const KnowledgeGraph& kg, std::string_view question, std::size_t max_depth) {
  const auto terms = extract_entities_relations(question, kg);
  ReasoningChain chain;
  if (terms.entities.empty()) return chain;

  const std::set<Entity> extracted(terms.entities.begin(), terms.entities.end());
  std::set<Entity> visited{terms.entities.front()};
  std::vector<bool> used(kg.size(), false);
  Entity tail = terms.entities.front();

  while (chain.size() < max_depth) {
    const Triple* preferred = nullptr;
    const Triple* fallback = nullptr;
    for (const auto& t : kg.triples()) {
      if (used[t.index] || !t.touches(tail)) continue;
      const Entity& other = t.subject == tail ? t.object : t.subject;
      if (visited.contains(other)) continue;
      if (!fallback) fallback = &t;
      if (extracted.contains(other)) {
        preferred = &t;
        break;
      }
    }
    const Triple* step = preferred ? preferred : fallback;
    if (!step) break;
    used[step->index] = true;
    const Entity next = step->subject == tail ? step->object : step->subject;
    chain.steps.push_back(ChainStep{*step, tail, next});
    visited.insert(next);
    tail = next;
  }
  return chain;
}

std::string format_triples_for_prompt(const ReasoningChain& chain) {
  std::string out;
  const auto lines = chain.rendered_lines();
  for (std::size_t i = 0; i < lines.size(); ++i) out += "Step " + std::to_string(i + 1) + ": " + lines[i] + "\n";
  out += kChainInstruction;
  return out;
}

// --- pre-prompt -----------------------------------------------------------

void PrePromptConfig::validate() const {
  if (num_rephrases == 0) throw Error(ErrorKind::Contract, "num_rephrases must be positive");
  if (refusal_patterns.empty()) throw Error(ErrorKind::Contract, "refusal pattern list is empty");
}

bool is_refusal(std::string_view answer, const PrePromptConfig& cfg) {
  const std::string a = to_lower_ascii(answer);
  return std::any_of(cfg.refusal_patterns.begin(), cfg.refusal_patterns.end(),
                     [&](const std::string& p) { return a.find(to_lower_ascii(p)) != std::string::npos; });
}

namespace {

std::string question_subject(std::string_view question) {
  std::string q = trim(question);
  while (!q.empty() && (q.back() == '?' || q.back() == '.' || q.back() == '!')) q.pop_back();
  const std::string lower = to_lower_ascii(q);
  for (std::string_view lead : {"what is ", "what are ", "what does ", "what do "}) {
    if (lower.starts_with(lead)) return trim(std::string_view(q).substr(lead.size()));
  }
  return q;
}

}  // namespace

std::vector<std::string> TemplateRephraser::rephrase(std::string_view question, std::size_t count) {
  static const std::vector<std::pair<std::string, std::string>> templates = {
      {"Define ", ""},
      {"Explain ", ""},
      {"What is known about ", "?"},
      {"Describe ", ""},
      {"Summarize the facts about ", ""},
      {"Tell me about ", ""},
      {"What do we know about ", "?"},
      {"Give details on ", ""},
  };
  const std::string x = question_subject(question);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& [head, tail] = templates[i % templates.size()];
    std::string v = head + x + tail;
    if (i >= templates.size()) v += " (variant " + std::to_string(i + 1) + ")";
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::string> GeneratorRephraser::rephrase(std::string_view question, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::string prompt = "Rephrase the following question so it keeps its meaning but uses different wording "
                               "(variant " + std::to_string(i + 1) + "). Reply with the question only.\n" +
                               std::string(question);
    std::string v = trim(gen_.complete(prompt, i + 1));
    out.push_back(v.empty() ? std::string(question) : std::move(v));
  }
  return out;
}

std::size_t medoid_index(const std::vector<KeptAnswer>& answers, Embedder& embedder) {
  if (answers.empty()) throw Error(ErrorKind::Contract, "medoid of an empty set");
  if (answers.size() == 1) return 0;
  std::vector<EmbeddingVector> emb;
  for (const auto& a : answers) emb.push_back(embedder.embed(a.answer.text));

  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < answers.size(); ++j)
      if (j != i) acc += mapped_cosine(cosine(emb[i], emb[j]));
    const double mean = acc / static_cast<double>(answers.size() - 1);
    if (mean > best_score || (mean == best_score && answers[i].variant < answers[best].variant)) {
      best = i;
      best_score = mean;
    }
  }
  return best;
}

PrePromptResult preprompt_answer(std::string_view question, const KnowledgeGraph& kg, Generator& generator,
                                 Rephraser& rephraser, Embedder& embedder, const PrePromptConfig& cfg) {
  cfg.validate();
  PrePromptResult res;
  res.variants = rephraser.rephrase(question, cfg.num_rephrases);
  for (std::size_t i = 0; i < res.variants.size(); ++i) {
    Answer a = generator.generate(res.variants[i], kg, i + 1);
    if (is_refusal(a.text, cfg)) {
      ++res.dropped;
      continue;
    }
    res.kept.push_back(KeptAnswer{i, res.variants[i], std::move(a)});
  }
  if (res.kept.empty()) {
    res.final_answer.text = kRefusal;
    res.final_answer.generator_kind = generator.config().kind;
    return res;
  }
  const std::size_t m = medoid_index(res.kept, embedder);
  res.final_answer = res.kept[m].answer;
  res.medoid_variant = res.kept[m].variant;
  return res;
}

}  // namespace kgsmile
