#include "kgsmile/generator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "http.hpp"
#include "kgsmile/embedding.hpp"
#include "kgsmile/error.hpp"
#include "kgsmile/random.hpp"

namespace kgsmile {

void GeneratorConfig::validate() const {
  if (!std::isfinite(temperature) || temperature < 0.0 || temperature > 2.0)
    throw Error(ErrorKind::Contract, "temperature must lie in [0, 2]");
  if (max_tokens == 0) throw Error(ErrorKind::Contract, "max_tokens must be positive");
  if (kind == GeneratorKind::Remote && (endpoint.empty() || model_id.empty()))
    throw Error(ErrorKind::Contract, "remote generator needs an endpoint and a model id");
}

std::string build_prompt(std::string_view question, const KnowledgeGraph& kg, std::string_view preamble) {
  std::string out;
  if (!preamble.empty()) {
    out += preamble;
    out += '\n';
  }
  for (const auto& t : kg.triples()) out += t.subject.id() + " -[" + t.predicate.label() + "]-> " + t.object.id() + "\n";
  if (!out.empty()) out += '\n';
  out += "Question: ";
  out += question;
  return out;
}

std::vector<std::size_t> mock_cited_triples(std::string_view question, const KnowledgeGraph& kg) {
  std::vector<std::string> keys;
  for (auto& tok : tokenize(question))
    if (tok.size() >= 4) keys.push_back(std::move(tok));
  std::vector<std::size_t> cited;
  if (keys.empty()) return cited;
  for (const auto& t : kg.triples()) {
    const auto s = to_lower_ascii(t.subject.id());
    const auto o = to_lower_ascii(t.object.id());
    const bool hit = std::any_of(keys.begin(), keys.end(), [&](const std::string& k) {
      return s.find(k) != std::string::npos || o.find(k) != std::string::npos;
    });
    if (hit) cited.push_back(t.index);
  }
  return cited;
}

MockGenerator::MockGenerator(GeneratorConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

Answer MockGenerator::generate(std::string_view question, const KnowledgeGraph& kg, std::uint64_t call_id) {
  Answer ans;
  ans.generator_kind = GeneratorKind::Mock;
  ans.prompt_used = build_prompt(question, kg);

  auto cited = mock_cited_triples(question, kg);
  if (cited.empty()) {
    ans.text = kRefusal;
    return ans;
  }
  if (cfg_.temperature > 0.0) {
    std::uint64_t key = combine(cfg_.seed, call_id);
    key = combine(key, fnv1a64(question));
    key = combine(key, std::bit_cast<std::uint64_t>(cfg_.temperature));
    const CounterStream stream(key);
    std::uint64_t counter = 0;
    for (std::size_t i = cited.size(); i > 1; --i) std::swap(cited[i - 1], cited[stream.below(counter++, i)]);
    cited.resize(1 + stream.below(counter++, cited.size()));
  }
  for (std::size_t idx : cited) {
    const auto& t = kg.triples()[idx];
    if (!ans.text.empty()) ans.text += ' ';
    ans.text += t.subject.id() + " " + t.predicate.label() + " " + t.object.id() + ".";
  }
  return ans;
}

std::string MockGenerator::complete(std::string_view prompt, std::uint64_t) { return std::string(prompt); }

RemoteGenerator::RemoteGenerator(GeneratorConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.kind = GeneratorKind::Remote;
  cfg_.validate();
}

std::string RemoteGenerator::complete(std::string_view prompt, std::uint64_t) {
  const nlohmann::json body = {
      {"model", cfg_.model_id},
      {"temperature", cfg_.temperature},
      {"top_p", 1},
      {"max_tokens", cfg_.max_tokens},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::string(prompt)}}})},
  };
  const auto res = detail::post_json(cfg_.endpoint, body, cfg_.timeout);
  try {
    const auto& content = res.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Remote, std::string("malformed chat response: ") + e.what());
  }
}

Answer RemoteGenerator::generate(std::string_view question, const KnowledgeGraph& kg, std::uint64_t call_id) {
  Answer ans;
  ans.generator_kind = GeneratorKind::Remote;
  ans.prompt_used = build_prompt(question, kg);
  ans.text = complete(ans.prompt_used, call_id);
  ans.empty_warning = ans.text.empty();
  return ans;
}

std::unique_ptr<Generator> make_generator(const GeneratorConfig& cfg) {
  if (cfg.kind == GeneratorKind::Remote) return std::make_unique<RemoteGenerator>(cfg);
  return std::make_unique<MockGenerator>(cfg);
}

Answer generate(std::string_view question, const KnowledgeGraph& kg, const GeneratorConfig& cfg) {
  return make_generator(cfg)->generate(question, kg);
}

}  // namespace kgsmile
