#include "kgsmile/graph.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>

#include <json.hpp>

#include "kgsmile/error.hpp"

namespace kgsmile {

using json = nlohmann::json;

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Field: return "field";
    case ErrorKind::EmptyGraph: return "empty-graph";
    case ErrorKind::UnknownEntity: return "unknown-entity";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Contract: return "contract";
    case ErrorKind::TooSmall: return "too-small-graph";
    case ErrorKind::Undefined: return "undefined";
    case ErrorKind::Remote: return "remote";
    case ErrorKind::Invariant: return "invariant";
  }
  return "unknown";
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

Entity::Entity(std::string_view id) : id_(trim(id)) {
  if (id_.empty()) throw Error(ErrorKind::Contract, "entity id is empty");
}

Relation::Relation(std::string_view label) : label_(trim(label)) {
  if (label_.empty()) throw Error(ErrorKind::Contract, "relation label is empty");
}

Triple make_triple(std::string_view s, std::string_view p, std::string_view o) {
  return Triple{Entity(s), Relation(p), Entity(o)};
}

KnowledgeGraph::KnowledgeGraph(std::vector<Triple> triples) {
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  triples_.reserve(triples.size());
  for (auto& t : triples) {
    if (!seen.emplace(t.subject.id(), t.predicate.label(), t.object.id()).second) {
      ++duplicates_dropped_;
      continue;
    }
    triples_.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < triples_.size(); ++i) {
    triples_[i].index = i;
    entities_.insert(triples_[i].subject);
    entities_.insert(triples_[i].object);
    relations_.insert(triples_[i].predicate);
  }
}

bool KnowledgeGraph::contains_fact(const Triple& t) const {
  return std::any_of(triples_.begin(), triples_.end(), [&](const Triple& x) { return x.same_fact(t); });
}

KnowledgeGraph KnowledgeGraph::rebased() const {
  auto copy = triples_;
  for (auto& t : copy) t.origin = t.index;
  KnowledgeGraph out(std::move(copy));
  out.duplicates_dropped_ = duplicates_dropped_;
  return out;
}

KnowledgeGraph KnowledgeGraph::with_triple(const Entity& s, const Relation& p, const Entity& o) const {
  auto copy = triples_;
  Triple t{s, p, o};
  t.origin = triples_.size();
  copy.push_back(std::move(t));
  return KnowledgeGraph(std::move(copy));
}

bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a.triples_[i].same_fact(b.triples_[i])) return false;
  return true;
}

// --- file formats ---------------------------------------------------------

namespace {

json parse_document(std::string_view bytes) {
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.byte, e.what());
  }
}

std::string required_string(const json& obj, std::size_t i, const char* key) {
  const std::string path = "[" + std::to_string(i) + "]." + key;
  auto it = obj.find(key);
  if (it == obj.end()) throw FieldError(path, "required field missing");
  if (!it->is_string()) throw FieldError(path, "expected a string");
  auto value = trim(it->get<std::string>());
  if (value.empty()) throw FieldError(path, "must not be empty");
  return value;
}

}  // namespace

KnowledgeGraph parse_triples(std::string_view bytes) {
  const json doc = parse_document(bytes);
  if (!doc.is_array()) throw FieldError("$", "expected a top-level array");
  std::vector<Triple> triples;
  triples.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    if (!rec.is_object()) throw FieldError("[" + std::to_string(i) + "]", "expected an object");
    Triple t = make_triple(required_string(rec, i, "subject"), required_string(rec, i, "predicate"),
                           required_string(rec, i, "object"));
    t.origin = triples.size();
    triples.push_back(std::move(t));
  }
  if (triples.empty()) throw Error(ErrorKind::EmptyGraph, "triple list is empty");
  KnowledgeGraph kg(std::move(triples));
  // origin follows the deduplicated order
  return kg.rebased();
}

std::vector<QAItem> parse_qa(std::string_view bytes) {
  const json doc = parse_document(bytes);
  if (!doc.is_array()) throw FieldError("$", "expected a top-level array");
  std::vector<QAItem> items;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    const std::string at = "[" + std::to_string(i) + "]";
    if (!rec.is_object()) throw FieldError(at, "expected an object");
    QAItem item;
    item.question = required_string(rec, i, "question");
    if (auto it = rec.find("answer"); it != rec.end()) {
      if (!it->is_string()) throw FieldError(at + ".answer", "expected a string");
      item.reference_answer = it->get<std::string>();
      item.has_reference_answer = true;
    }
    if (auto it = rec.find("ground_truth_nodes"); it != rec.end()) {
      if (!it->is_array()) throw FieldError(at + ".ground_truth_nodes", "expected an array");
      for (std::size_t j = 0; j < it->size(); ++j) {
        const auto& v = (*it)[j];
        if (!v.is_string())
          throw FieldError(at + ".ground_truth_nodes[" + std::to_string(j) + "]", "expected a string");
        item.ground_truth_nodes.insert(trim(v.get<std::string>()));
      }
    }
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<std::string> unknown_ground_truth(const QAItem& item, const KnowledgeGraph& kg) {
  std::vector<std::string> missing;
  for (const auto& id : item.ground_truth_nodes)
    if (id.empty() || !kg.contains(Entity(id))) missing.push_back(id);
  return missing;
}

std::string write_triples_json(const KnowledgeGraph& kg) {
  json doc = json::array();
  for (const auto& t : kg.triples())
    doc.push_back({{"subject", t.subject.id()}, {"predicate", t.predicate.label()}, {"object", t.object.id()}});
  return doc.dump(2) + "\n";
}

// --- filtering ------------------------------------------------------------

FilterConfig FilterConfig::normalized() const {
  if (core_weight < 0 || secondary_weight < 0)
    throw Error(ErrorKind::Contract, "filter weights must be non-negative");
  FilterConfig out = *this;
  auto lower_all = [](std::vector<std::string>& v) {
    for (auto& s : v) s = to_lower_ascii(trim(s));
    std::erase_if(v, [](const std::string& s) { return s.empty(); });
  };
  lower_all(out.core_terms);
  lower_all(out.secondary_terms);
  return out;
}

namespace {

bool is_word_byte(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool term_occurs(std::string_view hay, std::string_view term, TermMatch mode) {
  if (term.empty()) return false;
  for (auto pos = hay.find(term); pos != std::string_view::npos; pos = hay.find(term, pos + 1)) {
    if (mode == TermMatch::Substring) return true;
    const bool left_ok = pos == 0 || !is_word_byte(hay[pos - 1]);
    const auto end = pos + term.size();
    const bool right_ok = end == hay.size() || !is_word_byte(hay[end]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

}  // namespace

double score_triple(const Triple& t, const FilterConfig& raw) {
  const FilterConfig cfg = raw.normalized();
  const std::string text =
      to_lower_ascii(t.subject.id() + " " + t.predicate.label() + " " + t.object.id());
  auto count = [&](const std::vector<std::string>& terms) {
    std::set<std::string> distinct(terms.begin(), terms.end());
    return static_cast<double>(std::count_if(distinct.begin(), distinct.end(), [&](const std::string& term) {
      return term_occurs(text, term, cfg.match);
    }));
  };
  return cfg.core_weight * count(cfg.core_terms) + cfg.secondary_weight * count(cfg.secondary_terms);
}

KnowledgeGraph filter_graph(const KnowledgeGraph& kg, const FilterConfig& cfg) {
  const FilterConfig norm = cfg.normalized();
  std::vector<Triple> kept;
  for (const auto& t : kg.triples())
    if (score_triple(t, norm) >= norm.min_score) kept.push_back(t);
  if (kept.empty()) throw Error(ErrorKind::EmptyGraph, "no triple reaches the minimum filter score");
  return KnowledgeGraph(std::move(kept));
}

// --- connectivity ---------------------------------------------------------

namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<KnowledgeGraph> connected_components(const KnowledgeGraph& kg) {
  std::map<Entity, std::size_t> node_id;
  for (const auto& e : kg.entities()) node_id.emplace(e, node_id.size());
  DisjointSet ds(node_id.size());
  for (const auto& t : kg.triples()) ds.unite(node_id.at(t.subject), node_id.at(t.object));

  std::map<std::size_t, std::vector<Triple>> groups;
  for (const auto& t : kg.triples()) groups[ds.find(node_id.at(t.subject))].push_back(t);

  std::vector<std::vector<Triple>> ordered;
  for (auto& [root, ts] : groups) ordered.push_back(std::move(ts));
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.front().index < b.front().index;
  });

  std::vector<KnowledgeGraph> out;
  out.reserve(ordered.size());
  for (auto& ts : ordered) {
    for (auto& t : ts) t.origin = t.index;
    out.emplace_back(std::move(ts));
  }
  return out;
}

KnowledgeGraph select_top_components(const std::vector<KnowledgeGraph>& components, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::Contract, "k must be at least 1");
  std::vector<Triple> merged;
  for (std::size_t c = 0; c < std::min(k, components.size()); ++c)
    merged.insert(merged.end(), components[c].triples().begin(), components[c].triples().end());
  std::sort(merged.begin(), merged.end(), [](const Triple& a, const Triple& b) { return a.origin < b.origin; });
  return KnowledgeGraph(std::move(merged));
}

std::vector<Part> partition(const KnowledgeGraph& kg, std::size_t parts) {
  const std::size_t n = kg.size();
  if (parts == 0) throw Error(ErrorKind::Contract, "parts must be at least 1");
  if (parts > n)
    throw Error(ErrorKind::Contract,
                "cannot split " + std::to_string(n) + " triples into " + std::to_string(parts) + " parts");
  std::vector<Part> out;
  const std::size_t base = n / parts, extra = n % parts;
  std::size_t begin = 0;
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t len = base + (p < extra ? 1 : 0);
    out.push_back(Part{p + 1, begin, begin + len});
    begin += len;
  }
  return out;
}

KnowledgeGraph slice(const KnowledgeGraph& kg, const Part& part) {
  if (part.end > kg.size() || part.begin > part.end) throw Error(ErrorKind::Shape, "part range outside graph");
  std::vector<Triple> ts(kg.triples().begin() + static_cast<std::ptrdiff_t>(part.begin),
                         kg.triples().begin() + static_cast<std::ptrdiff_t>(part.end));
  for (auto& t : ts) t.origin = t.index;
  return KnowledgeGraph(std::move(ts));
}

// --- paths ----------------------------------------------------------------

bool ReasoningPath::valid_in(const KnowledgeGraph& kg) const {
  if (relations.empty() || entities.size() != relations.size() + 1) return false;
  for (std::size_t i = 0; i < relations.size(); ++i) {
    const auto& a = entities[i];
    const auto& b = entities[i + 1];
    const bool found = std::any_of(kg.triples().begin(), kg.triples().end(), [&](const Triple& t) {
      return t.predicate == relations[i] &&
             ((t.subject == a && t.object == b) || (t.subject == b && t.object == a));
    });
    if (!found) return false;
  }
  return true;
}

std::vector<ReasoningPath> find_reasoning_paths(const KnowledgeGraph& kg, const Entity& start,
                                                const RelationPath& z, std::size_t max_paths) {
  if (!kg.contains(start)) throw Error(ErrorKind::UnknownEntity, "entity not in graph: " + start.id());
  if (z.relations.empty()) throw Error(ErrorKind::Contract, "relation path must have length >= 1");

  std::vector<ReasoningPath> found;
  ReasoningPath cur;
  cur.entities.push_back(start);

  auto dfs = [&](auto&& self, std::size_t depth) -> void {
    if (depth == z.relations.size()) {
      found.push_back(cur);
      return;
    }
    const Entity tail = cur.entities.back();
    for (const auto& t : kg.triples()) {
      if (t.predicate != z.relations[depth] || !t.touches(tail)) continue;
      // a self-loop would revisit the tail
      const Entity& next = t.subject == tail ? t.object : t.subject;
      if (std::find(cur.entities.begin(), cur.entities.end(), next) != cur.entities.end()) continue;
      cur.entities.push_back(next);
      cur.relations.push_back(t.predicate);
      cur.triple_indices.push_back(t.index);
      self(self, depth + 1);
      cur.entities.pop_back();
      cur.relations.pop_back();
      cur.triple_indices.pop_back();
    }
  };
  dfs(dfs, 0);

  std::sort(found.begin(), found.end(), [](const ReasoningPath& a, const ReasoningPath& b) {
    if (a.entities != b.entities) return a.entities < b.entities;
    return a.triple_indices < b.triple_indices;
  });
  if (found.size() > max_paths) found.resize(max_paths);
  return found;
}

}  // namespace kgsmile
