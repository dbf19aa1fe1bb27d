#pragma once

// Knowledge-graph core: triples, entities, relations, and the structural
// operations (filtering, connectivity, partitioning, path search) used to
// prepare a working graph before attribution.

#include <compare>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace kgsmile {

/// Node label. Canonical form is the source text with surrounding whitespace
/// trimmed; equality is byte-equality.
class Entity {
 public:
  Entity() = default;
  explicit Entity(std::string_view id);

  const std::string& id() const noexcept { return id_; }

  friend auto operator<=>(const Entity&, const Entity&) = default;
  friend bool operator==(const Entity&, const Entity&) = default;

 private:
  std::string id_;
};

/// Edge label, same canonicalisation rules as Entity.
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::string_view label);

  const std::string& label() const noexcept { return label_; }

  friend auto operator<=>(const Relation&, const Relation&) = default;
  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  std::string label_;
};

struct Triple {
  Entity subject;
  Relation predicate;
  Entity object;
  /// Position inside the owning graph, 0..n-1.
  std::size_t index = 0;
  /// Position in the graph this one was derived from (mask, filter,
  /// component selection). Equals `index` for freshly parsed graphs.
  std::size_t origin = 0;

  bool same_fact(const Triple& other) const noexcept {
    return subject == other.subject && predicate == other.predicate && object == other.object;
  }
  bool touches(const Entity& e) const noexcept { return subject == e || object == e; }
};

/// Immutable set of triples with derived entity and relation sets.
///
/// Construction drops repeated (subject, predicate, object) facts, keeping the
/// first occurrence, and re-indexes the survivors contiguously. The number of
/// dropped duplicates is available from duplicates_dropped().
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  explicit KnowledgeGraph(std::vector<Triple> triples);

  const std::vector<Triple>& triples() const noexcept { return triples_; }
  const std::set<Entity>& entities() const noexcept { return entities_; }
  const std::set<Relation>& relations() const noexcept { return relations_; }
  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }
  std::size_t duplicates_dropped() const noexcept { return duplicates_dropped_; }

  bool contains(const Entity& e) const { return entities_.contains(e); }
  bool contains_fact(const Triple& t) const;

  /// Copy whose `origin` fields are reset to the current indices.
  KnowledgeGraph rebased() const;

  /// Graph with an extra triple appended (used for stability injection).
  KnowledgeGraph with_triple(const Entity& s, const Relation& p, const Entity& o) const;

  friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b);

 private:
  std::vector<Triple> triples_;
  std::set<Entity> entities_;
  std::set<Relation> relations_;
  std::size_t duplicates_dropped_ = 0;
};

Triple make_triple(std::string_view s, std::string_view p, std::string_view o);

// --- file formats ---------------------------------------------------------

struct QAItem {
  std::string question;
  std::string reference_answer;  // empty when absent
  bool has_reference_answer = false;
  std::set<std::string> ground_truth_nodes;
};

/// Parses a triples-json document (array of {"subject","predicate","object"}).
KnowledgeGraph parse_triples(std::string_view bytes);

/// Parses a qa-json document (array of {"question", "answer"?, "ground_truth_nodes"?}).
std::vector<QAItem> parse_qa(std::string_view bytes);

/// Ground-truth node ids that are not entities of `kg` (reported as warnings).
std::vector<std::string> unknown_ground_truth(const QAItem& item, const KnowledgeGraph& kg);

/// Serialises to the triples-json format accepted by parse_triples.
std::string write_triples_json(const KnowledgeGraph& kg);

// --- filtering ------------------------------------------------------------

enum class TermMatch { Substring, WholeWord };

struct FilterConfig {
  std::vector<std::string> core_terms;
  std::vector<std::string> secondary_terms;
  double core_weight = 2.0;
  double secondary_weight = 1.0;
  double min_score = 1.0;
  TermMatch match = TermMatch::Substring;

  /// Lowercases the term lists and checks weights; throws on invalid config.
  FilterConfig normalized() const;
};

double score_triple(const Triple& t, const FilterConfig& cfg);

/// Keeps triples scoring at least cfg.min_score. Throws EmptyGraph when
/// nothing survives.
KnowledgeGraph filter_graph(const KnowledgeGraph& kg, const FilterConfig& cfg);

// --- connectivity ---------------------------------------------------------

/// Undirected components, largest first; ties broken by smallest triple index.
std::vector<KnowledgeGraph> connected_components(const KnowledgeGraph& kg);

/// Union of the first min(k, count) components in original triple order.
KnowledgeGraph select_top_components(const std::vector<KnowledgeGraph>& components, std::size_t k);

struct Part {
  std::size_t id;     // 1-based
  std::size_t begin;  // first triple index
  std::size_t end;    // one past the last
  std::size_t size() const noexcept { return end - begin; }
};

std::vector<Part> partition(const KnowledgeGraph& kg, std::size_t parts);

/// Subgraph holding the triples of one partition range.
KnowledgeGraph slice(const KnowledgeGraph& kg, const Part& part);

// --- paths ----------------------------------------------------------------

struct RelationPath {
  std::vector<Relation> relations;
};

struct ReasoningPath {
  std::vector<Entity> entities;
  std::vector<Relation> relations;
  std::vector<std::size_t> triple_indices;

  /// Checks the length rule and that each hop is a triple of `kg` in either
  /// direction.
  bool valid_in(const KnowledgeGraph& kg) const;
};

std::vector<ReasoningPath> find_reasoning_paths(const KnowledgeGraph& kg, const Entity& start,
                                                const RelationPath& path, std::size_t max_paths);

// --- text helpers shared by several modules --------------------------------

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);

}  // namespace kgsmile
