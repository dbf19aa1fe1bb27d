#pragma once

// Evaluation formulas for attributions: surrogate fidelity, faithfulness
// correlation, explanation stability, ROC-AUC accuracy and the composite
// text similarity used for cross-model comparison.

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgsmile/embedding.hpp"

namespace kgsmile {

/// f = reference responses, g = surrogate (or perturbed) responses.
/// Optional fields are undefined for the given input (zero variance in f, or
/// too few samples for the adjusted coefficient).
struct FidelityReport {
  std::optional<double> r2;
  double mean_l1 = 0.0;
  double mean_l2 = 0.0;
  double weighted_l1 = 0.0;
  double weighted_l2 = 0.0;
  std::optional<double> r2w;
  std::optional<double> adj_r2w;
  double mean_loss = 0.0;
  std::size_t n_p = 0;
  std::size_t n_s = 0;
};

FidelityReport fidelity(std::span<const double> f, std::span<const double> g, std::span<const double> weights,
                        std::size_t n_s);

/// Pearson correlation; throws Undefined when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// |a ∩ b| / |a ∪ b|; two empty sets give 1.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

/// AUC as an exact fraction: (2 * concordant + ties) / (2 * positives * negatives).
struct AucFraction {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;
  double value() const noexcept { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};

AucFraction roc_auc_exact(std::span<const double> scores, const std::vector<bool>& labels);
double roc_auc(std::span<const double> scores, const std::vector<bool>& labels);

/// Population standard deviation (Welford), exactly 0 for identical values.
double population_stddev(std::span<const double> values);

enum class SimilarityClass { VeryLow, Low, Medium, High };

std::string_view to_string(SimilarityClass c) noexcept;
SimilarityClass classify_similarity(double composite) noexcept;

struct CompositeSimilarityResult {
  double semantic = 0.0;
  double concept_overlap = 0.0;
  double content = 0.0;
  double composite = 0.0;
  SimilarityClass classification = SimilarityClass::VeryLow;
};

/// Tokens of length >= 5 that are not stopwords.
std::set<std::string> key_concepts(std::string_view text);

CompositeSimilarityResult composite_similarity(std::string_view a, std::string_view b, Embedder& embedder);
CompositeSimilarityResult composite_similarity(std::string_view a, std::string_view b, const EmbedderConfig& cfg);

}  // namespace kgsmile
