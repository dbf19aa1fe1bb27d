#pragma once

// Scalar similarity and distance measures between embedding vectors, and the
// kernel that turns a perturbation's similarity into a sample weight.

#include <span>
#include <string_view>

#include "kgsmile/embedding.hpp"

namespace kgsmile {

enum class TextMetric { Cosine, Wd, InvWd, InvWdPlusCosine, WdPlusCosine };

enum class KernelMode {
  Distance,      // exp(-(1 - s)^2 / sigma^2)
  LiteralPaper,  // exp(-s^2 / sigma^2)
};

enum class WassersteinMode {
  Sorted,  // 1-D optimal transport between the empirical distributions
  Paired,  // index-by-index mean p-norm without sorting
};

enum class InverseMapping {
  Reciprocal,   // 1 / (1 + wd)
  Exponential,  // exp(-wd)
};

struct SimilarityConfig {
  TextMetric text_metric = TextMetric::InvWd;
  double p = 1.0;
  double hybrid_alpha = 0.5;
  double kernel_sigma = 0.25;
  KernelMode kernel_mode = KernelMode::Distance;
  WassersteinMode wasserstein_mode = WassersteinMode::Sorted;
  InverseMapping inverse_mapping = InverseMapping::Reciprocal;

  void validate() const;
};

struct ScoreBundle {
  double cosine = 0.0;
  double wd = 0.0;
  double inv_wd = 1.0;
  double hybrid = 1.0;

  double select(TextMetric metric) const noexcept;
};

/// dot(u, v) / (|u| |v|); zero when either norm is zero.
double cosine(std::span<const double> u, std::span<const double> v);
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

/// Order-p Wasserstein distance treating each vector's entries as n equally
/// weighted points.
double wasserstein(std::span<const double> u, std::span<const double> v, double p = 1.0,
                   WassersteinMode mode = WassersteinMode::Sorted);
double wasserstein(const EmbeddingVector& u, const EmbeddingVector& v, double p = 1.0,
                   WassersteinMode mode = WassersteinMode::Sorted);

double inverse_of_distance(double wd, InverseMapping mapping = InverseMapping::Reciprocal);

double inverse_wd(const EmbeddingVector& u, const EmbeddingVector& v, double p = 1.0,
                  WassersteinMode mode = WassersteinMode::Sorted,
                  InverseMapping mapping = InverseMapping::Reciprocal);

/// Cosine mapped into [0, 1].
constexpr double mapped_cosine(double c) noexcept { return (c + 1.0) / 2.0; }

/// alpha * mapped cosine + (1 - alpha) * inverse distance.
double hybrid(const EmbeddingVector& u, const EmbeddingVector& v, const SimilarityConfig& cfg);

ScoreBundle score_bundle(const EmbeddingVector& u, const EmbeddingVector& v, const SimilarityConfig& cfg);

/// Sample weight in (0, 1] for a similarity score.
double kernel_weight(double score, const SimilarityConfig& cfg);

std::string_view to_string(TextMetric m) noexcept;
TextMetric parse_text_metric(std::string_view name);
std::string_view to_string(KernelMode m) noexcept;
KernelMode parse_kernel_mode(std::string_view name);

}  // namespace kgsmile
