#include "kgsmile/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kgsmile/error.hpp"

namespace kgsmile {

void SimilarityConfig::validate() const {
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorKind::Contract, "Wasserstein order p must be >= 1");
  if (!(hybrid_alpha >= 0.0 && hybrid_alpha <= 1.0)) throw Error(ErrorKind::Contract, "hybrid_alpha must lie in [0, 1]");
  if (!(kernel_sigma > 0.0) || !std::isfinite(kernel_sigma))
    throw Error(ErrorKind::Contract, "kernel sigma must be positive");
}

double ScoreBundle::select(TextMetric metric) const noexcept {
  switch (metric) {
    case TextMetric::Cosine: return cosine;
    case TextMetric::Wd: return wd;
    case TextMetric::InvWd: return inv_wd;
    case TextMetric::InvWdPlusCosine:
    case TextMetric::WdPlusCosine: return hybrid;
  }
  return inv_wd;
}

namespace {

void check_pair(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw Error(ErrorKind::Shape, "dimension mismatch: " + std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  auto finite = [](double x) { return std::isfinite(x); };
  if (!std::all_of(u.begin(), u.end(), finite) || !std::all_of(v.begin(), v.end(), finite))
    throw Error(ErrorKind::Contract, "non-finite vector entry");
}

std::span<const double> view(const EmbeddingVector& e) { return e.values(); }

}  // namespace

double cosine(std::span<const double> u, std::span<const double> v) {
  check_pair(u, v);
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(uu * vv), -1.0, 1.0);
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) { return cosine(view(u), view(v)); }

double wasserstein(std::span<const double> u, std::span<const double> v, double p, WassersteinMode mode) {
  check_pair(u, v);
  if (u.empty()) throw Error(ErrorKind::Shape, "Wasserstein distance needs at least one point");
  if (!(p >= 1.0)) throw Error(ErrorKind::Contract, "Wasserstein order p must be >= 1");
  std::vector<double> a(u.begin(), u.end()), b(v.begin(), v.end());
  if (mode == WassersteinMode::Sorted) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = std::abs(a[j] - b[j]);
    acc += p == 1.0 ? d : std::pow(d, p);
  }
  acc /= static_cast<double>(a.size());
  return p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

double wasserstein(const EmbeddingVector& u, const EmbeddingVector& v, double p, WassersteinMode mode) {
  return wasserstein(view(u), view(v), p, mode);
}

double inverse_of_distance(double wd, InverseMapping mapping) {
  return mapping == InverseMapping::Exponential ? std::exp(-wd) : 1.0 / (1.0 + wd);
}

double inverse_wd(const EmbeddingVector& u, const EmbeddingVector& v, double p, WassersteinMode mode,
                  InverseMapping mapping) {
  return inverse_of_distance(wasserstein(u, v, p, mode), mapping);
}

ScoreBundle score_bundle(const EmbeddingVector& u, const EmbeddingVector& v, const SimilarityConfig& cfg) {
  cfg.validate();
  ScoreBundle s;
  s.cosine = cosine(u, v);
  s.wd = wasserstein(u, v, cfg.p, cfg.wasserstein_mode);
  s.inv_wd = inverse_of_distance(s.wd, cfg.inverse_mapping);
  // both hybrids pair mapped cosine with the same monotone map of WD
  s.hybrid = cfg.hybrid_alpha * mapped_cosine(s.cosine) + (1.0 - cfg.hybrid_alpha) * s.inv_wd;
  return s;
}

double hybrid(const EmbeddingVector& u, const EmbeddingVector& v, const SimilarityConfig& cfg) {
  return score_bundle(u, v, cfg).hybrid;
}

double kernel_weight(double score, const SimilarityConfig& cfg) {
  if (!(cfg.kernel_sigma > 0.0)) throw Error(ErrorKind::Contract, "kernel sigma must be positive");
  if (!std::isfinite(score)) throw Error(ErrorKind::Contract, "kernel score must be finite");
  const double x = cfg.kernel_mode == KernelMode::Distance ? 1.0 - score : score;
  const double w = std::exp(-(x * x) / (cfg.kernel_sigma * cfg.kernel_sigma));
  // keep weights strictly positive so every sample stays in the fit
  return std::max(w, std::numeric_limits<double>::min());
}

std::string_view to_string(TextMetric m) noexcept {
  switch (m) {
    case TextMetric::Cosine: return "cosine";
    case TextMetric::Wd: return "wd";
    case TextMetric::InvWd: return "inv_wd";
    case TextMetric::InvWdPlusCosine: return "inv_wd_cosine";
    case TextMetric::WdPlusCosine: return "wd_cosine";
  }
  return "inv_wd";
}

TextMetric parse_text_metric(std::string_view name) {
  if (name == "cosine") return TextMetric::Cosine;
  if (name == "wd") return TextMetric::Wd;
  if (name == "inv_wd") return TextMetric::InvWd;
  if (name == "inv_wd_cosine" || name == "inv_wd_plus_cosine") return TextMetric::InvWdPlusCosine;
  if (name == "wd_cosine" || name == "wd_plus_cosine") return TextMetric::WdPlusCosine;
  throw Error(ErrorKind::Contract, "unknown text metric: " + std::string(name));
}

std::string_view to_string(KernelMode m) noexcept {
  return m == KernelMode::Distance ? "distance" : "literal-paper";
}

KernelMode parse_kernel_mode(std::string_view name) {
  if (name == "distance") return KernelMode::Distance;
  if (name == "literal-paper" || name == "literal") return KernelMode::LiteralPaper;
  throw Error(ErrorKind::Contract, "unknown kernel mode: " + std::string(name));
}

}  // namespace kgsmile
