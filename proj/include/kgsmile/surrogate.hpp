#pragma once

// Local linear surrogates fitted over perturbation masks, and the conversion
// of their coefficients into triple and node attributions.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kgsmile/graph.hpp"
#include "kgsmile/perturbation.hpp"
#include "kgsmile/similarity.hpp"

namespace kgsmile {

enum class FeatureCoding {
  Presence,  // x = 1 when the triple is kept
  Removal,   // x = 1 when the triple is removed
};

enum class DesignMode {
  Standard,      // kernel weights enter as sample weights
  LiteralPaper,  // features are multiplied by the sample's kernel weight
};

struct DesignOptions {
  TextMetric metric = TextMetric::InvWd;
  FeatureCoding coding = FeatureCoding::Presence;
  DesignMode mode = DesignMode::Standard;
};

struct DesignMatrix {
  Eigen::MatrixXd x;  // samples x triples
  Eigen::VectorXd y;
  Eigen::VectorXd w;
  DesignOptions options;
  /// Columns constant across all samples; their coefficients are unidentifiable.
  std::vector<std::size_t> constant_columns;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(x.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(x.cols()); }
};

DesignMatrix build_design(const PerturbationRun& run, const DesignOptions& options = {});

/// Builds a design directly from raw arrays (used by tests and bindings).
DesignMatrix make_design(Eigen::MatrixXd x, Eigen::VectorXd y, Eigen::VectorXd w);

enum class SurrogateMethod { Wls, BayesianRidge };

struct FitDiagnostics {
  double loss = 0.0;                 // mean squared residual
  std::optional<double> r2w;         // undefined for constant targets
  std::optional<double> adj_r2w;     // undefined when rows <= cols + 1
  std::size_t iterations = 0;
  bool jitter_applied = false;
  double noise_precision = 0.0;      // Bayesian ridge only
  double weight_precision = 0.0;     // Bayesian ridge only
};

struct SurrogateFit {
  double intercept = 0.0;
  std::vector<double> coefficients;
  SurrogateMethod method = SurrogateMethod::Wls;
  FitDiagnostics diagnostics;

  double predict(const Eigen::VectorXd& row) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

inline constexpr double kRidgeJitter = 1e-8;

/// Weighted least squares minimising sum_i w_i (y_i - b0 - x_i . b)^2.
/// Solved by column-pivoted QR on the sqrt(w)-scaled design; when the design
/// is rank deficient the weighted normal equations are solved instead with
/// kRidgeJitter added to the diagonal.
SurrogateFit fit_wls(const DesignMatrix& design);

struct BayesianRidgeOptions {
  double alpha_init = 1e-6;   // noise precision
  double lambda_init = 1e-6;  // weight precision
  double alpha_1 = 1e-6, alpha_2 = 1e-6;    // gamma prior on the noise precision
  double lambda_1 = 1e-6, lambda_2 = 1e-6;  // gamma prior on the weight precision
  double tol = 1e-6;
  std::size_t max_iter = 300;
};

/// Evidence-maximising Bayesian ridge regression on the weighted design.
SurrogateFit fit_bayesian_ridge(const DesignMatrix& design, const BayesianRidgeOptions& options = {});

SurrogateFit fit(const DesignMatrix& design, SurrogateMethod method);

struct RankedTriple {
  std::size_t index;
  double score;
};

struct AttributionReport {
  std::vector<double> triple_scores;           // by triple index
  std::map<std::string, double> node_scores;   // by entity id
  std::vector<RankedTriple> ranking;           // descending score, ties by index
  std::vector<double> edge_intensity;          // by triple index, in [0, 1]
  std::map<std::string, double> node_intensity;

  /// Top-k entity ids by score, ties broken by ascending id.
  std::vector<std::string> top_nodes(std::size_t k) const;
};

/// Min-max normalisation to [0, 1]; all-equal input maps to 0.5.
std::vector<double> min_max_normalize(const std::vector<double>& values);

AttributionReport attribute(const SurrogateFit& fit, const KnowledgeGraph& kg);

std::string_view to_string(SurrogateMethod m) noexcept;
SurrogateMethod parse_surrogate_method(std::string_view name);

}  // namespace kgsmile
