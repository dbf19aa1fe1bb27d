#include "kgsmile/surrogate.hpp"

#include <algorithm>
#include <cmath>

#include "kgsmile/error.hpp"
#include "kgsmile/metrics.hpp"

namespace kgsmile {

namespace {

void find_constant_columns(DesignMatrix& d) {
  d.constant_columns.clear();
  for (Eigen::Index c = 0; c < d.x.cols(); ++c)
    if (d.x.rows() > 0 && (d.x.col(c).array() == d.x(0, c)).all()) d.constant_columns.push_back(static_cast<std::size_t>(c));
}

void check_design(const DesignMatrix& d) {
  if (d.x.rows() < 2) throw Error(ErrorKind::Contract, "surrogate fit needs at least 2 samples");
  if (d.y.size() != d.x.rows() || d.w.size() != d.x.rows()) throw Error(ErrorKind::Shape, "design rows disagree");
  if (!d.x.allFinite() || !d.y.allFinite() || !d.w.allFinite())
    throw Error(ErrorKind::Contract, "design contains non-finite values");
  if ((d.w.array() <= 0.0).any()) throw Error(ErrorKind::Contract, "sample weights must be positive");
}

void fill_diagnostics(const DesignMatrix& d, SurrogateFit& fit) {
  const Eigen::VectorXd pred = fit.predict(d.x);
  fit.diagnostics.loss = (d.y - pred).squaredNorm() / static_cast<double>(d.y.size());
  const std::vector<double> f(d.y.data(), d.y.data() + d.y.size());
  const std::vector<double> g(pred.data(), pred.data() + pred.size());
  const std::vector<double> w(d.w.data(), d.w.data() + d.w.size());
  const FidelityReport rep = fidelity(f, g, w, d.cols());
  fit.diagnostics.r2w = rep.r2w;
  fit.diagnostics.adj_r2w = rep.adj_r2w;
}

}  // namespace

DesignMatrix make_design(Eigen::MatrixXd x, Eigen::VectorXd y, Eigen::VectorXd w) {
  DesignMatrix d;
  d.x = std::move(x);
  d.y = std::move(y);
  d.w = std::move(w);
  find_constant_columns(d);
  return d;
}

DesignMatrix build_design(const PerturbationRun& run, const DesignOptions& options) {
  if (run.samples.empty()) throw Error(ErrorKind::Contract, "perturbation run has no samples");
  const auto rows = static_cast<Eigen::Index>(run.samples.size());
  const auto cols = static_cast<Eigen::Index>(run.samples.front().mask.size());
  DesignMatrix d;
  d.options = options;
  d.x.resize(rows, cols);
  d.y.resize(rows);
  d.w.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& s = run.samples[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(s.mask.size()) != cols) throw Error(ErrorKind::Shape, "masks differ in length");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const bool kept = s.mask.keep[static_cast<std::size_t>(k)];
      double v = (options.coding == FeatureCoding::Presence) == kept ? 1.0 : 0.0;
      if (options.mode == DesignMode::LiteralPaper) v *= s.kernel_weight;
      d.x(i, k) = v;
    }
    d.y(i) = s.text_scores.select(options.metric);
    d.w(i) = s.kernel_weight;
  }
  find_constant_columns(d);
  return d;
}

double SurrogateFit::predict(const Eigen::VectorXd& row) const {
  double acc = intercept;
  for (Eigen::Index k = 0; k < row.size(); ++k) acc += coefficients[static_cast<std::size_t>(k)] * row(k);
  return acc;
}

Eigen::VectorXd SurrogateFit::predict(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.cols()) != coefficients.size()) throw Error(ErrorKind::Shape, "predictor count mismatch");
  const Eigen::Map<const Eigen::VectorXd> beta(coefficients.data(), static_cast<Eigen::Index>(coefficients.size()));
  return (x * beta).array() + intercept;
}

SurrogateFit fit_wls(const DesignMatrix& d) {
  check_design(d);
  const Eigen::Index n = d.x.rows(), k = d.x.cols();
  Eigen::MatrixXd a(n, k + 1);
  a.col(0).setOnes();
  a.rightCols(k) = d.x;
  const Eigen::VectorXd sw = d.w.array().sqrt();
  a = sw.asDiagonal() * a;
  const Eigen::VectorXd b = sw.cwiseProduct(d.y);

  SurrogateFit fit;
  fit.method = SurrogateMethod::Wls;
  Eigen::VectorXd beta;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() == k + 1) {
    beta = qr.solve(b);
  } else {
    Eigen::MatrixXd normal = a.transpose() * a;
    normal.diagonal().array() += kRidgeJitter;
    beta = normal.ldlt().solve(a.transpose() * b);
    fit.diagnostics.jitter_applied = true;
  }
  if (!beta.allFinite()) throw Error(ErrorKind::Invariant, "WLS produced non-finite coefficients");
  fit.intercept = beta(0);
  fit.coefficients.assign(beta.data() + 1, beta.data() + beta.size());
  fit.diagnostics.iterations = 1;
  fill_diagnostics(d, fit);
  return fit;
}

SurrogateFit fit_bayesian_ridge(const DesignMatrix& d, const BayesianRidgeOptions& opt) {
  check_design(d);
  const double wsum = d.w.sum();
  const Eigen::RowVectorXd x_mean = (d.w.transpose() * d.x) / wsum;
  const double y_mean = d.w.dot(d.y) / wsum;
  const Eigen::VectorXd sw = d.w.array().sqrt();
  const Eigen::MatrixXd xc = sw.asDiagonal() * (d.x.rowwise() - x_mean);
  const Eigen::VectorXd yc = (sw.array() * (d.y.array() - y_mean)).matrix();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  const Eigen::VectorXd s2 = s.array().square();
  const Eigen::VectorXd uty = svd.matrixU().transpose() * yc;

  auto solve = [&](double alpha, double lambda) {
    const Eigen::VectorXd shrink = (s.array() / (s2.array() + lambda / alpha)).matrix();
    return Eigen::VectorXd(svd.matrixV() * shrink.cwiseProduct(uty));
  };

  double alpha = opt.alpha_init, lambda = opt.lambda_init;
  Eigen::VectorXd coef;
  std::size_t iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    coef = solve(alpha, lambda);
    const double sse = (yc - xc * coef).squaredNorm();
    const double gamma = (alpha * s2.array() / (lambda + alpha * s2.array())).sum();
    const double lambda_new = (gamma + 2.0 * opt.lambda_1) / (coef.squaredNorm() + 2.0 * opt.lambda_2);
    // effective sample count is the weight total, as in frequency weighting
    const double alpha_new = (wsum - gamma + 2.0 * opt.alpha_1) / (sse + 2.0 * opt.alpha_2);
    const double change = std::max(std::abs(alpha_new - alpha) / alpha, std::abs(lambda_new - lambda) / lambda);
    alpha = alpha_new;
    lambda = lambda_new;
    if (change < opt.tol) {
      ++iter;
      break;
    }
  }
  coef = solve(alpha, lambda);
  if (!coef.allFinite()) throw Error(ErrorKind::Invariant, "Bayesian ridge produced non-finite coefficients");

  SurrogateFit fit;
  fit.method = SurrogateMethod::BayesianRidge;
  fit.coefficients.assign(coef.data(), coef.data() + coef.size());
  fit.intercept = y_mean - x_mean.dot(coef);
  fit.diagnostics.iterations = iter;
  fit.diagnostics.noise_precision = alpha;
  fit.diagnostics.weight_precision = lambda;
  fill_diagnostics(d, fit);
  return fit;
}

SurrogateFit fit(const DesignMatrix& design, SurrogateMethod method) {
  return method == SurrogateMethod::Wls ? fit_wls(design) : fit_bayesian_ridge(design);
}

std::vector<double> min_max_normalize(const std::vector<double>& values) {
  if (values.empty()) return {};
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo, span = *hi - *lo;
  std::vector<double> out(values.size(), 0.5);
  if (span > 0.0)
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - min) / span;
  return out;
}

AttributionReport attribute(const SurrogateFit& fit, const KnowledgeGraph& kg) {
  if (fit.coefficients.size() != kg.size())
    throw Error(ErrorKind::Shape, std::to_string(fit.coefficients.size()) + " coefficients for " +
                                      std::to_string(kg.size()) + " triples");
  AttributionReport rep;
  rep.triple_scores = fit.coefficients;
  for (const auto& t : kg.triples()) {
    const double s = fit.coefficients[t.index];
    for (const Entity* e : {&t.subject, &t.object}) {
      auto [it, inserted] = rep.node_scores.emplace(e->id(), s);
      if (!inserted) it->second = std::max(it->second, s);
    }
  }
  for (std::size_t i = 0; i < rep.triple_scores.size(); ++i) rep.ranking.push_back({i, rep.triple_scores[i]});
  std::stable_sort(rep.ranking.begin(), rep.ranking.end(),
                   [](const RankedTriple& a, const RankedTriple& b) { return a.score > b.score; });
  rep.edge_intensity = min_max_normalize(rep.triple_scores);

  std::vector<double> node_vals;
  for (const auto& [id, s] : rep.node_scores) node_vals.push_back(s);
  const auto node_norm = min_max_normalize(node_vals);
  std::size_t i = 0;
  for (const auto& [id, s] : rep.node_scores) rep.node_intensity[id] = node_norm[i++];
  return rep;
}

std::vector<std::string> AttributionReport::top_nodes(std::size_t k) const {
  std::vector<std::pair<std::string, double>> nodes(node_scores.begin(), node_scores.end());
  // node_scores is id-ordered, so a stable sort leaves ties in ascending id order
  std::stable_sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, nodes.size()); ++i) out.push_back(nodes[i].first);
  return out;
}

std::string_view to_string(SurrogateMethod m) noexcept { return m == SurrogateMethod::Wls ? "wls" : "bayes"; }

SurrogateMethod parse_surrogate_method(std::string_view name) {
  if (name == "wls" || name == "linear") return SurrogateMethod::Wls;
  if (name == "bayes" || name == "bayesian_ridge" || name == "baylime") return SurrogateMethod::BayesianRidge;
  throw Error(ErrorKind::Contract, "unknown surrogate: " + std::string(name));
}

}  // namespace kgsmile
