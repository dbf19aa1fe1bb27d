#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kgsmile/error.hpp"
#include "kgsmile/pipeline.hpp"
#include "kgsmile/surrogate.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace kgsmile;

namespace {

struct Synthetic {
  Eigen::MatrixXd x;
  Eigen::VectorXd y, w;
};

Synthetic planted(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bit(0.5);
  std::uniform_real_distribution<double> wd(0.1, 1.0);
  Synthetic s{Eigen::MatrixXd(n, k), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) s.x(i, j) = bit(rng) ? 1.0 : 0.0;
    s.y(i) = 0.3 + 0.5 * s.x(i, 0) - 0.2 * s.x(i, 2);
    s.w(i) = wd(rng);
  }
  return s;
}

}  // namespace

TEST_CASE("wls recovers planted coefficients") {
  const auto s = planted(40, 5, 1);
  const auto fit = fit_wls(make_design(s.x, s.y, s.w));
  CHECK(fit.intercept == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(std::abs(fit.coefficients[0] - 0.5) < 1e-6);
  CHECK(std::abs(fit.coefficients[1]) < 1e-6);
  CHECK(std::abs(fit.coefficients[2] + 0.2) < 1e-6);
  REQUIRE(fit.diagnostics.r2w.has_value());
  CHECK(*fit.diagnostics.r2w >= 0.999999);
  CHECK_FALSE(fit.diagnostics.jitter_applied);
}

TEST_CASE("wls constant target") {
  auto s = planted(30, 4, 2);
  s.y.setConstant(0.75);
  const auto fit = fit_wls(make_design(s.x, s.y, s.w));
  CHECK(std::abs(fit.intercept - 0.75) < 1e-9);
  for (double b : fit.coefficients) CHECK(std::abs(b) < 1e-6);
}

TEST_CASE("wls satisfies the weighted normal equations and matches the oracle") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1), wd(0.05, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 12, k = 5;
    Eigen::MatrixXd x(n, k);
    Eigen::VectorXd y(n), w(n);
    oracle::Rows rows(n, std::vector<double>(k));
    std::vector<double> yv(n), wv(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) rows[i][j] = x(i, j) = u(rng);
      yv[i] = y(i) = u(rng);
      wv[i] = w(i) = wd(rng);
    }
    const auto fit = fit_wls(make_design(x, y, w));
    const auto ref = oracle::weighted_normal_solve(rows, yv, wv);
    CHECK(fit.intercept == doctest::Approx(ref[0]).epsilon(1e-9));
    for (std::size_t j = 0; j < k; ++j) CHECK(std::abs(fit.coefficients[j] - ref[j + 1]) < 1e-9);

    // residual of the normal equations
    Eigen::MatrixXd a(n, k + 1);
    a << Eigen::VectorXd::Ones(n), x;
    Eigen::VectorXd b(k + 1);
    b(0) = fit.intercept;
    for (std::size_t j = 0; j < k; ++j) b(j + 1) = fit.coefficients[j];
    const Eigen::VectorXd r = a.transpose() * w.asDiagonal() * (y - a * b);
    CHECK(r.cwiseAbs().maxCoeff() <= 1e-8);

    const auto scaled = fit_wls(make_design(x, y, w * 7.5));
    for (std::size_t j = 0; j < k; ++j) CHECK(std::abs(scaled.coefficients[j] - fit.coefficients[j]) <= 1e-10);
  }
}

TEST_CASE("wls handles rank deficiency with jitter") {
  Eigen::MatrixXd x(4, 3);
  x << 1, 1, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0;  // columns 0 and 1 identical
  Eigen::VectorXd y(4), w = Eigen::VectorXd::Ones(4);
  y << 1, 0.5, 1.5, 0;
  const auto fit = fit_wls(make_design(x, y, w));
  CHECK(fit.diagnostics.jitter_applied);
  for (double b : fit.coefficients) CHECK(std::isfinite(b));
  CHECK(std::abs(fit.coefficients[0] - fit.coefficients[1]) < 1e-6);
}

TEST_CASE("wls input validation") {
  Eigen::MatrixXd x(1, 2);
  x << 1, 0;
  CHECK_THROWS_AS(fit_wls(make_design(x, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1))), Error);
  Eigen::MatrixXd x2(2, 1);
  x2 << 1, 0;
  Eigen::VectorXd y2(2);
  y2 << 1, std::nan("");
  CHECK_THROWS_AS(fit_wls(make_design(x2, y2, Eigen::VectorXd::Ones(2))), Error);
}

TEST_CASE("bayesian ridge agrees with wls on strong signal and zeroes null signal") {
  const auto s = planted(60, 5, 4);
  const auto wls = fit_wls(make_design(s.x, s.y, s.w));
  const auto br = fit_bayesian_ridge(make_design(s.x, s.y, s.w));
  CHECK(br.method == SurrogateMethod::BayesianRidge);
  for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(br.coefficients[j] - wls.coefficients[j]) < 1e-3);
  CHECK(br.diagnostics.iterations >= 1);
  CHECK(br.diagnostics.iterations <= 300);

  Eigen::VectorXd zeros = Eigen::VectorXd::Zero(60);
  const auto null_fit = fit_bayesian_ridge(make_design(s.x, zeros, s.w));
  for (double b : null_fit.coefficients) CHECK(std::abs(b) < 1e-9);
  CHECK(std::abs(null_fit.intercept) < 1e-9);
}

TEST_CASE("presence and removal codings mirror each other") {
  const auto kg = testing::load_kg("hormones10.json");
  PipelineConfig cfg;
  cfg.perturbation.seed = 21;
  const auto run = run_perturbations(kg, "Which receptor binds glucagon?", cfg.generator, cfg.embedder,
                                     cfg.perturbation, cfg.similarity);
  DesignOptions pres, rem;
  rem.coding = FeatureCoding::Removal;
  const auto dp = build_design(run, pres), dr = build_design(run, rem);
  for (std::size_t i = 0; i < dp.rows(); ++i) {
    CHECK(dp.y(static_cast<Eigen::Index>(i)) == run.samples[i].text_scores.inv_wd);
    for (std::size_t j = 0; j < dp.cols(); ++j) {
      const auto r = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
      CHECK(dp.x(r, c) == (run.samples[i].mask.keep[j] ? 1.0 : 0.0));
      CHECK(dr.x(r, c) == 1.0 - dp.x(r, c));
    }
  }
  const auto fp = fit_wls(dp), fr = fit_wls(dr);
  double sum = 0.0;
  for (std::size_t j = 0; j < fp.coefficients.size(); ++j) {
    CHECK(std::abs(fp.coefficients[j] + fr.coefficients[j]) < 1e-8);
    sum += fp.coefficients[j];
  }
  CHECK(std::abs(fr.intercept - (fp.intercept + sum)) < 1e-8);

  DesignOptions literal;
  literal.mode = DesignMode::LiteralPaper;
  const auto dl = build_design(run, literal);
  CHECK(dl.x(0, 0) == dp.x(0, 0) * run.samples[0].kernel_weight);
}

TEST_CASE("attribute ranks, aggregates and normalises") {
  const KnowledgeGraph kg({make_triple("a", "r", "b"), make_triple("b", "r", "c"), make_triple("d", "r", "e")});
  SurrogateFit fit;
  fit.coefficients = {0.2, 0.8, 0.2};
  const auto rep = attribute(fit, kg);
  REQUIRE(rep.ranking.size() == 3);
  CHECK(rep.ranking[0].index == 1);
  CHECK(rep.ranking[1].index == 0);
  CHECK(rep.ranking[2].index == 2);
  CHECK(rep.node_scores.at("b") == 0.8);
  CHECK(rep.node_scores.at("a") == 0.2);
  CHECK(rep.edge_intensity[1] == 1.0);
  CHECK(rep.edge_intensity[0] == 0.0);
  CHECK(rep.node_intensity.at("c") == 1.0);
  const auto top = rep.top_nodes(2);
  CHECK(top == std::vector<std::string>{"b", "c"});

  fit.coefficients = {0.4, 0.4, 0.4};
  const auto flat = attribute(fit, kg);
  for (double t : flat.edge_intensity) CHECK(t == 0.5);
  for (const auto& [id, t] : flat.node_intensity) CHECK(t == 0.5);

  fit.coefficients = {1.0};
  CHECK_THROWS_AS(attribute(fit, kg), Error);

  const KnowledgeGraph one({make_triple("x", "r", "y")});
  fit.coefficients = {0.3};
  const auto single = attribute(fit, one);
  CHECK(single.ranking[0].index == 0);
  CHECK(single.node_scores.at("x") == single.node_scores.at("y"));
}

TEST_CASE("critical triple outranks uncited triples") {
  const auto kg = testing::load_kg("hormones10.json");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PipelineConfig cfg;
    cfg.perturbation.seed = seed;
    const auto ex = explain(kg, "Which receptor binds dopamine?", cfg);
    const double critical = ex.fit.coefficients[2];
    for (std::size_t j = 0; j < kg.size(); ++j)
      if (j != 2) CHECK(critical > ex.fit.coefficients[j]);
    // endpoints carry the maximum over their incident triples
    CHECK(ex.report.node_scores.at("DRD2") == critical);
    CHECK(ex.report.node_intensity.at("dopamine") == 1.0);
  }
}
