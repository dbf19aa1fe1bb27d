#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kgsmile/error.hpp"
#include "kgsmile/export.hpp"
#include "kgsmile/pipeline.hpp"
#include "kgsmile/reasoning.hpp"

namespace py = pybind11;
using namespace kgsmile;

namespace {

py::dict fit_to_dict(const SurrogateFit& fit) {
  py::dict d;
  d["intercept"] = fit.intercept;
  d["coefficients"] = fit.coefficients;
  d["method"] = std::string(to_string(fit.method));
  d["iterations"] = fit.diagnostics.iterations;
  d["jitter_applied"] = fit.diagnostics.jitter_applied;
  d["noise_precision"] = fit.diagnostics.noise_precision;
  d["weight_precision"] = fit.diagnostics.weight_precision;
  return d;
}

py::dict fidelity_to_dict(const FidelityReport& r) {
  py::dict d;
  d["r2"] = r.r2;
  d["mean_l1"] = r.mean_l1;
  d["mean_l2"] = r.mean_l2;
  d["weighted_l1"] = r.weighted_l1;
  d["weighted_l2"] = r.weighted_l2;
  d["r2w"] = r.r2w;
  d["adj_r2w"] = r.adj_r2w;
  d["mean_loss"] = r.mean_loss;
  d["n_p"] = r.n_p;
  d["n_s"] = r.n_s;
  return d;
}

struct PyExplanation {
  KnowledgeGraph kg;
  Explanation ex;

  std::string report() const {
    ReportInput in;
    in.kg = &kg;
    in.attribution = &ex.report;
    in.intercept = ex.fit.intercept;
    in.fidelity = ex.fidelity;
    in.answers = {{"original", ex.run.original_answer.text}};
    return export_report(in);
  }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Perturbation-based attribution of generated answers to knowledge-graph triples";
  m.attr("__version__") = std::string(kVersion);

  py::register_exception<Error>(m, "KgsmileError", PyExc_ValueError);

  py::class_<Triple>(m, "Triple")
      .def_property_readonly("subject", [](const Triple& t) { return t.subject.id(); })
      .def_property_readonly("predicate", [](const Triple& t) { return t.predicate.label(); })
      .def_property_readonly("object", [](const Triple& t) { return t.object.id(); })
      .def_readonly("index", &Triple::index)
      .def_readonly("origin", &Triple::origin)
      .def("__repr__", [](const Triple& t) {
        return "Triple(" + t.subject.id() + ", " + t.predicate.label() + ", " + t.object.id() + ")";
      });

  py::class_<KnowledgeGraph>(m, "KnowledgeGraph")
      .def(py::init([](const std::vector<std::tuple<std::string, std::string, std::string>>& rows) {
             std::vector<Triple> triples;
             for (const auto& [s, p, o] : rows) triples.push_back(make_triple(s, p, o));
             return KnowledgeGraph(std::move(triples)).rebased();
           }),
           py::arg("triples"))
      .def_static("from_json", [](const std::string& text) { return parse_triples(text); }, py::arg("text"))
      .def("to_json", &write_triples_json)
      .def_property_readonly("triples", &KnowledgeGraph::triples)
      .def_property_readonly("entities",
                             [](const KnowledgeGraph& kg) {
                               std::vector<std::string> out;
                               for (const auto& e : kg.entities()) out.push_back(e.id());
                               return out;
                             })
      .def_property_readonly("duplicates_dropped", &KnowledgeGraph::duplicates_dropped)
      .def("__len__", &KnowledgeGraph::size);

  m.def("tokenize", &tokenize, py::arg("text"));
  m.def(
      "embed", [](const std::string& text, std::size_t dim) { return HashingEmbedder(dim).embed(text).values(); },
      py::arg("text"), py::arg("dim") = 256);
  m.def(
      "cosine", [](const std::vector<double>& u, const std::vector<double>& v) { return cosine(u, v); }, py::arg("u"),
      py::arg("v"));
  m.def(
      "wasserstein",
      [](const std::vector<double>& u, const std::vector<double>& v, double p) { return wasserstein(u, v, p); },
      py::arg("u"), py::arg("v"), py::arg("p") = 1.0);

  m.def(
      "fit_wls",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
        return fit_to_dict(fit_wls(make_design(x, y, w)));
      },
      py::arg("x"), py::arg("y"), py::arg("w"));
  m.def(
      "fit_bayesian_ridge",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double tol,
         std::size_t max_iter) {
        BayesianRidgeOptions opt;
        opt.tol = tol;
        opt.max_iter = max_iter;
        return fit_to_dict(fit_bayesian_ridge(make_design(x, y, w), opt));
      },
      py::arg("x"), py::arg("y"), py::arg("w"), py::arg("tol") = 1e-6, py::arg("max_iter") = 300);

  m.def(
      "fidelity",
      [](const std::vector<double>& f, const std::vector<double>& g, const std::vector<double>& w, std::size_t n_s) {
        return fidelity_to_dict(fidelity(f, g, w, n_s));
      },
      py::arg("f"), py::arg("g"), py::arg("w"), py::arg("n_s"));
  m.def(
      "pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); }, py::arg("x"),
      py::arg("y"));
  m.def("jaccard", &jaccard, py::arg("a"), py::arg("b"));
  m.def(
      "roc_auc",
      [](const std::vector<double>& scores, const std::vector<bool>& labels) { return roc_auc(scores, labels); },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "population_stddev", [](const std::vector<double>& v) { return population_stddev(v); }, py::arg("values"));
  m.def(
      "classify_similarity", [](double s) { return std::string(to_string(classify_similarity(s))); },
      py::arg("composite"));
  m.def(
      "composite_similarity",
      [](const std::string& a, const std::string& b) {
        const auto r = composite_similarity(a, b, EmbedderConfig{});
        py::dict d;
        d["semantic"] = r.semantic;
        d["concept_overlap"] = r.concept_overlap;
        d["content"] = r.content;
        d["composite"] = r.composite;
        d["classification"] = std::string(to_string(r.classification));
        return d;
      },
      py::arg("a"), py::arg("b"));

  py::class_<PyExplanation>(m, "Explanation")
      .def_property_readonly("answer", [](const PyExplanation& e) { return e.ex.run.original_answer.text; })
      .def_property_readonly("intercept", [](const PyExplanation& e) { return e.ex.fit.intercept; })
      .def_property_readonly("triple_scores", [](const PyExplanation& e) { return e.ex.report.triple_scores; })
      .def_property_readonly("node_scores", [](const PyExplanation& e) { return e.ex.report.node_scores; })
      .def_property_readonly("ranking",
                             [](const PyExplanation& e) {
                               std::vector<std::pair<std::size_t, double>> out;
                               for (const auto& r : e.ex.report.ranking) out.emplace_back(r.index, r.score);
                               return out;
                             })
      .def_property_readonly("fidelity", [](const PyExplanation& e) { return fidelity_to_dict(e.ex.fidelity); })
      .def("top_nodes", [](const PyExplanation& e, std::size_t k) { return e.ex.report.top_nodes(k); }, py::arg("k"))
      .def("to_dot", [](const PyExplanation& e) { return export_dot(e.kg, e.ex.report); })
      .def("to_graphml", [](const PyExplanation& e) { return export_graphml(e.kg, e.ex.report); })
      .def("to_report", &PyExplanation::report);

  m.def(
      "explain",
      [](const KnowledgeGraph& kg, const std::string& question, double temperature, std::uint64_t seed,
         std::size_t perturbations, double removal_prob, const std::string& metric, const std::string& surrogate) {
        PipelineConfig cfg;
        cfg.generator.temperature = temperature;
        cfg.generator.seed = seed;
        cfg.perturbation.seed = seed;
        cfg.perturbation.num_samples = perturbations;
        cfg.perturbation.removal_prob = removal_prob;
        cfg.similarity.text_metric = parse_text_metric(metric);
        cfg.design.metric = cfg.similarity.text_metric;
        cfg.surrogate = parse_surrogate_method(surrogate);
        py::gil_scoped_release release;
        return PyExplanation{kg, explain(kg, question, cfg)};
      },
      py::arg("kg"), py::arg("question"), py::arg("temperature") = 0.0, py::arg("seed") = 0,
      py::arg("perturbations") = 20, py::arg("removal_prob") = 0.5, py::arg("metric") = "inv_wd",
      py::arg("surrogate") = "wls");

  m.def(
      "chain_of_thought",
      [](const KnowledgeGraph& kg, const std::string& question, std::size_t max_depth) {
        return generate_chain_of_thought(kg, question, max_depth).rendered_lines();
      },
      py::arg("kg"), py::arg("question"), py::arg("max_depth") = kDefaultChainDepth);
}
