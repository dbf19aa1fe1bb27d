#include "kgsmile/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>

#include "kgsmile/error.hpp"

namespace kgsmile {

namespace {

using nlohmann::json;

constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kRed{255, 0, 0};
constexpr Rgb kBlue{0, 0, 255};
constexpr Rgb kGrey{128, 128, 128};
constexpr Rgb kOrange{255, 128, 0};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_shape(const KnowledgeGraph& kg, const AttributionReport& report) {
  if (report.triple_scores.size() != kg.size() || report.edge_intensity.size() != kg.size())
    throw Error(ErrorKind::Shape, "attribution report has " + std::to_string(report.triple_scores.size()) +
                                      " triple scores for a graph of " + std::to_string(kg.size()));
  for (const auto& e : kg.entities())
    if (!report.node_scores.contains(e.id()) || !report.node_intensity.contains(e.id()))
      throw Error(ErrorKind::Shape, "attribution report has no score for node '" + e.id() + "'");
}

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::pair<double, double> score_range(const AttributionReport& report) {
  if (report.triple_scores.empty()) return {0.0, 0.0};
  const auto [lo, hi] = std::minmax_element(report.triple_scores.begin(), report.triple_scores.end());
  return {*lo, *hi};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string Rgb::hex() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", r, g, b);
  return buf;
}

Rgb interpolate(Rgb from, Rgb to, double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto ch = [t](std::uint8_t a, std::uint8_t b) {
    const double v = static_cast<double>(a) + t * (static_cast<double>(b) - static_cast<double>(a));
    return static_cast<std::uint8_t>(std::floor(v + 0.5));
  };
  return Rgb{ch(from.r, to.r), ch(from.g, to.g), ch(from.b, to.b)};
}

Rgb node_color(double intensity, ColorMode mode) {
  if (mode == ColorMode::Sequential) return interpolate(kWhite, kRed, intensity);
  return intensity >= 0.5 ? interpolate(kWhite, kRed, 2.0 * (intensity - 0.5))
                          : interpolate(kWhite, kBlue, 2.0 * (0.5 - intensity));
}

Rgb edge_color(double intensity, ColorMode mode) {
  if (mode == ColorMode::Sequential) return interpolate(kGrey, kBlue, intensity);
  return intensity >= 0.5 ? interpolate(kGrey, kBlue, 2.0 * (intensity - 0.5))
                          : interpolate(kGrey, kOrange, 2.0 * (0.5 - intensity));
}

ColorScale make_color_scale(const AttributionReport& report, ColorMode mode) {
  ColorScale scale;
  scale.mode = mode;
  if (mode == ColorMode::Sequential) {
    scale.edge_intensity = report.edge_intensity;
    scale.node_intensity = report.node_intensity;
    return scale;
  }
  double peak = 0.0;
  for (double s : report.triple_scores) peak = std::max(peak, std::abs(s));
  auto centred = [peak](double s) { return peak == 0.0 ? 0.5 : 0.5 + 0.5 * s / peak; };
  for (double s : report.triple_scores) scale.edge_intensity.push_back(centred(s));
  for (const auto& [id, s] : report.node_scores) scale.node_intensity[id] = centred(s);
  return scale;
}

ColorScale default_color_scale(const AttributionReport& report) {
  const bool neg = std::any_of(report.triple_scores.begin(), report.triple_scores.end(), [](double s) { return s < 0; });
  const bool pos = std::any_of(report.triple_scores.begin(), report.triple_scores.end(), [](double s) { return s > 0; });
  return make_color_scale(report, neg && pos ? ColorMode::Diverging : ColorMode::Sequential);
}

std::string export_dot(const KnowledgeGraph& kg, const AttributionReport& report, const ColorScale& scale) {
  check_shape(kg, report);
  if (scale.edge_intensity.size() != kg.size()) throw Error(ErrorKind::Shape, "colour scale does not match graph");
  const auto [lo, hi] = score_range(report);
  std::string out;
  out += "// kgsmile attribution graph\n";
  out += "// legend: score min=" + num(lo) + " max=" + num(hi) +
         (scale.mode == ColorMode::Sequential ? "; nodes white->red, edges grey->blue\n"
                                              : "; diverging at 0, nodes blue->white->red, edges orange->grey->blue\n");
  if (kg.empty()) return out + "graph G { }\n";

  out += "graph G {\n";
  out += "  node [style=filled];\n";
  for (const auto& e : kg.entities()) {
    const double t = scale.node_intensity.at(e.id());
    out += "  " + dot_quote(e.id()) + " [fillcolor=\"" + node_color(t, scale.mode).hex() + "\", score=\"" +
           num(report.node_scores.at(e.id())) + "\", intensity=\"" + num(t) + "\"];\n";
  }
  for (const auto& tr : kg.triples()) {
    const double t = scale.edge_intensity[tr.index];
    out += "  " + dot_quote(tr.subject.id()) + " -- " + dot_quote(tr.object.id()) +
           " [label=" + dot_quote(tr.predicate.label()) + ", color=\"" + edge_color(t, scale.mode).hex() +
           "\", score=\"" + num(report.triple_scores[tr.index]) + "\", intensity=\"" + num(t) + "\"];\n";
  }
  out += "}\n";
  return out;
}

std::string export_dot(const KnowledgeGraph& kg, const AttributionReport& report) {
  return export_dot(kg, report, default_color_scale(report));
}

std::string export_graphml(const KnowledgeGraph& kg, const AttributionReport& report) {
  check_shape(kg, report);
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
  out += "  <key id=\"ns\" for=\"node\" attr.name=\"score\" attr.type=\"double\"/>\n";
  out += "  <key id=\"ni\" for=\"node\" attr.name=\"intensity\" attr.type=\"double\"/>\n";
  out += "  <key id=\"es\" for=\"edge\" attr.name=\"score\" attr.type=\"double\"/>\n";
  out += "  <key id=\"ei\" for=\"edge\" attr.name=\"intensity\" attr.type=\"double\"/>\n";
  out += "  <key id=\"ep\" for=\"edge\" attr.name=\"predicate\" attr.type=\"string\"/>\n";
  out += "  <key id=\"ex\" for=\"edge\" attr.name=\"index\" attr.type=\"int\"/>\n";
  out += "  <graph id=\"G\" edgedefault=\"undirected\">\n";
  for (const auto& e : kg.entities()) {
    out += "    <node id=\"" + xml_escape(e.id()) + "\">\n";
    out += "      <data key=\"ns\">" + num(report.node_scores.at(e.id())) + "</data>\n";
    out += "      <data key=\"ni\">" + num(report.node_intensity.at(e.id())) + "</data>\n";
    out += "    </node>\n";
  }
  for (const auto& t : kg.triples()) {
    out += "    <edge id=\"e" + std::to_string(t.index) + "\" source=\"" + xml_escape(t.subject.id()) + "\" target=\"" +
           xml_escape(t.object.id()) + "\">\n";
    out += "      <data key=\"es\">" + num(report.triple_scores[t.index]) + "</data>\n";
    out += "      <data key=\"ei\">" + num(report.edge_intensity[t.index]) + "</data>\n";
    out += "      <data key=\"ep\">" + xml_escape(t.predicate.label()) + "</data>\n";
    out += "      <data key=\"ex\">" + std::to_string(t.index) + "</data>\n";
    out += "    </edge>\n";
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

std::string export_report(const ReportInput& in) {
  json doc = json::object();

  if (in.attribution) {
    const auto& rep = *in.attribution;
    json att = json::object();
    att["intercept"] = optional_number(in.intercept);
    json ranked = json::array();
    for (std::size_t r = 0; r < rep.ranking.size(); ++r) {
      const auto& rt = rep.ranking[r];
      json row = {{"rank", r + 1}, {"index", rt.index}, {"score", rt.score}};
      if (rt.index < rep.edge_intensity.size()) row["intensity"] = rep.edge_intensity[rt.index];
      if (in.kg && rt.index < in.kg->size()) {
        const auto& t = in.kg->triples()[rt.index];
        row["subject"] = t.subject.id();
        row["predicate"] = t.predicate.label();
        row["object"] = t.object.id();
        row["origin"] = t.origin;
      }
      ranked.push_back(std::move(row));
    }
    att["ranked_triples"] = std::move(ranked);
    json nodes = json::array();
    for (const auto& [id, s] : rep.node_scores) {
      auto it = rep.node_intensity.find(id);
      nodes.push_back({{"id", id}, {"score", s}, {"intensity", it == rep.node_intensity.end() ? 0.5 : it->second}});
    }
    att["nodes"] = std::move(nodes);
    doc["attribution"] = std::move(att);
  }

  json metrics = json::object();
  if (in.fidelity) {
    const auto& f = *in.fidelity;
    metrics["eq15_r2"] = optional_number(f.r2);
    metrics["eq16_mean_l1"] = f.mean_l1;
    metrics["eq17_mean_l2"] = f.mean_l2;
    metrics["eq18_weighted_l1"] = f.weighted_l1;
    metrics["eq19_weighted_l2"] = f.weighted_l2;
    metrics["eq20_r2w"] = optional_number(f.r2w);
    metrics["eq21_adj_r2w"] = optional_number(f.adj_r2w);
    metrics["eq22_mean_loss"] = f.mean_loss;
    metrics["n_p"] = f.n_p;
    metrics["n_s"] = f.n_s;
  }
  if (in.stability) {
    const auto& s = *in.stability;
    metrics["eq23_jaccard"] = s.jaccard;
    doc["stability"] = {{"injected", {s.injected.subject.id(), s.injected.predicate.label(), s.injected.object.id()}},
                        {"top_k", s.top_k},
                        {"original_nodes", s.original_nodes},
                        {"perturbed_nodes", s.perturbed_nodes}};
  }
  if (in.faithfulness_pearson) metrics["faithfulness_pearson"] = *in.faithfulness_pearson;
  if (in.accuracy) {
    const auto& a = *in.accuracy;
    metrics["mean_auc"] = optional_number(a.mean_auc);
    json qs = json::array();
    for (const auto& q : a.questions) qs.push_back({{"question", q.question}, {"auc", optional_number(q.auc)}, {"note", q.note}});
    doc["accuracy"] = {{"temperature", a.temperature}, {"questions", std::move(qs)}};
  }
  if (in.consistency) {
    json parts = json::array();
    for (const auto& p : in.consistency->parts) {
      parts.push_back({{"part_id", p.part_id},
                       {"answer_cosine_stddev", p.answer_cosine_stddev},
                       {"score_stddev", p.score_stddev},
                       {"max_score_stddev", p.max_score_stddev}});
    }
    doc["consistency"] = {{"runs", in.consistency->runs}, {"parts", std::move(parts)}};
  }
  if (in.composite) {
    const auto& c = *in.composite;
    doc["composite"] = {{"semantic", c.semantic},
                        {"concept_overlap", c.concept_overlap},
                        {"content", c.content},
                        {"composite", c.composite},
                        {"classification", std::string(to_string(c.classification))}};
  }
  if (!metrics.empty()) doc["metrics"] = std::move(metrics);
  if (!in.answers.empty()) doc["answers"] = in.answers;

  json manifest = {{"config", in.manifest.config}, {"seeds", in.manifest.seeds}, {"version", in.manifest.version}};
  if (in.manifest.wall_times_s) manifest["wall_times_s"] = *in.manifest.wall_times_s;
  doc["manifest"] = std::move(manifest);

  return doc.dump(2) + "\n";
}

}  // namespace kgsmile
