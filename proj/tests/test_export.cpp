#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cctype>
#include <json.hpp>
#include <map>

#include "kgsmile/error.hpp"
#include "kgsmile/export.hpp"
#include "kgsmile/pipeline.hpp"
#include "support.hpp"

using namespace kgsmile;

namespace {

// --- minimal DOT reader: graph ID? { (node|edge|attr stmt ;?)* } -------------

struct DotGraph {
  std::map<std::string, std::map<std::string, std::string>> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::map<std::string, std::string>> edge_attrs;
};

class DotReader {
 public:
  explicit DotReader(const std::string& s) : s_(s) {}

  DotGraph parse() {
    DotGraph g;
    expect_word("graph");
    std::string tok = next();
    if (tok != "{") tok = next();
    if (tok != "{") throw std::runtime_error("expected {");
    for (;;) {
      tok = next();
      if (tok == "}") break;
      if (tok == ";") continue;
      if (tok == "node" || tok == "edge") {
        attrs();
        continue;
      }
      const std::string a = tok;
      if (peek() == "--") {
        next();
        const std::string b = next();
        g.edges.emplace_back(a, b);
        g.edge_attrs.push_back(peek() == "[" ? attrs() : std::map<std::string, std::string>{});
      } else {
        g.nodes[a] = peek() == "[" ? attrs() : std::map<std::string, std::string>{};
      }
    }
    if (!next().empty()) throw std::runtime_error("trailing content");
    return g;
  }

 private:
  std::map<std::string, std::string> attrs() {
    std::map<std::string, std::string> out;
    if (next() != "[") throw std::runtime_error("expected [");
    for (;;) {
      std::string k = next();
      if (k == "]") break;
      if (k == ",") continue;
      if (next() != "=") throw std::runtime_error("expected =");
      out[k] = next();
    }
    return out;
  }
  void skip() {
    for (;;) {
      while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (s_.compare(pos_, 2, "//") == 0) {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
        continue;
      }
      return;
    }
  }
  std::string peek() {
    const auto save = pos_;
    auto t = next();
    pos_ = save;
    return t;
  }
  std::string next() {
    skip();
    if (pos_ >= s_.size()) return "";
    const char c = s_[pos_];
    if (s_.compare(pos_, 2, "--") == 0) {
      pos_ += 2;
      return "--";
    }
    if (std::string("{}[]=,;").find(c) != std::string::npos) {
      ++pos_;
      return std::string(1, c);
    }
    if (c == '"') {
      std::string out;
      ++pos_;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
        out += s_[pos_++];
      }
      if (pos_ >= s_.size()) throw std::runtime_error("unterminated string");
      ++pos_;
      return out;
    }
    std::string out;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '.'))
      out += s_[pos_++];
    if (out.empty()) throw std::runtime_error(std::string("unexpected character ") + c);
    return out;
  }
  void expect_word(const char* w) {
    if (next() != w) throw std::runtime_error(std::string("expected ") + w);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

// --- minimal XML reader checking nesting and collecting elements -------------

struct XmlElement {
  std::string name;
  std::map<std::string, std::string> attrs;
  std::string text;
};

std::string unescape(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    const auto end = s.find(';', i);
    const auto ent = s.substr(i + 1, end - i - 1);
    out += ent == "amp" ? '&' : ent == "lt" ? '<' : ent == "gt" ? '>' : ent == "quot" ? '"' : '\'';
    i = end;
  }
  return out;
}

std::vector<XmlElement> read_xml(const std::string& s) {
  std::vector<XmlElement> all;
  std::vector<std::size_t> stack;
  std::size_t i = 0;
  while ((i = s.find('<', i)) != std::string::npos) {
    if (s.compare(i, 2, "<?") == 0) {
      i = s.find("?>", i) + 2;
      continue;
    }
    const auto close = s.find('>', i);
    if (close == std::string::npos) throw std::runtime_error("unterminated tag");
    std::string tag = s.substr(i + 1, close - i - 1);
    if (tag[0] == '/') {
      if (stack.empty() || all[stack.back()].name != tag.substr(1)) throw std::runtime_error("mismatched </" + tag + ">");
      const auto text_start = s.rfind('>', i - 1);
      (void)text_start;
      stack.pop_back();
      i = close + 1;
      continue;
    }
    const bool self_closing = tag.back() == '/';
    if (self_closing) tag.pop_back();
    XmlElement el;
    std::size_t p = tag.find_first_of(" \t\n");
    el.name = tag.substr(0, p);
    while (p != std::string::npos && p < tag.size()) {
      const auto eq = tag.find('=', p);
      if (eq == std::string::npos) break;
      std::string key = tag.substr(p, eq - p);
      key.erase(0, key.find_first_not_of(" \t\n"));
      const auto q1 = tag.find('"', eq), q2 = tag.find('"', q1 + 1);
      el.attrs[key] = unescape(tag.substr(q1 + 1, q2 - q1 - 1));
      p = q2 + 1;
    }
    const auto next_lt = s.find('<', close);
    el.text = unescape(s.substr(close + 1, next_lt - close - 1));
    all.push_back(el);
    if (!self_closing) stack.push_back(all.size() - 1);
    i = close + 1;
  }
  if (!stack.empty()) throw std::runtime_error("unclosed element " + all[stack.back()].name);
  return all;
}

AttributionReport scores_for(const KnowledgeGraph& kg, std::vector<double> coefficients) {
  SurrogateFit fit;
  fit.coefficients = std::move(coefficients);
  return attribute(fit, kg);
}

}  // namespace

TEST_CASE("colour interpolation") {
  CHECK(node_color(1.0, ColorMode::Sequential).hex() == "#FF0000");
  CHECK(node_color(0.0, ColorMode::Sequential).hex() == "#FFFFFF");
  CHECK(node_color(0.5, ColorMode::Sequential).hex() == "#FF8080");  // 255 - 127.5 rounds up to 128
  CHECK(edge_color(0.0, ColorMode::Sequential).hex() == "#808080");
  CHECK(edge_color(1.0, ColorMode::Sequential).hex() == "#0000FF");
  CHECK(node_color(0.5, ColorMode::Diverging).hex() == "#FFFFFF");
  CHECK(node_color(0.0, ColorMode::Diverging).hex() == "#0000FF");
}

TEST_CASE("diverging scale centres zero") {
  const KnowledgeGraph kg({make_triple("a", "r", "b"), make_triple("c", "r", "d"), make_triple("e", "r", "f")});
  const auto rep = scores_for(kg, {-0.5, 0.0, 1.0});
  const auto scale = default_color_scale(rep);
  CHECK(scale.mode == ColorMode::Diverging);
  CHECK(scale.edge_intensity[1] == 0.5);
  CHECK(scale.edge_intensity[2] == 1.0);
  CHECK(scale.edge_intensity[0] == 0.25);
  CHECK(default_color_scale(scores_for(kg, {0.1, 0.2, 0.3})).mode == ColorMode::Sequential);
}

TEST_CASE("dot export") {
  SUBCASE("empty graph") {
    const auto dot = export_dot(KnowledgeGraph{}, AttributionReport{});
    CHECK(dot.find("graph G { }") != std::string::npos);
    CHECK(dot.rfind("//", 0) == 0);
    CHECK(DotReader(dot).parse().nodes.empty());
  }
  SUBCASE("fixture graph parses and carries colours") {
    const auto kg = testing::load_kg("hormones10.json");
    std::vector<double> c(10, 0.0);
    c[3] = 1.0;
    const auto rep = scores_for(kg, c);
    const auto dot = export_dot(kg, rep);
    const auto g = DotReader(dot).parse();
    CHECK(g.nodes.size() == kg.entities().size());
    CHECK(g.edges.size() == 10);
    CHECK(g.nodes.at("HTR2A").at("fillcolor") == "#FF0000");
    CHECK(g.nodes.at("INSR").at("fillcolor") == "#FFFFFF");
    CHECK(g.edge_attrs[3].at("color") == "#0000FF");
    CHECK(dot.find("legend: score min=0 max=1") != std::string::npos);
    CHECK(export_dot(kg, rep) == dot);
  }
  SUBCASE("quotes in ids are escaped") {
    const KnowledgeGraph kg({make_triple("say \"hi\"", "r", "b\\c")});
    const auto g = DotReader(export_dot(kg, scores_for(kg, {0.3}))).parse();
    CHECK(g.nodes.count("say \"hi\"") == 1);
    CHECK(g.nodes.count("b\\c") == 1);
  }
  SUBCASE("shape mismatch") {
    const auto kg = testing::load_kg("hormones10.json");
    CHECK_THROWS_AS(export_dot(kg, AttributionReport{}), Error);
  }
}

TEST_CASE("graphml export round-trips scores") {
  const auto kg = testing::load_kg("hormones10.json");
  std::vector<double> c;
  for (int i = 0; i < 10; ++i) c.push_back(0.1 * i - 0.33333333333333331);
  const auto rep = scores_for(kg, c);
  const auto doc = export_graphml(kg, rep);
  const auto els = read_xml(doc);
  std::size_t edges = 0, nodes = 0;
  std::string owner;
  std::map<std::string, double> node_scores;
  std::vector<double> edge_scores;
  for (const auto& e : els) {
    if (e.name == "edge") ++edges, owner = "edge";
    if (e.name == "node") ++nodes, owner = e.attrs.at("id");
    if (e.name == "data" && e.attrs.at("key") == "es") edge_scores.push_back(std::stod(e.text));
    if (e.name == "data" && e.attrs.at("key") == "ns") node_scores[owner] = std::stod(e.text);
  }
  CHECK(edges == 10);
  CHECK(nodes == kg.entities().size());
  REQUIRE(edge_scores.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(edge_scores[i] - rep.triple_scores[i]) <= 1e-12);
  for (const auto& [id, s] : rep.node_scores) CHECK(std::abs(node_scores.at(id) - s) <= 1e-12);

  const KnowledgeGraph one({make_triple("a & b", "r", "a & b")});
  const auto single = read_xml(export_graphml(one, scores_for(one, {0.5})));
  CHECK(std::count_if(single.begin(), single.end(), [](const XmlElement& e) { return e.name == "node"; }) == 1);
}

TEST_CASE("json report") {
  const auto kg = testing::load_kg("hormones10.json");
  PipelineConfig cfg;
  const auto ex = explain(kg, "Which receptor binds insulin?", cfg);
  ReportInput in;
  in.kg = &kg;
  in.attribution = &ex.report;
  in.intercept = ex.fit.intercept;
  in.fidelity = ex.fidelity;
  in.manifest.config = {{"metric", "inv_wd"}};
  const auto a = export_report(in);
  CHECK(a == export_report(in));

  const auto doc = nlohmann::json::parse(a);
  for (const char* key : {"eq15_r2", "eq16_mean_l1", "eq17_mean_l2", "eq18_weighted_l1", "eq19_weighted_l2", "eq20_r2w",
                          "eq21_adj_r2w", "eq22_mean_loss"})
    CHECK(doc["metrics"].contains(key));
  CHECK(doc["metrics"]["eq19_weighted_l2"].get<double>() == ex.fidelity.weighted_l2);
  CHECK(doc["attribution"]["ranked_triples"][0]["index"] == 0);
  for (std::size_t i = 0; i < ex.report.ranking.size(); ++i)
    CHECK(doc["attribution"]["ranked_triples"][i]["score"].get<double>() == ex.report.ranking[i].score);
  CHECK_FALSE(doc["manifest"].contains("wall_times_s"));
  CHECK(doc["manifest"]["version"] == std::string(kVersion));

  ReportInput unit;
  FidelityReport perfect;
  perfect.r2 = 1.0;
  unit.fidelity = perfect;
  CHECK(export_report(unit).find("\"eq15_r2\": 1.0") != std::string::npos);

  // keys come out sorted
  CHECK(a.find("\"attribution\"") < a.find("\"manifest\""));
  CHECK(a.find("\"manifest\"") < a.find("\"metrics\""));
}
