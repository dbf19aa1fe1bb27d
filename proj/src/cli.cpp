#include "kgsmile/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "kgsmile/error.hpp"
#include "kgsmile/evaluation.hpp"
#include "kgsmile/export.hpp"
#include "kgsmile/pipeline.hpp"
#include "kgsmile/reasoning.hpp"

namespace kgsmile {

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << bytes;
}

void emit(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-")
    std::cout << bytes;
  else
    write_file(path, bytes);
}

struct PipelineFlags {
  std::string generator = "mock";
  std::string embedder = "deterministic";
  double temperature = 0.0;
  std::uint64_t seed = 0;
  std::size_t perturbations = 20;
  double removal_prob = 0.5;
  std::string metric = "inv_wd";
  std::string surrogate = "wls";
  std::string kernel_mode = "distance";
  double kernel_sigma = 0.25;
  std::string endpoint;
  std::string embed_endpoint;
  std::string model;
  std::string embed_model;
  std::size_t dim = 256;
  std::size_t workers = 1;
  bool timings = false;

  void attach(CLI::App* app) {
    app->add_option("--generator", generator, "Answer generator")->check(CLI::IsMember({"mock", "remote"}))
        ->capture_default_str();
    app->add_option("--embedder", embedder, "Text embedder")->check(CLI::IsMember({"deterministic", "remote"}))
        ->capture_default_str();
    app->add_option("--temperature", temperature, "Sampling temperature")->check(CLI::Range(0.0, 2.0))
        ->capture_default_str();
    app->add_option("--seed", seed, "Seed for masks and sampling")->capture_default_str();
    app->add_option("--perturbations", perturbations, "Number of perturbed graphs")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--removal-prob", removal_prob, "Per-triple removal probability")->capture_default_str();
    app->add_option("--metric", metric, "Text similarity target")
        ->check(CLI::IsMember({"cosine", "wd", "inv_wd", "inv_wd_cosine", "wd_cosine"}))
        ->capture_default_str();
    app->add_option("--surrogate", surrogate, "Surrogate regression")->check(CLI::IsMember({"wls", "bayes"}))
        ->capture_default_str();
    app->add_option("--kernel-mode", kernel_mode, "Kernel form")->check(CLI::IsMember({"distance", "literal-paper"}))
        ->capture_default_str();
    app->add_option("--kernel-sigma", kernel_sigma, "Kernel width")->capture_default_str();
    app->add_option("--endpoint", endpoint, "Chat-completions URL for the remote generator")
        ->envname("KGSMILE_ENDPOINT");
    app->add_option("--embed-endpoint", embed_endpoint, "Embeddings URL for the remote embedder");
    app->add_option("--model", model, "Remote generator model id");
    app->add_option("--embed-model", embed_model, "Remote embedder model id");
    app->add_option("--dim", dim, "Deterministic embedder dimension")->capture_default_str();
    app->add_option("--workers", workers, "Concurrent generate/embed calls")->capture_default_str();
    app->add_flag("--timings", timings, "Record stage wall times in the report");
  }

  PipelineConfig config() const {
    PipelineConfig cfg;
    cfg.generator.kind = generator == "remote" ? GeneratorKind::Remote : GeneratorKind::Mock;
    cfg.generator.temperature = temperature;
    cfg.generator.seed = seed;
    cfg.generator.endpoint = endpoint;
    cfg.generator.model_id = model;
    cfg.embedder.kind = embedder == "remote" ? EmbedderKind::Remote : EmbedderKind::Deterministic;
    cfg.embedder.dim = dim;
    cfg.embedder.endpoint = embed_endpoint.empty() ? endpoint : embed_endpoint;
    cfg.embedder.model_id = embed_model;
    cfg.perturbation.num_samples = perturbations;
    cfg.perturbation.removal_prob = removal_prob;
    cfg.perturbation.seed = seed;
    cfg.perturbation.workers = workers;
    cfg.similarity.text_metric = parse_text_metric(metric);
    cfg.similarity.kernel_mode = parse_kernel_mode(kernel_mode);
    cfg.similarity.kernel_sigma = kernel_sigma;
    cfg.surrogate = parse_surrogate_method(surrogate);
    cfg.design.metric = cfg.similarity.text_metric;
    return cfg;
  }

  RunManifest manifest() const {
    RunManifest m;
    char buf[32];
    auto num = [&buf](double v) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    m.config = {{"generator", generator},
                {"embedder", embedder},
                {"temperature", num(temperature)},
                {"perturbations", std::to_string(perturbations)},
                {"removal_prob", num(removal_prob)},
                {"metric", metric},
                {"surrogate", surrogate},
                {"kernel_mode", kernel_mode},
                {"kernel_sigma", num(kernel_sigma)},
                {"dim", std::to_string(dim)}};
    if (generator == "remote") {
      m.config["endpoint"] = endpoint;
      m.config["model"] = model;
    }
    m.seeds = {{"generator", seed}, {"perturbation", seed}};
    return m;
  }
};

Triple parse_injected(const std::string& spec) {
  const auto a = spec.find('|');
  const auto b = a == std::string::npos ? a : spec.find('|', a + 1);
  if (b == std::string::npos) throw InputError("--inject expects 'subject|predicate|object'");
  return make_triple(spec.substr(0, a), spec.substr(a + 1, b - a - 1), spec.substr(b + 1));
}

std::map<std::string, double> read_accuracy_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::map<std::string, double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InputError(path + ":" + std::to_string(lineno) + ": expected two columns");
    const std::string id = trim(std::string_view(line).substr(0, comma));
    const std::string val = trim(std::string_view(line).substr(comma + 1));
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      if (lineno == 1) continue;  // header row
      throw InputError(path + ":" + std::to_string(lineno) + ": accuracy '" + val + "' is not a number");
    }
    out[id] = v;
  }
  return out;
}

double seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::map<std::string, double> stage_map(double ingest_s, const StageTimes& t) {
  return {{"ingest", ingest_s},
          {"perturb_generate", t.perturb_generate_s},
          {"fit", t.fit_s},
          {"evaluate", t.evaluate_s},
          {"total", ingest_s + t.total()}};
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Remote: return kExitRemote;
    case ErrorKind::Invariant: return kExitInternal;
    default: return kExitInput;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Perturbation-based attribution for graph-grounded answers"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML key/value file mirroring the flags (flags win)");

  // ingest
  std::string kg_path, out_path, question;
  std::vector<std::string> core_terms, secondary_terms;
  double min_score = 1.0;
  std::size_t top_components = 0, parts = 1;
  bool whole_word = false;
  auto* ingest = app.add_subcommand("ingest", "Parse, filter, keep top components and partition a graph");
  ingest->add_option("--kg", kg_path, "triples-json file")->required();
  ingest->add_option("--core-terms", core_terms, "Core terms (weight 2)")->delimiter(',');
  ingest->add_option("--secondary-terms", secondary_terms, "Secondary terms (weight 1)")->delimiter(',');
  ingest->add_option("--min-score", min_score, "Minimum term score to keep a triple")->capture_default_str();
  ingest->add_flag("--whole-word", whole_word, "Match terms on token boundaries");
  ingest->add_option("--top-components", top_components, "Keep the k largest connected components (0 keeps all)");
  ingest->add_option("--parts", parts, "Split into this many parts")->check(CLI::PositiveNumber);
  ingest->add_option("--out", out_path, "Output triples-json (parts get .partN suffixes)");

  // explain
  PipelineFlags pf;
  std::string out_dot, out_graphml, out_report;
  auto* explain_cmd = app.add_subcommand("explain", "Attribute an answer to graph triples");
  explain_cmd->add_option("--kg", kg_path, "triples-json file")->required();
  explain_cmd->add_option("--question", question, "Question text")->required();
  pf.attach(explain_cmd);
  explain_cmd->add_option("--out-dot", out_dot, "Coloured DOT output");
  explain_cmd->add_option("--out-graphml", out_graphml, "GraphML output");
  explain_cmd->add_option("--out-report", out_report, "JSON report (stdout when absent)");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Evaluation protocols");
  evaluate->require_subcommand(1);
  std::string qa_path, inject_spec, accuracy_csv, answer_a, answer_b, file_a, file_b;
  std::size_t top_k = 0, runs = 50;
  auto add_common = [&](CLI::App* sub, bool needs_question) {
    sub->add_option("--kg", kg_path, "triples-json file")->required();
    if (needs_question) sub->add_option("--question", question, "Question text")->required();
    sub->add_option("--out", out_path, "JSON report (stdout when absent)");
    pf.attach(sub);
  };
  auto* ev_fid = evaluate->add_subcommand("fidelity", "Surrogate fidelity metrics");
  add_common(ev_fid, true);
  auto* ev_acc = evaluate->add_subcommand("accuracy", "Node-level AUC against ground truth");
  add_common(ev_acc, false);
  ev_acc->add_option("--qa", qa_path, "qa-json file")->required();
  auto* ev_stab = evaluate->add_subcommand("stability", "Top-k Jaccard under triple injection");
  add_common(ev_stab, true);
  ev_stab->add_option("--inject", inject_spec, "Injected triple as 'subject|predicate|object'")->required();
  ev_stab->add_option("--top-k", top_k, "Explanation set size (default 5)");
  auto* ev_cons = evaluate->add_subcommand("consistency", "Spread across repeated runs");
  add_common(ev_cons, true);
  ev_cons->add_option("--runs", runs, "Runs per part")->check(CLI::Range(2, 100000))->capture_default_str();
  ev_cons->add_option("--parts", parts, "Partition the graph into this many parts")->check(CLI::PositiveNumber);
  auto* ev_faith = evaluate->add_subcommand("faithfulness", "Pearson of per-question AUC against benchmark accuracy");
  add_common(ev_faith, false);
  ev_faith->add_option("--qa", qa_path, "qa-json file")->required();
  ev_faith->add_option("--accuracy-csv", accuracy_csv, "CSV of question_id,accuracy")->required();
  auto* ev_comp = evaluate->add_subcommand("composite", "Composite similarity of two answers");
  ev_comp->add_option("--answer-a", answer_a, "First answer text");
  ev_comp->add_option("--answer-b", answer_b, "Second answer text");
  ev_comp->add_option("--file-a", file_a, "File holding the first answer")->excludes("--answer-a");
  ev_comp->add_option("--file-b", file_b, "File holding the second answer")->excludes("--answer-b");
  ev_comp->add_option("--out", out_path, "JSON report (stdout when absent)");
  ev_comp->add_option("--dim", pf.dim, "Deterministic embedder dimension")->capture_default_str();

  // cot
  std::size_t max_depth = kDefaultChainDepth;
  auto* cot = app.add_subcommand("cot", "Chain-of-thought triple chain and answer");
  add_common(cot, true);
  cot->add_option("--max-depth", max_depth, "Maximum chain length")->capture_default_str();

  // preprompt
  std::size_t rephrases = 5;
  std::string rephraser_kind = "template";
  auto* pre = app.add_subcommand("preprompt", "Rephrase, drop refusals and pick the medoid answer");
  add_common(pre, true);
  pre->add_option("--rephrases", rephrases, "Number of rephrasings")->check(CLI::PositiveNumber)
      ->capture_default_str();
  pre->add_option("--rephraser", rephraser_kind, "Rephrasing source")->check(CLI::IsMember({"template", "generator"}))
      ->capture_default_str();

  // bench
  std::vector<std::size_t> counts = {10, 20, 30, 60, 120};
  auto* bench = app.add_subcommand("bench", "Wall time across perturbation counts");
  add_common(bench, true);
  bench->add_option("--counts", counts, "Perturbation counts")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    const auto t_ingest = std::chrono::steady_clock::now();
    const auto load_kg = [&] { return parse_triples(read_file(kg_path)); };

    if (*ingest) {
      FilterConfig fc;
      fc.core_terms = core_terms;
      fc.secondary_terms = secondary_terms;
      fc.min_score = min_score;
      fc.match = whole_word ? TermMatch::WholeWord : TermMatch::Substring;
      KnowledgeGraph kg = load_kg();
      const std::size_t loaded = kg.size();
      if (!core_terms.empty() || !secondary_terms.empty()) kg = filter_graph(kg, fc);
      if (top_components > 0) kg = select_top_components(connected_components(kg), top_components);
      std::cerr << "ingest: " << loaded << " triples loaded, " << kg.size() << " kept\n";
      if (parts <= 1) {
        emit(out_path, write_triples_json(kg));
      } else {
        if (out_path.empty()) throw InputError("--parts needs --out");
        const auto stem = out_path.size() > 5 && out_path.ends_with(".json") ? out_path.substr(0, out_path.size() - 5)
                                                                             : out_path;
        for (const auto& p : partition(kg, parts))
          write_file(stem + ".part" + std::to_string(p.id) + ".json", write_triples_json(slice(kg, p)));
      }
      return kExitOk;
    }

    if (*explain_cmd) {
      const KnowledgeGraph kg = load_kg();
      const double ingest_s = seconds(t_ingest);
      const auto ex = explain(kg, question, pf.config());
      ReportInput in;
      in.kg = &kg;
      in.attribution = &ex.report;
      in.intercept = ex.fit.intercept;
      in.fidelity = ex.fidelity;
      in.answers = {{"question", question}, {"original", ex.run.original_answer.text}};
      in.manifest = pf.manifest();
      if (pf.timings) in.manifest.wall_times_s = stage_map(ingest_s, ex.times);
      if (!out_dot.empty()) write_file(out_dot, export_dot(kg, ex.report));
      if (!out_graphml.empty()) write_file(out_graphml, export_graphml(kg, ex.report));
      emit(out_report, export_report(in));
      return kExitOk;
    }

    if (*evaluate) {
      if (*ev_comp) {
        const std::string a = file_a.empty() ? answer_a : read_file(file_a);
        const std::string b = file_b.empty() ? answer_b : read_file(file_b);
        EmbedderConfig ec;
        ec.dim = pf.dim;
        ReportInput in;
        in.composite = composite_similarity(a, b, ec);
        in.manifest.config = {{"dim", std::to_string(pf.dim)}};
        emit(out_path, export_report(in));
        return kExitOk;
      }
      const KnowledgeGraph kg = load_kg();
      const PipelineConfig cfg = pf.config();
      ReportInput in;
      in.kg = &kg;
      in.manifest = pf.manifest();
      if (*ev_fid) {
        const auto ex = explain(kg, question, cfg);
        in.fidelity = ex.fidelity;
        in.attribution = &ex.report;
        in.intercept = ex.fit.intercept;
        emit(out_path, export_report(in));
      } else if (*ev_acc) {
        const auto items = parse_qa(read_file(qa_path));
        for (const auto& item : items)
          for (const auto& id : unknown_ground_truth(item, kg))
            std::cerr << "warning: ground-truth node '" << id << "' is not in the graph\n";
        in.accuracy = accuracy(kg, items, cfg);
        emit(out_path, export_report(in));
      } else if (*ev_stab) {
        const Triple injected = parse_injected(inject_spec);
        in.stability = stability_run(kg, question, injected, cfg, top_k == 0 ? kDefaultStabilityTopK : top_k);
        emit(out_path, export_report(in));
      } else if (*ev_cons) {
        std::vector<KnowledgeGraph> graphs;
        if (parts <= 1)
          graphs.push_back(kg);
        else
          for (const auto& p : partition(kg, parts)) graphs.push_back(slice(kg, p));
        in.consistency = consistency(graphs, question, runs, cfg);
        in.manifest.config["runs"] = std::to_string(runs);
        emit(out_path, export_report(in));
      } else if (*ev_faith) {
        const auto items = parse_qa(read_file(qa_path));
        const auto acc = accuracy(kg, items, cfg);
        const auto bench_acc = read_accuracy_csv(accuracy_csv);
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < items.size(); ++i) {
          const auto& q = acc.questions[i];
          if (!q.auc) continue;
          auto it = bench_acc.find(std::to_string(i + 1));
          if (it == bench_acc.end()) it = bench_acc.find(items[i].question);
          if (it == bench_acc.end()) continue;
          xs.push_back(*q.auc);
          ys.push_back(it->second);
        }
        if (xs.size() < 2) throw InputError("fewer than two questions have both an AUC and a benchmark accuracy");
        in.accuracy = acc;
        in.faithfulness_pearson = pearson(xs, ys);
        emit(out_path, export_report(in));
      }
      return kExitOk;
    }

    if (*cot) {
      const KnowledgeGraph kg = load_kg();
      const auto chain = generate_chain_of_thought(kg, question, max_depth);
      std::vector<Triple> chain_triples;
      for (const auto& s : chain.steps) chain_triples.push_back(s.triple);
      auto gen = make_generator(pf.config().generator);
      const std::string preamble = format_triples_for_prompt(chain);
      const KnowledgeGraph chain_kg = chain_triples.empty() ? KnowledgeGraph{} : KnowledgeGraph(chain_triples);
      const Answer ans = gen->generate(question, chain_kg);
      nlohmann::json doc = {{"question", question},
                            {"steps", chain.rendered_lines()},
                            {"prompt", build_prompt(question, KnowledgeGraph{}, preamble)},
                            {"answer", ans.text}};
      emit(out_path, doc.dump(2) + "\n");
      return kExitOk;
    }

    if (*pre) {
      const KnowledgeGraph kg = load_kg();
      const PipelineConfig cfg = pf.config();
      auto gen = make_generator(cfg.generator);
      auto emb = make_embedder(cfg.embedder);
      PrePromptConfig pc;
      pc.num_rephrases = rephrases;
      TemplateRephraser templ;
      GeneratorRephraser via_gen(*gen);
      Rephraser& reph = rephraser_kind == "generator" ? static_cast<Rephraser&>(via_gen) : templ;
      const auto res = preprompt_answer(question, kg, *gen, reph, *emb, pc);
      nlohmann::json kept = nlohmann::json::array();
      for (const auto& k : res.kept) kept.push_back({{"variant", k.variant}, {"question", k.question}, {"answer", k.answer.text}});
      nlohmann::json doc = {{"question", question},
                            {"variants", res.variants},
                            {"kept", std::move(kept)},
                            {"dropped", res.dropped},
                            {"final_answer", res.final_answer.text}};
      if (!res.kept.empty()) doc["medoid_variant"] = res.medoid_variant;
      emit(out_path, doc.dump(2) + "\n");
      return kExitOk;
    }

    if (*bench) {
      const KnowledgeGraph kg = load_kg();
      const double ingest_s = seconds(t_ingest);
      std::ostringstream table;
      nlohmann::json rows = nlohmann::json::array();
      char line[160];
      std::snprintf(line, sizeof line, "%13s %12s %10s %10s %10s %10s\n", "perturbations", "ingest_s", "perturb_s",
                    "fit_s", "eval_s", "total_s");
      table << line;
      for (std::size_t n : counts) {
        PipelineConfig cfg = pf.config();
        cfg.perturbation.num_samples = n;
        const auto ex = explain(kg, question, cfg);
        const auto& t = ex.times;
        std::snprintf(line, sizeof line, "%13zu %12.6f %10.6f %10.6f %10.6f %10.6f\n", n, ingest_s,
                      t.perturb_generate_s, t.fit_s, t.evaluate_s, ingest_s + t.total());
        table << line;
        nlohmann::json row = stage_map(ingest_s, t);
        row["perturbations"] = n;
        row["r2w"] = ex.fidelity.r2w ? nlohmann::json(*ex.fidelity.r2w) : nlohmann::json(nullptr);
        rows.push_back(std::move(row));
      }
      std::cout << table.str();
      if (!out_path.empty()) write_file(out_path, rows.dump(2) + "\n");
      return kExitOk;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace kgsmile
