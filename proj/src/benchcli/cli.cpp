#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "flowsynth/benchcli/bench.hpp"
#include "flowsynth/errors.hpp"
#include "flowsynth/kbgraph/constraints.hpp"
#include "flowsynth/kbgraph/graph_io.hpp"
#include "flowsynth/kbgraph/names.hpp"
#include "flowsynth/metrics/ged.hpp"
#include "flowsynth/metrics/graph_metrics.hpp"
#include "flowsynth/adapter/judge.hpp"

namespace flowsynth {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// Exit status 1 without a usage synopsis.
struct ValidationFailure {};

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "table";
  std::string log_llm;
  std::string endpoint;
  std::string token_env;
  double timeout = 60;
  std::size_t retries = 3;
  std::size_t max_in_flight = 4;
  std::string mock_table;
  std::size_t jobs = 1;
};

class LoggedGenerator : public TextGenerator {
 public:
  LoggedGenerator(std::unique_ptr<TextGenerator> inner, LlmLog& log) : inner_(std::move(inner)), log_(log) {}
  std::string generate(const GenerationRequest& req) override {
    ordered_json rec{{"request", request_to_json(req)}, {"tags", req.tags}, {"attempt", 1}};
    try {
      std::string text = inner_->generate(req);
      rec["response"] = text;
      log_.write(rec);
      return text;
    } catch (const std::exception& e) {
      rec["error"] = "generator";
      rec["detail"] = e.what();
      log_.write(rec);
      throw;
    }
  }
  std::string name() const override { return inner_->name(); }

 private:
  std::unique_ptr<TextGenerator> inner_;
  LlmLog& log_;
};

class Context {
 public:
  Context(const GlobalOptions& g, std::ostream& out) : g_(g), out_(out) {}

  // kind: mock | remote | template.
  std::unique_ptr<TextGenerator> generator(const std::string& kind) {
    std::unique_ptr<TextGenerator> gen;
    if (kind == "remote") {
      GeneratorConfig cfg;
      cfg.endpoint = g_.endpoint;
      cfg.auth_token_env = g_.token_env;
      cfg.timeout_seconds = g_.timeout;
      cfg.retries = g_.retries;
      cfg.max_in_flight = g_.max_in_flight;
      return std::make_unique<RemoteGenerator>(cfg, log());
    }
    if (kind == "mock") {
      if (g_.mock_table.empty()) throw CLI::ValidationError("--mock-table", "required for a mock generator");
      gen = std::make_unique<MockGenerator>(load_mock_table(g_.mock_table));
    } else if (kind == "template") {
      gen = std::make_unique<TemplateGenerator>();
    } else {
      throw CLI::ValidationError("generator", "unknown generator " + kind);
    }
    if (LlmLog* l = log()) return std::make_unique<LoggedGenerator>(std::move(gen), *l);
    return gen;
  }

  // Writes a JSON document to --out when given.
  void save(const ordered_json& j) const {
    if (!g_.out.empty()) write_text_file(g_.out, j.dump(2) + "\n");
  }

  // JSON to stdout for --format json, otherwise the table text.
  void show(const ordered_json& j, const std::string& table) const {
    if (g_.format == "json") {
      out_ << j.dump(2) << "\n";
    } else {
      out_ << table;
    }
  }

  const GlobalOptions& options() const { return g_; }
  std::ostream& out() const { return out_; }

 private:
  LlmLog* log() {
    if (g_.log_llm.empty()) return nullptr;
    if (!log_) {
      log_file_ = std::make_unique<std::ofstream>(g_.log_llm, std::ios::app);
      if (!*log_file_) throw Error(ErrorCode::kIo, "cannot open " + g_.log_llm, g_.log_llm);
      log_ = std::make_unique<LlmLog>(*log_file_);
    }
    return log_.get();
  }

  const GlobalOptions& g_;
  std::ostream& out_;
  std::unique_ptr<std::ofstream> log_file_;
  std::unique_ptr<LlmLog> log_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v;
  return s.str();
}

// A path to a JSON list / text file of names, or a comma separated list.
UnitSelection read_units(const std::string& spec, const KnowledgeBase& kb) {
  std::vector<std::string> names;
  if (fs::is_regular_file(spec)) {
    const std::string text = read_text_file(spec);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
      for (const auto& n : json::parse(text)) names.push_back(n.get<std::string>());
    } else {
      std::string item;
      for (char c : text) {
        if (c == ',' || c == '\n') {
          names.push_back(item);
          item.clear();
        } else {
          item.push_back(c);
        }
      }
      names.push_back(item);
    }
  } else {
    std::stringstream s(spec);
    std::string item;
    while (std::getline(s, item, ',')) names.push_back(item);
  }
  UnitSelection v;
  for (const auto& n : names) {
    if (normalize_name(n).empty()) continue;
    v.units.insert(canonicalize_unit_name(n, kb));
  }
  return v;
}

std::string phi_table(const PhiReport& phi, double iov_score) {
  std::string t = std::string("phi: ") + (phi.satisfied ? "satisfied" : "violated") + " (" +
                  std::to_string(phi.checked_edges) + " edges checked)\n";
  for (const auto& v : phi.violations) t += "  " + describe_edge(v.edge) + ": " + v.reason + "\n";
  t += "iov: " + fmt(iov_score) + "\n";
  return t;
}

struct BenchOptions {
  std::string dir;
  std::string predictions;
  std::string predictions_out;
  std::string selector = "oracle";
  std::string proposer = "heuristic";
  std::string rationale_mode = "all";
  std::size_t context_n = 3;
  std::size_t max_iters = 10;
  bool use_gt_units = false;
  std::string graphs_dir;
  std::string train;
};

struct Options {
  std::string kb_path;
  std::string predicates_path;
  std::string graph_path;
  std::string units;
  std::string proposer = "heuristic";
  std::string rationale_mode = "all";
  std::string rationale_file;
  std::string trace_path;
  std::size_t context_n = 3;
  std::size_t max_iters = 10;
  std::string pairs_path;
  std::string teacher = "template";
  std::string stats_path;
  std::string pairs_out;
  std::size_t synthetic = 0;
  std::size_t max_attempts = 3;
  double fraction = 0.10;
  std::string pred_graph;
  std::string gt_graph;
  std::string rules;
  std::string pred_units;
  std::string gt_units;
  BenchOptions bench;
};

void setup_kb(CLI::App& root, Context& ctx, Options& opts) {
  auto* kb = root.add_subcommand("kb", "Knowledge base tools")->require_subcommand(1);
  auto* validate = kb->add_subcommand("validate", "Load and validate a knowledge base");
  validate->add_option("kb", opts.kb_path, "Knowledge base JSON")->required();
  validate->add_option("--predicates", opts.predicates_path, "Predicates JSON to check against the KB");
  validate->callback([&ctx, &opts] {
    ordered_json j{{"kb", opts.kb_path}};
    std::string table;
    bool ok = true;
    try {
      KnowledgeBase k = load_knowledge_base(opts.kb_path);
      j["units"] = k.units().size();
      j["materials"] = k.materials().size();
      j["motifs"] = k.motifs().size();
      j["critical_paths"] = k.critical_paths().size();
      table = "ok: " + std::to_string(k.units().size()) + " units, " + std::to_string(k.materials().size()) +
              " materials, " + std::to_string(k.motifs().size()) + " motifs, " +
              std::to_string(k.critical_paths().size()) + " critical paths\n";
      if (!opts.predicates_path.empty()) {
        auto violations = validate_predicates(load_predicates(opts.predicates_path), k);
        ordered_json list = ordered_json::array();
        for (const auto& v : violations) {
          list.push_back({{"entity", v.entity}, {"invariant", v.invariant}, {"detail", v.detail}});
          table += "invalid: " + v.entity + ": " + v.detail + "\n";
        }
        j["predicate_violations"] = list;
        ok = violations.empty();
      }
    } catch (const Error& e) {
      ok = false;
      j["error"] = e.what();
      table = std::string("invalid: ") + e.what() + "\n";
    }
    j["valid"] = ok;
    ctx.show(j, table);
    ctx.save(j);
    if (!ok) throw ValidationFailure{};
  });
}

void setup_graph(CLI::App& root, Context& ctx, Options& opts) {
  auto* graph = root.add_subcommand("graph", "Process graph tools")->require_subcommand(1);
  auto* check = graph->add_subcommand("check", "Check material compatibility and I/O rules");
  check->add_option("--kb", opts.kb_path, "Knowledge base JSON")->required();
  check->add_option("--graph", opts.graph_path, "Graph JSON")->required();
  check->callback([&ctx, &opts] {
    KnowledgeBase kb = load_knowledge_base(opts.kb_path);
    ProcessGraph g = load_graph(opts.graph_path, kb);
    const PhiReport phi = check_phi(g, kb);
    const double io = iov(g, kb);
    ordered_json violations = ordered_json::array();
    for (const auto& v : phi.violations) violations.push_back({{"edge", describe_edge(v.edge)}, {"reason", v.reason}});
    ordered_json j{{"phi_satisfied", phi.satisfied}, {"checked_edges", phi.checked_edges}, {"violations", violations},
                   {"iov", io}};
    ctx.show(j, phi_table(phi, io));
    ctx.save(j);
    if (!phi.satisfied) throw ValidationFailure{};
  });
}

void setup_synth(CLI::App& root, Context& ctx, Options& opts) {
  auto* synth = root.add_subcommand("synth", "Synthesize a process graph for a unit set");
  synth->add_option("--kb", opts.kb_path, "Knowledge base JSON")->required();
  synth->add_option("--units", opts.units, "Unit list file or comma separated names")->required();
  synth->add_option("--proposer", opts.proposer, "Edge proposer")
      ->check(CLI::IsMember({"heuristic", "mock", "remote"}));
  synth->add_option("--context-n", opts.context_n, "Motifs retrieved as context");
  synth->add_option("--max-repair-iters", opts.max_iters, "Repair iteration bound")->check(CLI::PositiveNumber);
  synth->add_option("--rationale-mode", opts.rationale_mode, "Context forwarded to the proposer")
      ->check(CLI::IsMember({"none", "reasoning", "key_topology", "all"}));
  synth->add_option("--rationale", opts.rationale_file, "File holding the stage 1 rationale");
  synth->add_option("--trace", opts.trace_path, "Write the repair trace JSON here");
  synth->callback([&ctx, &opts] {
    KnowledgeBase kb = load_knowledge_base(opts.kb_path);
    SynthConfig cfg;
    cfg.context_n = opts.context_n;
    cfg.max_repair_iters = opts.max_iters;
    cfg.seed = ctx.options().seed;
    cfg.proposer = parse_proposer_kind(opts.proposer);
    cfg.rationale_mode = parse_rationale_mode(opts.rationale_mode);
    std::unique_ptr<TextGenerator> gen;
    if (cfg.proposer != ProposerKind::kHeuristic) gen = ctx.generator(opts.proposer);
    const std::string rationale = opts.rationale_file.empty() ? std::string() : read_text_file(opts.rationale_file);
    auto [g, trace] = synthesize(read_units(opts.units, kb), kb, cfg, gen.get(), rationale);
    if (!opts.trace_path.empty()) write_text_file(opts.trace_path, trace_to_json(trace).dump(2) + "\n");
    const ordered_json j = graph_to_json(g);
    ctx.save(j);
    if (ctx.options().out.empty() || ctx.options().format == "json") {
      ctx.out() << j.dump(2) << "\n";
    } else {
      ctx.out() << "graph: " << g.node_count() << " nodes, " << g.edge_count() << " edges, "
                << (trace.converged ? "converged" : "not converged") << " after " << trace.iterations.size()
                << " repair iterations\n";
    }
  });
}

void setup_datagen(CLI::App& root, Context& ctx, Options& opts) {
  auto* dg = root.add_subcommand("datagen", "Build a validated SFT dataset");
  dg->add_option("--kb", opts.kb_path, "Knowledge base JSON")->required();
  dg->add_option("--predicates", opts.predicates_path, "Predicates JSON")->required();
  auto* pairs_opt = dg->add_option("--pairs", opts.pairs_path, "JSON list of {intent, units}");
  auto* synth_opt = dg->add_option("--synthetic", opts.synthetic, "Generate this many synthetic pairs instead");
  pairs_opt->excludes(synth_opt);
  dg->add_option("--teacher", opts.teacher, "Rationale teacher")->check(CLI::IsMember({"template", "mock", "remote"}));
  dg->add_option("--negative-fraction", opts.fraction, "Share of accepted positives turned into negatives")
      ->check(CLI::Range(0.0, 1.0));
  dg->add_option("--max-attempts", opts.max_attempts, "Refinement attempts per pair")->check(CLI::PositiveNumber);
  dg->add_option("--stats", opts.stats_path, "Write dataset statistics JSON here");
  dg->add_option("--pairs-out", opts.pairs_out, "Write the input pairs JSON here");
  dg->callback([&ctx, &opts] {
    if (opts.pairs_path.empty() && opts.synthetic == 0) throw CLI::ValidationError("--pairs", "give --pairs or --synthetic");
    KnowledgeBase kb = load_knowledge_base(opts.kb_path);
    auto predicates = load_predicates(opts.predicates_path);
    std::vector<IntentUnits> pairs = opts.pairs_path.empty() ? synthetic_pairs(kb, predicates, opts.synthetic, ctx.options().seed)
                                                        : parse_pairs(read_text_file(opts.pairs_path));
    if (!opts.pairs_out.empty()) write_text_file(opts.pairs_out, pairs_to_json(pairs).dump(2) + "\n");
    DatagenConfig cfg;
    cfg.negative_fraction = opts.fraction;
    cfg.seed = ctx.options().seed;
    cfg.max_attempts = opts.max_attempts;
    cfg.jobs = ctx.options().jobs;
    auto gen = ctx.generator(opts.teacher);
    auto [data, stats] = build_sft_dataset(pairs, kb, predicates, *gen, cfg);
    const std::string jsonl = dataset_to_jsonl(data);
    const ordered_json sj = stats_to_json(stats);
    if (!opts.stats_path.empty()) write_text_file(opts.stats_path, sj.dump(2) + "\n");
    if (ctx.options().out.empty()) {
      ctx.out() << jsonl;
      return;
    }
    write_text_file(ctx.options().out, jsonl);
    std::string table = "pairs " + std::to_string(stats.pairs) + ", accepted " +
                        std::to_string(stats.accepted_positives) + ", rejected " + std::to_string(stats.rejected) +
                        ", positives " + std::to_string(stats.positives) + ", negatives " +
                        std::to_string(stats.negatives) + ", errors " + std::to_string(stats.errors.size()) + "\n";
    ctx.show(sj, table);
  });
}

void add_stage1_options(CLI::App* app, BenchOptions& o) {
  app->add_option("--selector", o.selector, "Stage 1 unit selector")
      ->check(CLI::IsMember({"oracle", "empty", "file", "mock", "remote"}));
  app->add_option("--predictions-out", o.predictions_out, "Write stage 1 predictions JSON here");
}

void add_stage2_options(CLI::App* app, BenchOptions& o) {
  app->add_option("--proposer", o.proposer, "Stage 2 edge proposer")
      ->check(CLI::IsMember({"oracle", "heuristic", "mock", "remote"}));
  app->add_option("--rationale-mode", o.rationale_mode, "Context forwarded to the proposer")
      ->check(CLI::IsMember({"none", "reasoning", "key_topology", "all"}));
  app->add_option("--context-n", o.context_n, "Motifs retrieved as context");
  app->add_option("--max-repair-iters", o.max_iters, "Repair iteration bound")->check(CLI::PositiveNumber);
  app->add_option("--graphs-dir", o.graphs_dir, "Write synthesized graphs here");
}

Stage1Result stage1(Context& ctx, const BenchSuite& suite, const BenchOptions& o,
                    std::unique_ptr<TextGenerator>& keep) {
  Stage1Selector selector;
  if (o.selector == "oracle") {
    selector = oracle_selector();
  } else if (o.selector == "empty") {
    selector = empty_selector();
  } else if (o.selector == "file") {
    if (o.predictions.empty()) throw CLI::ValidationError("--predictions", "required for --selector file");
    selector = file_selector(json::parse(read_text_file(o.predictions)));
  } else {
    keep = ctx.generator(o.selector);
    selector = generator_selector(*keep, suite.kb);
  }
  Stage1Result r = run_stage1(suite, selector, ctx.options().jobs);
  if (!o.predictions_out.empty()) write_text_file(o.predictions_out, predictions_to_json(r.predictions).dump(2) + "\n");
  return r;
}

Stage2Result stage2(Context& ctx, const BenchSuite& suite, const BenchOptions& o,
                    const std::map<std::string, Stage1Prediction>* predictions, std::unique_ptr<TextGenerator>& keep) {
  Stage2Config cfg;
  cfg.synth.context_n = o.context_n;
  cfg.synth.max_repair_iters = o.max_iters;
  cfg.synth.seed = ctx.options().seed;
  cfg.synth.rationale_mode = parse_rationale_mode(o.rationale_mode);
  cfg.jobs = ctx.options().jobs;
  if (o.proposer == "oracle") {
    cfg.synth.proposer = ProposerKind::kMock;
    cfg.proposer = oracle_proposer();
  } else {
    cfg.synth.proposer = parse_proposer_kind(o.proposer);
    if (cfg.synth.proposer != ProposerKind::kHeuristic) {
      keep = ctx.generator(o.proposer);
      cfg.proposer = shared_proposer(*keep);
    }
  }
  cfg.use_gt_units = o.use_gt_units;
  if (!cfg.use_gt_units) {
    if (predictions != nullptr) {
      cfg.predictions = *predictions;
    } else if (!o.predictions.empty()) {
      auto select = file_selector(json::parse(read_text_file(o.predictions)));
      for (const auto& t : suite.tasks) {
        try {
          cfg.predictions[t.task_id] = select(t);
        } catch (const Error&) {
        }
      }
    } else {
      throw CLI::ValidationError("--use-gt-units", "give --use-gt-units or --predictions");
    }
  }
  Stage2Result r = run_stage2(suite, cfg);
  if (!o.graphs_dir.empty()) {
    fs::create_directories(o.graphs_dir);
    for (const auto& [id, g] : r.graphs) write_text_file(fs::path(o.graphs_dir) / (id + ".json"), serialize_graph(g));
  }
  return r;
}

void emit_report(Context& ctx, const ScoreReport& report) {
  const ordered_json j = report_to_json(report);
  ctx.show(j, render_report_table(report));
  ctx.save(j);
}

void setup_bench(CLI::App& root, Context& ctx, Options& opts) {
  auto* bench = root.add_subcommand("bench", "Benchmark runners")->require_subcommand(1);
  BenchOptions& o = opts.bench;

  auto* s1 = bench->add_subcommand("stage1", "Unit selection scores (UNF1, CoT-C)");
  s1->add_option("--bench", o.dir, "Benchmark directory")->required();
  s1->add_option("--predictions", o.predictions, "Predictions JSON for --selector file");
  add_stage1_options(s1, o);
  s1->callback([&ctx, &o] {
    BenchSuite suite = load_benchmark(o.dir);
    std::unique_ptr<TextGenerator> keep;
    emit_report(ctx, stage1(ctx, suite, o, keep).report);
  });

  auto* s2 = bench->add_subcommand("stage2", "Diagram synthesis scores (nGED, CSPC, IOV)");
  s2->add_option("--bench", o.dir, "Benchmark directory")->required();
  auto* gt = s2->add_flag("--use-gt-units", o.use_gt_units, "Synthesize from ground-truth unit sets");
  s2->add_option("--predictions", o.predictions, "Stage 1 predictions JSON")->excludes(gt);
  add_stage2_options(s2, o);
  s2->callback([&ctx, &o] {
    BenchSuite suite = load_benchmark(o.dir);
    std::unique_ptr<TextGenerator> keep;
    emit_report(ctx, stage2(ctx, suite, o, nullptr, keep).report);
  });

  auto* run = bench->add_subcommand("run", "Stage 1 followed by stage 2 on its predictions");
  run->add_option("--bench", o.dir, "Benchmark directory")->required();
  run->add_option("--predictions", o.predictions, "Predictions JSON for --selector file");
  run->add_flag("--use-gt-units", o.use_gt_units, "Feed ground-truth unit sets to stage 2");
  add_stage1_options(run, o);
  add_stage2_options(run, o);
  run->callback([&ctx, &o] {
    BenchSuite suite = load_benchmark(o.dir);
    std::unique_ptr<TextGenerator> keep1, keep2;
    Stage1Result r1 = stage1(ctx, suite, o, keep1);
    Stage2Result r2 = stage2(ctx, suite, o, &r1.predictions, keep2);
    emit_report(ctx, merge_reports(r1.report, r2.report));
  });

  auto* dj = bench->add_subcommand("disjoint", "Check that a training set shares no task with the benchmark");
  dj->add_option("--bench", o.dir, "Benchmark directory")->required();
  dj->add_option("--train", o.train, "Training dataset JSONL")->required();
  dj->callback([&ctx, &o] {
    BenchSuite suite = load_benchmark(o.dir);
    const PartitionReport r = check_partition_disjoint(parse_dataset_jsonl(read_text_file(o.train)), suite);
    std::string table = r.disjoint ? "disjoint\n" : "overlap: " + std::to_string(r.collisions.size()) + " collisions\n";
    for (const auto& c : r.collisions) table += "  train[" + std::to_string(c.train_index) + "] = " + c.task_id + "\n";
    const ordered_json j = partition_to_json(r);
    ctx.show(j, table);
    ctx.save(j);
    if (!r.disjoint) throw ValidationFailure{};
  });
}

void setup_score(CLI::App& root, Context& ctx, Options& opts) {
  auto* score = root.add_subcommand("score", "Score a prediction against ground truth");
  score->add_option("--kb", opts.kb_path, "Knowledge base JSON")->required();
  score->add_option("--pred", opts.pred_graph, "Predicted graph JSON");
  score->add_option("--gt", opts.gt_graph, "Ground-truth graph JSON");
  score->add_option("--rules", opts.rules, "Comma separated critical rule ids for CSPC");
  score->add_option("--pred-units", opts.pred_units, "Predicted units (file or comma separated)");
  score->add_option("--gt-units", opts.gt_units, "Ground-truth units (file or comma separated)");
  score->add_option("--rationale", opts.rationale_file, "Rationale text file for CoT-C");
  score->add_option("--predicates", opts.predicates_path, "Predicates JSON for the judge");
  score->callback([&ctx, &opts] {
    const bool graphs = !opts.pred_graph.empty() || !opts.gt_graph.empty();
    const bool units = !opts.pred_units.empty() || !opts.gt_units.empty();
    if (!graphs && !units) throw CLI::ValidationError("score", "give --pred/--gt or --pred-units/--gt-units");
    if ((!opts.pred_graph.empty()) != (!opts.gt_graph.empty())) throw CLI::ValidationError("--pred", "--pred needs --gt");
    if ((!opts.pred_units.empty()) != (!opts.gt_units.empty())) {
      throw CLI::ValidationError("--pred-units", "--pred-units needs --gt-units");
    }
    KnowledgeBase kb = load_knowledge_base(opts.kb_path);
    ordered_json j = ordered_json::object();
    std::string table;
    if (units) {
      const UnitSelection p = read_units(opts.pred_units, kb);
      const UnitSelection g = read_units(opts.gt_units, kb);
      j["unf1"] = unit_selection_f1(p, g);
      table += "UNF1  " + fmt(j["unf1"].get<double>()) + "\n";
      if (!opts.rationale_file.empty()) {
        const auto predicates =
            opts.predicates_path.empty() ? std::vector<MechanismPredicate>{} : load_predicates(opts.predicates_path);
        const std::string rationale = read_text_file(opts.rationale_file);
        std::vector<JustificationJudgment> judgments;
        for (const auto& u : intersection(p, g)) judgments.push_back(judge_justification(u, rationale, kb, predicates));
        j["cotc"] = cot_correctness(judgments, p, g);
        table += "CoT-C " + fmt(j["cotc"].get<double>()) + " (rule judge)\n";
      }
    }
    if (graphs) {
      const ProcessGraph p = load_graph(opts.pred_graph, kb);
      const ProcessGraph g = load_graph(opts.gt_graph, kb);
      std::vector<CriticalPathRule> selected;
      std::stringstream s(opts.rules);
      std::string id;
      while (std::getline(s, id, ',')) {
        if (id.empty()) continue;
        const CriticalPathRule* r = kb.find_rule(id);
        if (r == nullptr) throw Error(ErrorCode::kUnresolvedRule, "unknown critical rule " + id, id);
        selected.push_back(*r);
      }
      j["nged"] = approx_nged(p, g);
      j["cspc"] = cspc(p, selected, kb);
      j["iov"] = iov(p, kb);
      table += "nGED  " + fmt(j["nged"].get<double>()) + "\nCSPC  " + fmt(j["cspc"].get<double>()) + "\nIOV   " +
               fmt(j["iov"].get<double>()) + "\n";
    }
    ctx.show(j, table);
    ctx.save(j);
  });
}

}  // namespace

int cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  GlobalOptions g;
  Options opts;
  Context ctx(g, out);
  CLI::App app{"Process flow diagram synthesis and benchmarking", "flowsynth"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out", g.out, "Output file");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"table", "json"}));
  app.add_option("--log-llm", g.log_llm, "Append generator requests and responses as JSON lines");
  app.add_option("--endpoint", g.endpoint, "Remote generator URL");
  app.add_option("--token-env", g.token_env, "Environment variable holding the bearer token");
  app.add_option("--timeout", g.timeout, "Remote timeout in seconds")->check(CLI::PositiveNumber);
  app.add_option("--retries", g.retries, "Remote retries");
  app.add_option("--max-in-flight", g.max_in_flight, "Concurrent remote requests")->check(CLI::PositiveNumber);
  app.add_option("--mock-table", g.mock_table, "Mock generator table JSON");
  app.add_option("--jobs", g.jobs, "Parallel tasks")->check(CLI::PositiveNumber);
  setup_kb(app, ctx, opts);
  setup_graph(app, ctx, opts);
  setup_synth(app, ctx, opts);
  setup_datagen(app, ctx, opts);
  setup_bench(app, ctx, opts);
  setup_score(app, ctx, opts);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const ValidationFailure&) {
    return 1;
  } catch (const Error& e) {
    err << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace flowsynth
