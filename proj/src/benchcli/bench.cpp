#include "flowsynth/benchcli/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <thread>

#include "common/json_read.hpp"
#include "flowsynth/adapter/judge.hpp"
#include "flowsynth/errors.hpp"
#include "flowsynth/kbgraph/constraints.hpp"
#include "flowsynth/kbgraph/graph_io.hpp"
#include "flowsynth/kbgraph/names.hpp"
#include "flowsynth/metrics/ged.hpp"
#include "flowsynth/metrics/graph_metrics.hpp"

namespace flowsynth {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fixture_error(ErrorCode code, const fs::path& file, const std::string& message) {
  throw Error(code, file.string() + ": " + message, file.string());
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  for (std::size_t j = 0; j < jobs; ++j) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

BenchTask load_task(const fs::path& file, const fs::path& dir, const KnowledgeBase& kb) {
  BenchTask task;
  json j;
  try {
    j = detail::parse_json_text(read_text_file(file), file.string());
    const std::string path = file.filename().string();
    detail::require_object(j, path);
    detail::check_format_version(j, path);
    task.task_id = detail::get_string(j, "task_id", path);
    task.archetype = detail::get_string(j, "archetype", path);
    task.intent = intent_from_json(detail::require(j, "intent", path), detail::child(path, "intent"));
    task.gt_units.units = detail::get_string_set(j, "gt_units", path);
    task.gt_rationale = detail::get_string(j, "gt_rationale", path);
    task.gt_graph = load_graph(dir / detail::get_string(j, "gt_graph", path), kb);
    for (const auto& id : detail::get_string_list(j, "critical_rules", path)) {
      const CriticalPathRule* rule = kb.find_rule(id);
      if (rule == nullptr) fixture_error(ErrorCode::kUnresolvedRule, file, "unknown critical rule " + id);
      task.critical_rules.push_back(*rule);
    }
  } catch (const Error& e) {
    if (e.subject() == file.string()) throw;
    fixture_error(e.code(), file, e.what());
  }
  if (std::find(std::begin(kBenchArchetypes), std::end(kBenchArchetypes), task.archetype) ==
      std::end(kBenchArchetypes)) {
    fixture_error(ErrorCode::kInvariant, file, "unknown archetype " + task.archetype);
  }
  for (const auto& u : task.gt_units.units) {
    if (!kb.has_unit(u)) fixture_error(ErrorCode::kDanglingReference, file, "unknown unit " + u);
  }
  std::set<std::string> graph_units;
  for (const auto& n : task.gt_graph.nodes()) graph_units.insert(n.unit);
  if (graph_units != task.gt_units.units) {
    fixture_error(ErrorCode::kInvariant, file, "gt_graph units differ from gt_units");
  }
  const PhiReport phi = check_phi(task.gt_graph, kb);
  if (!phi.satisfied) {
    fixture_error(ErrorCode::kInvalidGraph, file,
                  "gt_graph violates material compatibility at " + describe_edge(phi.violations.front().edge));
  }
  if (iov(task.gt_graph, kb) != 1.0) fixture_error(ErrorCode::kInvariant, file, "gt_graph has IOV below 1");
  return task;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string edges_text(const ProcessGraph& g) {
  std::string out;
  for (const auto& e : g.edges()) {
    out += g.unit_of(e.from) + " -> " + g.unit_of(e.to);
    if (e.material) out += " : " + *e.material;
    out += "\n";
  }
  return out;
}

}  // namespace

BenchSuite load_benchmark(const fs::path& dir) {
  const fs::path kb_file = dir / "kb.json";
  if (!fs::is_regular_file(kb_file)) fixture_error(ErrorCode::kIo, kb_file, "missing knowledge base");
  BenchSuite suite;
  try {
    suite.kb = load_knowledge_base(kb_file);
  } catch (const Error& e) {
    fixture_error(e.code(), kb_file, e.what());
  }
  const fs::path pred_file = dir / "predicates.json";
  if (fs::exists(pred_file)) {
    try {
      suite.predicates = load_predicates(pred_file);
    } catch (const Error& e) {
      fixture_error(e.code(), pred_file, e.what());
    }
    const auto violations = validate_predicates(suite.predicates, suite.kb);
    if (!violations.empty()) fixture_error(ErrorCode::kInvariant, pred_file, violations.front().detail);
  }

  const fs::path task_dir = dir / "tasks";
  std::vector<fs::path> files;
  if (fs::is_directory(task_dir)) {
    for (const auto& entry : fs::directory_iterator(task_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) fixture_error(ErrorCode::kIo, task_dir, "no task files");
  std::set<std::string> ids;
  for (const auto& f : files) {
    BenchTask task = load_task(f, dir, suite.kb);
    if (!ids.insert(task.task_id).second) fixture_error(ErrorCode::kDuplicateId, f, "duplicate task id " + task.task_id);
    auto& s = suite.stats[task.archetype];
    s.units += task.gt_units.units.size();
    s.flows += task.gt_graph.edge_count();
    suite.tasks.push_back(std::move(task));
  }
  std::stable_sort(suite.tasks.begin(), suite.tasks.end(), [](const BenchTask& a, const BenchTask& b) {
    const int ra = archetype_rank(a.archetype);
    const int rb = archetype_rank(b.archetype);
    return ra != rb ? ra < rb : a.task_id < b.task_id;
  });

  const fs::path stats_file = dir / "stats.json";
  if (fs::exists(stats_file)) {
    const json j = detail::parse_json_text(read_text_file(stats_file), stats_file.string());
    std::map<std::string, ArchetypeStats> expected;
    try {
      detail::require_object(j, "stats");
      for (const auto& [arch, v] : j.items()) {
        const std::string path = detail::child("stats", arch);
        detail::require_object(v, path);
        const auto& units = detail::require(v, "units", path);
        const auto& flows = detail::require(v, "flows", path);
        if (!units.is_number_unsigned() || !flows.is_number_unsigned()) detail::field_error(path, "counts must be unsigned");
        expected[arch] = {units.get<std::size_t>(), flows.get<std::size_t>()};
      }
    } catch (const Error& e) {
      fixture_error(e.code(), stats_file, e.what());
    }
    if (expected != suite.stats) {
      std::string got;
      for (const auto& [arch, s] : suite.stats) {
        got += " " + arch + "=" + std::to_string(s.units) + "/" + std::to_string(s.flows);
      }
      fixture_error(ErrorCode::kInvariant, stats_file, "task statistics differ:" + got);
    }
  }
  return suite;
}

std::string intent_fingerprint(const DesignIntent& intent) { return prompt_fingerprint(intent_to_json(intent).dump()); }

PartitionReport check_partition_disjoint(const std::vector<SftTriplet>& train, const BenchSuite& suite) {
  std::map<std::pair<std::string, std::set<std::string>>, std::string> bench;
  for (const auto& t : suite.tasks) bench[{intent_fingerprint(t.intent), t.gt_units.units}] = t.task_id;
  PartitionReport r;
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto it = bench.find({intent_fingerprint(train[i].intent), train[i].units.units});
    if (it != bench.end()) r.collisions.push_back({i, it->second});
  }
  r.disjoint = r.collisions.empty();
  return r;
}

ordered_json partition_to_json(const PartitionReport& r) {
  ordered_json collisions = ordered_json::array();
  for (const auto& c : r.collisions) collisions.push_back({{"train_index", c.train_index}, {"task_id", c.task_id}});
  return {{"disjoint", r.disjoint}, {"collisions", collisions}};
}

Stage1Selector oracle_selector() {
  return [](const BenchTask& t) { return Stage1Prediction{t.gt_units, t.gt_rationale}; };
}

Stage1Selector empty_selector() {
  return [](const BenchTask&) { return Stage1Prediction{}; };
}

Stage1Selector file_selector(const json& predictions) {
  detail::require_object(predictions, "predictions");
  std::map<std::string, Stage1Prediction> table;
  for (const auto& [id, v] : predictions.items()) {
    const std::string path = detail::child("predictions", id);
    detail::require_object(v, path);
    table[id] = {UnitSelection{detail::get_string_set(v, "units", path)},
                 detail::get_string_or(v, "rationale", path, "")};
  }
  return [table = std::move(table)](const BenchTask& t) {
    auto it = table.find(t.task_id);
    if (it == table.end()) throw Error(ErrorCode::kNoEntry, "no prediction for task " + t.task_id, t.task_id);
    return it->second;
  };
}

std::string selection_prompt(const BenchTask& task, const KnowledgeBase& kb) {
  std::string p =
      "Select the process units needed for the design intent below and explain why each is needed.\n"
      "Start with one line of the form: UNITS: <unit id>, <unit id>, ...\n\nINTENT\n";
  p += render_intent(task.intent);
  p += "\nUNIT LIBRARY\n";
  for (const auto& u : kb.units()) p += render_unit_schema(u) + "\n";
  return p;
}

Stage1Prediction parse_selection_reply(std::string_view reply, const KnowledgeBase& kb) {
  Stage1Prediction out;
  std::string rationale;
  std::size_t start = 0;
  while (start <= reply.size()) {
    std::size_t end = reply.find('\n', start);
    if (end == std::string_view::npos) end = reply.size();
    const std::string line = trim(reply.substr(start, end - start));
    start = end + 1;
    std::string head = line.substr(0, std::min<std::size_t>(6, line.size()));
    std::transform(head.begin(), head.end(), head.begin(), [](unsigned char c) { return std::toupper(c); });
    if (head == "UNITS:") {
      std::string_view rest = std::string_view(line).substr(6);
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string name = trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (name.empty()) continue;
        try {
          out.units.units.insert(canonicalize_unit_name(name, kb));
        } catch (const Error&) {
        }
      }
    } else if (!line.empty()) {
      if (!rationale.empty()) rationale.push_back('\n');
      rationale += line;
    }
  }
  out.rationale = std::move(rationale);
  return out;
}

Stage1Selector generator_selector(TextGenerator& gen, const KnowledgeBase& kb) {
  return [&gen, &kb](const BenchTask& t) {
    GenerationRequest req;
    req.prompt = selection_prompt(t, kb);
    req.tags["stage"] = "select";
    req.tags["task"] = t.task_id;
    return parse_selection_reply(gen.generate(req), kb);
  };
}

Stage1Result run_stage1(const BenchSuite& suite, const Stage1Selector& selector, std::size_t jobs) {
  const MentionIndex index(suite.kb);
  std::vector<ScoredTask> rows(suite.tasks.size());
  std::vector<std::optional<Stage1Prediction>> preds(suite.tasks.size());
  parallel_for(suite.tasks.size(), jobs, [&](std::size_t i) {
    const BenchTask& task = suite.tasks[i];
    ScoredTask& row = rows[i];
    row.task_id = task.task_id;
    row.archetype = task.archetype;
    try {
      Stage1Prediction p = selector(task);
      std::vector<JustificationJudgment> judgments;
      for (const auto& u : intersection(p.units, task.gt_units)) {
        judgments.push_back(judge_justification(u, p.rationale, suite.kb, suite.predicates, index));
      }
      row.unf1 = unit_selection_f1(p.units, task.gt_units);
      row.cotc = cot_correctness(judgments, p.units, task.gt_units);
      preds[i] = std::move(p);
    } catch (const std::exception& e) {
      row.unf1 = 0.0;
      row.cotc = 0.0;
      row.error = e.what();
    }
  });
  Stage1Result result;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i]) result.predictions[suite.tasks[i].task_id] = std::move(*preds[i]);
  }
  result.report = score_report(std::move(rows));
  result.report.notes.push_back("CoT-C judged by the rule-based judge, a proxy for expert review");
  return result;
}

ordered_json predictions_to_json(const std::map<std::string, Stage1Prediction>& predictions) {
  ordered_json j = ordered_json::object();
  for (const auto& [id, p] : predictions) {
    j[id] = {{"units", std::vector<std::string>(p.units.units.begin(), p.units.units.end())},
             {"rationale", p.rationale}};
  }
  return j;
}

ProposerFactory oracle_proposer() {
  return [](const BenchTask& t) -> std::unique_ptr<TextGenerator> {
    return std::make_unique<CallbackGenerator>([text = edges_text(t.gt_graph)](const GenerationRequest&) { return text; },
                                               "oracle");
  };
}

ProposerFactory shared_proposer(TextGenerator& gen) {
  class Borrowed : public TextGenerator {
   public:
    explicit Borrowed(TextGenerator& inner) : inner_(inner) {}
    std::string generate(const GenerationRequest& req) override { return inner_.generate(req); }
    std::string name() const override { return inner_.name(); }

   private:
    TextGenerator& inner_;
  };
  return [&gen](const BenchTask&) -> std::unique_ptr<TextGenerator> { return std::make_unique<Borrowed>(gen); };
}

Stage2Result run_stage2(const BenchSuite& suite, const Stage2Config& cfg) {
  validate_synth_config(cfg.synth);
  if (cfg.synth.proposer != ProposerKind::kHeuristic && !cfg.proposer) {
    throw Error(ErrorCode::kInvalidArgument, "stage 2 needs a proposer for " +
                                                 std::string(proposer_kind_name(cfg.synth.proposer)));
  }
  const std::size_t n = suite.tasks.size();
  std::vector<ScoredTask> rows(n);
  std::vector<std::optional<std::pair<ProcessGraph, RepairTrace>>> outputs(n);
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    const BenchTask& task = suite.tasks[i];
    ScoredTask& row = rows[i];
    row.task_id = task.task_id;
    row.archetype = task.archetype;
    try {
      UnitSelection v = task.gt_units;
      std::string rationale = task.gt_rationale;
      if (!cfg.use_gt_units) {
        auto it = cfg.predictions.find(task.task_id);
        if (it == cfg.predictions.end()) {
          throw Error(ErrorCode::kNoEntry, "no stage 1 prediction for task " + task.task_id, task.task_id);
        }
        v = it->second.units;
        rationale = it->second.rationale;
      }
      std::unique_ptr<TextGenerator> gen;
      if (cfg.synth.proposer != ProposerKind::kHeuristic) gen = cfg.proposer(task);
      SynthConfig synth = cfg.synth;
      synth.seed = cfg.synth.seed + i;
      auto [g, trace] = synthesize(v, suite.kb, synth, gen.get(), rationale);
      if (!check_phi(g, suite.kb).satisfied) throw Error(ErrorCode::kInvalidGraph, "synthesized graph violates Φ");
      row.nged = approx_nged(g, task.gt_graph);
      row.cspc = cspc(g, task.critical_rules, suite.kb);
      row.iov = iov(g, suite.kb);
      outputs[i].emplace(std::move(g), std::move(trace));
    } catch (const std::exception& e) {
      row.nged = 1.0;
      row.cspc = 0.0;
      row.iov = 0.0;
      row.error = e.what();
    }
  });
  Stage2Result result;
  for (std::size_t i = 0; i < n; ++i) {
    if (!outputs[i]) continue;
    result.graphs[suite.tasks[i].task_id] = std::move(outputs[i]->first);
    result.traces[suite.tasks[i].task_id] = std::move(outputs[i]->second);
  }
  result.report = score_report(std::move(rows));
  return result;
}

}  // namespace flowsynth
