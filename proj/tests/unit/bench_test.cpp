#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "flowsynth/benchcli/bench.hpp"
#include "flowsynth/errors.hpp"
#include "flowsynth/kbgraph/constraints.hpp"
#include "flowsynth/kbgraph/graph_io.hpp"
#include "support/test_support.hpp"

namespace flowsynth {
namespace {

namespace fs = std::filesystem;

fs::path bench_dir() { return testing::fixtures_dir() / "bench"; }

const BenchSuite& suite() {
  static const BenchSuite s = load_benchmark(bench_dir());
  return s;
}

const BenchTask& task(const std::string& id) {
  for (const auto& t : suite().tasks) {
    if (t.task_id == id) return t;
  }
  throw std::logic_error("no task " + id);
}

// Copy of the shipped benchmark in a fresh temporary directory.
fs::path scratch_bench(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("flowsynth_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::copy(bench_dir(), dir, fs::copy_options::recursive);
  return dir;
}

ErrorCode load_error(const fs::path& dir, std::string* subject = nullptr) {
  try {
    load_benchmark(dir);
  } catch (const Error& e) {
    if (subject) *subject = e.subject();
    return e.code();
  }
  ADD_FAILURE() << "load succeeded";
  return ErrorCode::kIo;
}

// ---------------------------------------------------------------------------
// loading

TEST(LoadBenchmark, ShippedFixturesMatchInstanceStatistics) {
  const auto& s = suite();
  ASSERT_EQ(s.tasks.size(), 3u);
  EXPECT_EQ(s.tasks[0].archetype, "fuel");
  EXPECT_EQ(s.tasks[1].archetype, "petrochemical");
  EXPECT_EQ(s.tasks[2].archetype, "aromatics");
  EXPECT_EQ(s.stats.at("fuel"), (ArchetypeStats{11, 81}));
  EXPECT_EQ(s.stats.at("petrochemical"), (ArchetypeStats{22, 152}));
  EXPECT_EQ(s.stats.at("aromatics"), (ArchetypeStats{24, 148}));
  EXPECT_EQ(s.predicates.size(), 6u);
  for (const auto& t : s.tasks) {
    EXPECT_TRUE(check_phi(t.gt_graph, s.kb).satisfied);
    EXPECT_FALSE(t.critical_rules.empty());
  }
}

TEST(LoadBenchmark, PhiViolatingGroundTruthIsRejected) {
  const fs::path dir = scratch_bench("badgraph");
  auto g = nlohmann::json::parse(read_text_file(dir / "graphs" / "fuel.json"));
  g["edges"].push_back({{"from", "sru"}, {"to", "cdu"}, {"material", "sulfur"}});
  write_text_file(dir / "graphs" / "fuel.json", g.dump());
  std::string subject;
  EXPECT_EQ(load_error(dir, &subject), ErrorCode::kInvalidGraph);
  EXPECT_EQ(subject, (dir / "tasks" / "fuel.json").string());
  fs::remove_all(dir);
}

TEST(LoadBenchmark, StatisticsMismatchIsRejected) {
  const fs::path dir = scratch_bench("badstats");
  auto s = nlohmann::json::parse(read_text_file(dir / "stats.json"));
  s["fuel"]["flows"] = 80;
  write_text_file(dir / "stats.json", s.dump());
  std::string subject;
  EXPECT_EQ(load_error(dir, &subject), ErrorCode::kInvariant);
  EXPECT_EQ(subject, (dir / "stats.json").string());
  fs::remove_all(dir);
}

TEST(LoadBenchmark, EmptyDirectoryAndMissingTasks) {
  const fs::path dir = fs::temp_directory_path() / ("flowsynth_empty_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  EXPECT_EQ(load_error(dir), ErrorCode::kIo);
  fs::copy_file(bench_dir() / "kb.json", dir / "kb.json");
  EXPECT_EQ(load_error(dir), ErrorCode::kIo);
  fs::remove_all(dir);
}

TEST(LoadBenchmark, UnknownArchetypeIsRejected) {
  const fs::path dir = scratch_bench("badarch");
  auto t = nlohmann::json::parse(read_text_file(dir / "tasks" / "fuel.json"));
  t["archetype"] = "lubes";
  write_text_file(dir / "tasks" / "fuel.json", t.dump());
  EXPECT_EQ(load_error(dir), ErrorCode::kInvariant);
  fs::remove_all(dir);
}

// ---------------------------------------------------------------------------
// partition

std::vector<SftTriplet> shipped_train() {
  return parse_dataset_jsonl(read_text_file(testing::fixtures_dir() / "train" / "sft.jsonl"));
}

TEST(Partition, ShippedTrainingSetIsDisjoint) {
  const auto train = shipped_train();
  ASSERT_GE(train.size(), 50u);
  auto r = check_partition_disjoint(train, suite());
  EXPECT_TRUE(r.disjoint);
  EXPECT_TRUE(r.collisions.empty());
  EXPECT_TRUE(check_partition_disjoint({}, suite()).disjoint);
}

TEST(Partition, InjectedBenchTaskCollidesOnce) {
  auto train = shipped_train();
  SftTriplet leak;
  leak.intent = task("aromatics_refinery").intent;
  leak.units = task("aromatics_refinery").gt_units;
  leak.rationale = "copied";
  train.insert(train.begin() + 7, leak);
  auto r = check_partition_disjoint(train, suite());
  EXPECT_FALSE(r.disjoint);
  ASSERT_EQ(r.collisions.size(), 1u);
  EXPECT_EQ(r.collisions[0].train_index, 7u);
  EXPECT_EQ(r.collisions[0].task_id, "aromatics_refinery");
  // Same units under a different intent do not collide.
  train[7].intent.constraints.push_back("another site");
  EXPECT_TRUE(check_partition_disjoint(train, suite()).disjoint);
}

// ---------------------------------------------------------------------------
// stage 1

const ScoreAggregate& aggregate(const ScoreReport& r, const std::string& group) {
  for (const auto& a : r.aggregates) {
    if (a.group == group) return a;
  }
  throw std::logic_error("no aggregate " + group);
}

TEST(Stage1, OracleSelectorIsPerfect) {
  auto r = run_stage1(suite(), oracle_selector());
  ASSERT_EQ(r.report.per_task.size(), 3u);
  for (const auto& row : r.report.per_task) {
    EXPECT_DOUBLE_EQ(*row.unf1, 1.0);
    EXPECT_DOUBLE_EQ(*row.cotc, 1.0);
    EXPECT_TRUE(row.error.empty());
  }
  EXPECT_EQ(r.predictions.size(), 3u);
}

TEST(Stage1, EmptySelectorScoresZero) {
  auto r = run_stage1(suite(), empty_selector());
  for (const auto& row : r.report.per_task) {
    EXPECT_DOUBLE_EQ(*row.unf1, 0.0);
    EXPECT_DOUBLE_EQ(*row.cotc, 0.0);
  }
  EXPECT_DOUBLE_EQ(*aggregate(r.report, "overall").unf1, 0.0);
}

TEST(Stage1, FileSelectorHandComputedTable) {
  // fuel: gt minus {sru, sws} plus {dcu}: |P|=10, |G|=11, |P∩G|=9 -> 18/21.
  //   Rationale covers only cdu and vdu: CoT-C = 2/9.
  // petrochemical: missing -> error row, zeros.
  // aromatics: exact units, empty rationale -> UNF1 1, CoT-C 0.
  std::set<std::string> fuel = task("fuel_refinery").gt_units.units;
  fuel.erase("sru");
  fuel.erase("sws");
  fuel.insert("dcu");
  nlohmann::json preds;
  preds["fuel_refinery"] = {{"units", fuel},
                            {"rationale",
                             "The Crude Distillation Unit (cdu) takes crude and delivers lpg. "
                             "The Vacuum Distillation Unit (vdu) takes atmospheric residue and delivers vgo."}};
  preds["aromatics_refinery"] = {{"units", task("aromatics_refinery").gt_units.units}, {"rationale", ""}};
  auto r = run_stage1(suite(), file_selector(preds));
  const auto& rows = r.report.per_task;
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(*rows[0].unf1, 18.0 / 21.0, 1e-12);
  EXPECT_NEAR(*rows[0].cotc, 2.0 / 9.0, 1e-12);
  EXPECT_DOUBLE_EQ(*rows[1].unf1, 0.0);
  EXPECT_NE(rows[1].error.find("no prediction for task petrochemical_refinery"), std::string::npos);
  EXPECT_DOUBLE_EQ(*rows[2].unf1, 1.0);
  EXPECT_DOUBLE_EQ(*rows[2].cotc, 0.0);
  EXPECT_NEAR(*aggregate(r.report, "overall").unf1, (18.0 / 21.0 + 0.0 + 1.0) / 3.0, 1e-12);
  EXPECT_NEAR(*aggregate(r.report, "overall").cotc, (2.0 / 9.0) / 3.0, 1e-12);
  EXPECT_EQ(r.predictions.size(), 2u);
}

TEST(Stage1, GeneratorReplyParsing) {
  auto p = parse_selection_reply(
      "Here is my answer.\nunits: cdu, Vacuum Distillation Unit, ghost unit,\n\nThe cdu takes crude.\n", suite().kb);
  EXPECT_EQ(p.units.units, (std::set<std::string>{"cdu", "vdu"}));
  EXPECT_EQ(p.rationale, "Here is my answer.\nThe cdu takes crude.");
  std::vector<std::string> prompts;
  CallbackGenerator gen([&](const GenerationRequest& req) {
    prompts.push_back(req.prompt);
    return std::string("UNITS: cdu\nThe Crude Distillation Unit (cdu) takes crude and delivers lpg.");
  });
  auto r = run_stage1(suite(), generator_selector(gen, suite().kb));
  ASSERT_EQ(prompts.size(), 3u);
  EXPECT_NE(prompts[0].find("UNIT cdu | Crude Distillation Unit |"), std::string::npos);
  EXPECT_NEAR(*r.report.per_task[0].unf1, 2.0 / 12.0, 1e-12);
  EXPECT_DOUBLE_EQ(*r.report.per_task[0].cotc, 1.0);
}

// ---------------------------------------------------------------------------
// stage 2

TEST(Stage2, OracleProposerIsPerfect) {
  Stage2Config cfg;
  cfg.synth.proposer = ProposerKind::kMock;
  cfg.proposer = oracle_proposer();
  auto r = run_stage2(suite(), cfg);
  for (const auto& row : r.report.per_task) {
    EXPECT_TRUE(row.error.empty()) << row.error;
    EXPECT_DOUBLE_EQ(*row.nged, 0.0) << row.task_id;
    EXPECT_DOUBLE_EQ(*row.cspc, 1.0);
    EXPECT_DOUBLE_EQ(*row.iov, 1.0);
  }
  for (const auto& t : suite().tasks) EXPECT_EQ(r.graphs.at(t.task_id), t.gt_graph);
}

TEST(Stage2, EmptySelectionAgainstFuel) {
  Stage2Config cfg;
  cfg.use_gt_units = false;
  for (const auto& t : suite().tasks) cfg.predictions[t.task_id] = {};
  auto r = run_stage2(suite(), cfg);
  const auto& fuel = r.report.per_task[0];
  EXPECT_DOUBLE_EQ(*fuel.nged, 1.0);
  EXPECT_DOUBLE_EQ(*fuel.cspc, 0.0);
  EXPECT_DOUBLE_EQ(*fuel.iov, 1.0);
  EXPECT_TRUE(fuel.error.empty());
}

TEST(Stage2, MissingPredictionDegradesToWorstCase) {
  Stage2Config cfg;
  cfg.use_gt_units = false;
  cfg.predictions["fuel_refinery"] = {task("fuel_refinery").gt_units, ""};
  auto r = run_stage2(suite(), cfg);
  EXPECT_TRUE(r.report.per_task[0].error.empty());
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(*r.report.per_task[i].nged, 1.0);
    EXPECT_DOUBLE_EQ(*r.report.per_task[i].cspc, 0.0);
    EXPECT_DOUBLE_EQ(*r.report.per_task[i].iov, 0.0);
    EXPECT_FALSE(r.report.per_task[i].error.empty());
  }
  Stage2Config bad;
  bad.synth.proposer = ProposerKind::kRemote;
  EXPECT_THROW(run_stage2(suite(), bad), Error);
}

TEST(Stage2Property, EveryProposerYieldsPhi) {
  std::mt19937_64 rng(77);
  std::vector<std::string> names;
  for (const auto& u : suite().kb.units()) names.push_back(u.id);
  std::vector<std::string> materials;
  for (const auto& m : suite().kb.materials()) materials.push_back(m.id);
  std::mutex mu;
  CallbackGenerator adversary([&](const GenerationRequest&) {
    std::lock_guard<std::mutex> lock(mu);
    std::string text;
    for (int i = 0; i < 200; ++i) {
      text += names[rng() % names.size()] + " -> " + names[rng() % names.size()];
      if (rng() % 3) text += " : " + materials[rng() % materials.size()];
      text += "\n";
    }
    return text;
  });
  for (auto kind : {ProposerKind::kHeuristic, ProposerKind::kRemote}) {
    Stage2Config cfg;
    cfg.synth.proposer = kind;
    cfg.proposer = shared_proposer(adversary);
    cfg.jobs = 3;
    auto r = run_stage2(suite(), cfg);
    ASSERT_EQ(r.graphs.size(), 3u);
    for (const auto& [id, g] : r.graphs) {
      EXPECT_TRUE(check_phi(g, suite().kb).satisfied) << id;
      EXPECT_TRUE(r.traces.at(id).converged) << id;
    }
  }
}

TEST(Stage2Property, ReportsAreByteIdentical) {
  Stage2Config cfg;
  auto a = run_stage2(suite(), cfg);
  cfg.jobs = 3;
  auto b = run_stage2(suite(), cfg);
  EXPECT_EQ(report_to_json(a.report).dump(), report_to_json(b.report).dump());
  auto s1 = run_stage1(suite(), oracle_selector(), 1);
  auto s3 = run_stage1(suite(), oracle_selector(), 3);
  EXPECT_EQ(report_to_json(s1.report).dump(), report_to_json(s3.report).dump());
}

// ---------------------------------------------------------------------------
// command line

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const std::string& rel) { return (testing::fixtures_dir() / rel).string(); }

TEST(Cli, KbValidate) {
  EXPECT_EQ(run({"kb", "validate", fx("kb_fuel.json")}).code, 0);
  EXPECT_EQ(run({"kb", "validate", fx("bench/kb.json"), "--predicates", fx("predicates.json")}).code, 0);
  // The fuel KB lacks units referenced by the petrochemical predicates.
  EXPECT_EQ(run({"kb", "validate", fx("kb_fuel.json"), "--predicates", fx("predicates.json")}).code, 1);
  EXPECT_EQ(run({"kb", "validate", fx("missing.json")}).code, 1);
}

TEST(Cli, GraphCheck) {
  auto ok = run({"graph", "check", "--kb", fx("bench/kb.json"), "--graph", fx("bench/graphs/fuel.json")});
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("phi: satisfied"), std::string::npos);
  const fs::path bad = fs::temp_directory_path() / ("flowsynth_bad_graph_" + std::to_string(::getpid()) + ".json");
  write_text_file(bad, R"({"format_version":"1","nodes":[{"id":"a","unit":"sru"},{"id":"b","unit":"cdu"}],)"
                       R"("edges":[{"from":"a","to":"b","material":"sulfur"}]})");
  auto r = run({"graph", "check", "--kb", fx("bench/kb.json"), "--graph", bad.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("phi: violated"), std::string::npos);
  EXPECT_NE(r.out.find("a -> b"), std::string::npos);
  auto j = run({"graph", "check", "--kb", fx("bench/kb.json"), "--graph", bad.string(), "--format", "json"});
  EXPECT_EQ(nlohmann::json::parse(j.out)["violations"].size(), 1u);
  fs::remove(bad);
}

TEST(Cli, UsageErrors) {
  auto r = run({"frobnicate"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage:"), std::string::npos);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bench", "stage1"}).code, 2);
  EXPECT_EQ(run({"bench", "stage1", "--bench", fx("bench"), "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, BenchStagesAndUniformOptions) {
  const fs::path out = fs::temp_directory_path() / ("flowsynth_report_" + std::to_string(::getpid()) + ".json");
  auto r = run({"bench", "run", "--bench", fx("bench"), "--proposer", "oracle", "--seed", "3", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Overall"), std::string::npos);
  auto j = nlohmann::json::parse(read_text_file(out));
  for (const auto& row : j["per_task"]) {
    EXPECT_EQ(row["unf1"], 1.0);
    EXPECT_EQ(row["nged"], 0.0);
  }
  auto again = run({"--format", "json", "bench", "run", "--bench", fx("bench"), "--proposer", "oracle"});
  EXPECT_EQ(nlohmann::json::parse(again.out), j);
  auto s2 = run({"bench", "stage2", "--bench", fx("bench"), "--use-gt-units", "--format", "json"});
  ASSERT_EQ(s2.code, 0) << s2.err;
  EXPECT_EQ(nlohmann::json::parse(s2.out)["per_task"].size(), 3u);
  EXPECT_EQ(run({"bench", "stage2", "--bench", fx("bench")}).code, 2);
  fs::remove(out);
}

TEST(Cli, BenchDisjoint) {
  EXPECT_EQ(run({"bench", "disjoint", "--bench", fx("bench"), "--train", fx("train/sft.jsonl")}).code, 0);
  auto train = read_text_file(fx("train/sft.jsonl"));
  SftTriplet leak;
  leak.intent = task("fuel_refinery").intent;
  leak.units = task("fuel_refinery").gt_units;
  const fs::path path = fs::temp_directory_path() / ("flowsynth_leak_" + std::to_string(::getpid()) + ".jsonl");
  write_text_file(path, train + dataset_to_jsonl({leak}));
  auto r = run({"bench", "disjoint", "--bench", fx("bench"), "--train", path.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("overlap: 1 collisions"), std::string::npos);
  fs::remove(path);
}

TEST(Cli, SynthDatagenAndScore) {
  const fs::path dir = fs::temp_directory_path() / ("flowsynth_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto s = run({"synth", "--kb", fx("bench/kb.json"), "--units", "cdu,vdu,Fluid Catalytic Cracker", "--out",
                (dir / "g.json").string(), "--trace", (dir / "t.json").string()});
  ASSERT_EQ(s.code, 0) << s.err;
  KnowledgeBase kb = load_knowledge_base(fx("bench/kb.json"));
  ProcessGraph g = load_graph(dir / "g.json", kb);
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_TRUE(check_phi(g, kb).satisfied);
  EXPECT_TRUE(nlohmann::json::parse(read_text_file(dir / "t.json"))["converged"].get<bool>());

  auto sc = run({"score", "--kb", fx("bench/kb.json"), "--pred", fx("bench/graphs/fuel.json"), "--gt",
                 fx("bench/graphs/fuel.json"), "--rules", "sour_water_to_sws", "--format", "json"});
  ASSERT_EQ(sc.code, 0) << sc.err;
  auto sj = nlohmann::json::parse(sc.out);
  EXPECT_EQ(sj["nged"], 0.0);
  EXPECT_EQ(sj["cspc"], 1.0);
  EXPECT_EQ(sj["iov"], 1.0);
  auto su = run({"score", "--kb", fx("bench/kb.json"), "--pred-units", "cdu,vdu", "--gt-units", "cdu,vdu,fcc",
                 "--format", "json"});
  EXPECT_NEAR(nlohmann::json::parse(su.out)["unf1"].get<double>(), 0.8, 1e-12);
  EXPECT_EQ(run({"score", "--kb", fx("bench/kb.json")}).code, 2);

  auto d = run({"datagen", "--kb", fx("bench/kb.json"), "--predicates", fx("predicates.json"), "--synthetic", "12",
                "--seed", "4", "--out", (dir / "d.jsonl").string()});
  ASSERT_EQ(d.code, 0) << d.err;
  auto d2 = run({"datagen", "--kb", fx("bench/kb.json"), "--predicates", fx("predicates.json"), "--synthetic", "12",
                 "--seed", "4"});
  EXPECT_EQ(d2.out, read_text_file(dir / "d.jsonl"));
  EXPECT_EQ(parse_dataset_jsonl(d2.out).size(), 12u);
  fs::remove_all(dir);
}

TEST(Cli, LogLlmWritesJsonLines) {
  const fs::path dir = fs::temp_directory_path() / ("flowsynth_log_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  MockTable table;
  table.fallback = "cdu -> vdu : atm_residue\n";
  write_text_file(dir / "mock.json", mock_table_to_json(table).dump());
  auto r = run({"synth", "--kb", fx("bench/kb.json"), "--units", "cdu,vdu", "--proposer", "mock", "--mock-table",
                (dir / "mock.json").string(), "--log-llm", (dir / "llm.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto log = nlohmann::json::parse(read_text_file(dir / "llm.jsonl"));
  EXPECT_EQ(log["response"], "cdu -> vdu : atm_residue\n");
  EXPECT_EQ(log["tags"]["stage"], "synth");
  EXPECT_EQ(run({"synth", "--kb", fx("bench/kb.json"), "--units", "cdu", "--proposer", "mock"}).code, 2);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace flowsynth
