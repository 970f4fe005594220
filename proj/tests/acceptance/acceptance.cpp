// Prints one PASS/FAIL line per acceptance criterion; exit status 1 when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flowsynth/benchcli/bench.hpp"
#include "flowsynth/errors.hpp"
#include "flowsynth/kbgraph/constraints.hpp"
#include "flowsynth/kbgraph/graph_io.hpp"
#include "flowsynth/metrics/ged.hpp"
#include "flowsynth/metrics/graph_metrics.hpp"
#include "flowsynth/synth/repair.hpp"
#include "support/test_support.hpp"

namespace flowsynth {
namespace {

constexpr double kExactTol = 1e-9;
constexpr int kPhiPairs = 1000;
constexpr double kPhiSeconds = 10.0;
constexpr int kGedPairs = 500;
constexpr std::size_t kGedMaxNodes = 6;
constexpr double kGedMeanGap = 0.35;
constexpr double kGedSeconds = 60.0;
constexpr std::size_t kMaxRepairIters = 10;
constexpr int kAdversarialTrials = 20;
constexpr std::size_t kFactoryPairs = 500;
constexpr double kNegativeFraction = 0.10;
constexpr double kFactorySeconds = 120.0;

using testing::edge;
using testing::unit_graph;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::filesystem::path bench_dir() { return testing::fixtures_dir() / "bench"; }

// ---------------------------------------------------------------------------

Outcome phi_equivalence() {
  Outcome o;
  std::mt19937_64 rng(1);
  int agree = 0, satisfied = 0;
  const auto t0 = Clock::now();
  for (int i = 0; i < kPhiPairs; ++i) {
    KnowledgeBase kb = testing::random_kb(rng, 6, 5);
    ProcessGraph g = testing::random_graph(rng, kb, 7, 0.3);
    const bool fast = check_phi(g, kb).satisfied;
    if (fast == testing::brute_force_phi(g, kb)) ++agree;
    if (fast) ++satisfied;
  }
  const double secs = seconds_since(t0);
  o.require(agree == kPhiPairs, "disagreements " + std::to_string(kPhiPairs - agree));
  o.require(satisfied > 0 && satisfied < kPhiPairs, "degenerate sample");
  o.require(secs < kPhiSeconds, "runtime " + fmt(secs, 2) + " s");
  o.detail = std::to_string(agree) + "/" + std::to_string(kPhiPairs) + " agree (" + std::to_string(satisfied) +
             " satisfied), " + fmt(secs, 2) + " s" + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// ---------------------------------------------------------------------------

UnitSelection sel(std::initializer_list<std::string> ids) { return {{ids.begin(), ids.end()}}; }

KnowledgeBase sour_kb() {
  IoRule needs_h2{IoRuleKind::kRequiresInput, "hydrogen", ""};
  std::vector<CriticalPathRule> rules{
      {"sour_water_to_sws", {SourcePredicate::Kind::kMaterial, "sour_water"}, "sws", ""},
      {"off_gas_to_sru", {SourcePredicate::Kind::kMaterial, "off_gas"}, "sru", ""},
  };
  return testing::make_kb({{"cdu", {"crude"}, {"sour_water", "off_gas", "diesel"}},
                           {"sws", {"sour_water"}, {"sour_gas"}},
                           {"amine", {"off_gas"}, {"fuel_gas", "acid_gas"}},
                           {"sru", {"acid_gas", "sour_gas"}, {"sulfur"}},
                           {"dht", {"diesel", "hydrogen"}, {"ulsd"}, {needs_h2}}},
                          {}, rules);
}

Outcome metric_formulas() {
  Outcome o;
  auto close = [](double a, double b) { return std::fabs(a - b) <= kExactTol; };
  const double f_same = unit_selection_f1(sel({"a", "b", "c"}), sel({"a", "b", "c"}));
  const double f_disjoint = unit_selection_f1(sel({"a", "b"}), sel({"c", "d"}));
  const double f_453 = unit_selection_f1(sel({"a", "b", "c", "x"}), sel({"a", "b", "c", "d", "e"}));
  o.require(close(f_same, 1.0), "UNF1 identical " + fmt(f_same, 10));
  o.require(close(f_disjoint, 0.0), "UNF1 disjoint " + fmt(f_disjoint, 10));
  o.require(close(f_453, 2.0 / 3.0), "UNF1 4-5-3 " + fmt(f_453, 10));

  std::vector<JustificationJudgment> judged{{"a", true, JudgeKind::kHuman, ""},
                                            {"b", false, JudgeKind::kHuman, ""},
                                            {"c", true, JudgeKind::kHuman, ""},
                                            {"d", false, JudgeKind::kHuman, ""}};
  const double c = cot_correctness(judged, sel({"a", "b", "c", "d", "x"}), sel({"a", "b", "c", "d", "y"}));
  o.require(c == 0.5, "CoT-C " + fmt(c, 10));

  // sws reached by the sour water of cdu; no sru node, so the off gas rule fails.
  KnowledgeBase kb = sour_kb();
  ProcessGraph g = unit_graph({"cdu", "sws", "amine", "dht"},
                              {edge("cdu", "sws", "sour_water"), edge("cdu", "amine", "off_gas"),
                               edge("cdu", "dht", "diesel")});
  const double s = cspc(g, kb.critical_paths(), kb);
  o.require(s == 0.5, "CSPC " + fmt(s, 10));
  // dht lacks its hydrogen feed: 3 of 4 nodes valid.
  const double v = iov(g, kb);
  o.require(v == 0.75, "IOV " + fmt(v, 10));
  if (o.pass) {
    o.detail = "UNF1 1/0/" + fmt(f_453) + ", CoT-C " + fmt(c) + ", CSPC " + fmt(s) + ", IOV " + fmt(v);
  }
  return o;
}

// ---------------------------------------------------------------------------

Outcome nged_oracle_bound() {
  Outcome o;
  KnowledgeBase kb = testing::make_kb({{"u0", {"m0"}, {"m0", "m1"}}, {"u1", {"m1"}, {"m0"}}, {"u2", {"m0"}, {"m1"}},
                                       {"u3", {"m1"}, {"m1"}}});
  std::mt19937_64 rng(5);
  int bound_violations = 0, zero_mismatch = 0, positive = 0;
  double gap_sum = 0.0;
  const auto t0 = Clock::now();
  for (int i = 0; i < kGedPairs; ++i) {
    ProcessGraph g1 = testing::random_graph(rng, kb, kGedMaxNodes, 0.3);
    ProcessGraph g2 = testing::random_graph(rng, kb, kGedMaxNodes, 0.3);
    // One pair in five is an isomorphic copy so that exact zeros are sampled.
    if (i % 5 == 0) g2 = g1;
    const double exact = exact_ged(g1, g2);
    // approx_ged is approx_nged * max(|V1|, |V2|) before clamping.
    const double raw = approx_ged(g1, g2);
    if (raw < exact - kExactTol) ++bound_violations;
    const bool nged_zero = approx_nged(g1, g2) == 0.0;
    if (nged_zero != (exact == 0.0)) ++zero_mismatch;
    if (exact > 0.0) {
      ++positive;
      gap_sum += (raw - exact) / exact;
    }
  }
  const double secs = seconds_since(t0);
  const double mean_gap = positive ? gap_sum / positive : 0.0;
  o.require(bound_violations == 0, "bound violations " + std::to_string(bound_violations));
  o.require(zero_mismatch == 0, "zero mismatches " + std::to_string(zero_mismatch));
  o.require(mean_gap <= kGedMeanGap, "mean gap " + fmt(mean_gap));
  o.require(secs < kGedSeconds, "runtime " + fmt(secs, 2) + " s");
  o.detail = std::to_string(kGedPairs) + " pairs, mean relative gap " + fmt(mean_gap) + ", " + fmt(secs, 2) + " s" +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// ---------------------------------------------------------------------------

void check_synth_output(Outcome& o, const ProcessGraph& g, const RepairTrace& trace, const KnowledgeBase& kb,
                        const std::string& label) {
  o.require(check_phi(g, kb).satisfied, label + ": Φ violated");
  o.require(trace.converged && trace.iterations.size() <= kMaxRepairIters, label + ": no convergence");
  auto [again, trace2] = repair_loop(g, kb, applicable_rules(g, kb), kMaxRepairIters);
  o.require(again == g && trace2.iterations.empty(), label + ": repair not idempotent");
}

Outcome synthesis_safety(const BenchSuite& suite) {
  Outcome o;
  const KnowledgeBase& kb = suite.kb;
  std::vector<std::string> units, materials;
  for (const auto& u : kb.units()) units.push_back(u.id);
  for (const auto& m : kb.materials()) materials.push_back(m.id);

  // Mock table: every ground-truth edge in both directions plus a batch of
  // random lines, served for every prompt.
  std::mt19937_64 rng(11);
  MockTable table;
  std::string reply;
  for (const auto& t : suite.tasks) {
    for (const auto& e : t.gt_graph.edges()) {
      reply += e.from + " -> " + e.to + " : " + e.material.value_or("") + "\n";
      reply += e.to + " -> " + e.from + " : " + e.material.value_or("") + "\n";
    }
  }
  for (int i = 0; i < 100; ++i) {
    reply += units[rng() % units.size()] + " -> " + units[rng() % units.size()] + " : " +
             materials[rng() % materials.size()] + "\n";
  }
  table.fallback = reply;
  MockGenerator mock(table);

  CallbackGenerator adversary([&](const GenerationRequest&) {
    std::string text;
    const int lines = static_cast<int>(rng() % 300);
    for (int i = 0; i < lines; ++i) {
      text += units[rng() % units.size()] + " -> " + units[rng() % units.size()];
      if (rng() % 3) text += " : " + materials[rng() % materials.size()];
      if (rng() % 17 == 0) text += " ???";
      text += "\n";
    }
    return text;
  });

  int runs = 0;
  for (const auto& t : suite.tasks) {
    SynthConfig cfg;
    cfg.max_repair_iters = kMaxRepairIters;
    auto [hg, htrace] = synthesize(t.gt_units, kb, cfg, nullptr, t.gt_rationale);
    check_synth_output(o, hg, htrace, kb, t.task_id + "/heuristic");
    cfg.proposer = ProposerKind::kMock;
    auto [mg, mtrace] = synthesize(t.gt_units, kb, cfg, &mock, t.gt_rationale);
    check_synth_output(o, mg, mtrace, kb, t.task_id + "/mock");
    runs += 2;
    for (int trial = 0; trial < kAdversarialTrials; ++trial) {
      cfg.seed = static_cast<std::uint64_t>(trial);
      // Random subsets as well as the full ground-truth selection.
      UnitSelection v = t.gt_units;
      if (trial % 2) {
        for (auto it = v.units.begin(); it != v.units.end();) it = rng() % 3 == 0 ? v.units.erase(it) : std::next(it);
      }
      auto [ag, atrace] = synthesize(v, kb, cfg, &adversary, t.gt_rationale);
      check_synth_output(o, ag, atrace, kb, t.task_id + "/adversarial");
      ++runs;
    }
  }
  if (o.pass) o.detail = std::to_string(runs) + " synthesize runs over " + std::to_string(suite.tasks.size()) + " tasks";
  return o;
}

// ---------------------------------------------------------------------------

Outcome data_factory(const BenchSuite& suite) {
  Outcome o;
  const auto pairs = synthetic_pairs(suite.kb, suite.predicates, kFactoryPairs, 2024);
  DatagenConfig cfg;
  cfg.seed = 7;
  cfg.negative_fraction = kNegativeFraction;
  cfg.jobs = 4;

  // The mock teacher replays a table of canned replies keyed by prompt
  // fingerprint; the table is recorded once from the template teacher.
  MockTable table;
  std::mutex mu;
  TemplateGenerator tmpl;
  CallbackGenerator recorder([&](const GenerationRequest& req) {
    std::string reply = tmpl.generate(req);
    std::lock_guard<std::mutex> lock(mu);
    table.add(req.prompt, reply);
    return reply;
  });
  build_sft_dataset(pairs, suite.kb, suite.predicates, recorder, cfg);
  MockGenerator teacher(table);

  const auto t0 = Clock::now();
  auto [data, stats] = build_sft_dataset(pairs, suite.kb, suite.predicates, teacher, cfg);
  auto [again, stats2] = build_sft_dataset(pairs, suite.kb, suite.predicates, teacher, cfg);
  const double secs = seconds_since(t0);

  std::size_t positives = 0, negatives = 0, bad_pos = 0, bad_neg = 0;
  for (const auto& t : data) {
    const auto r = validate_triplet(t, suite.kb, suite.predicates);
    if (t.polarity == Polarity::kPositive) {
      ++positives;
      if (!r.all_passed()) ++bad_pos;
    } else {
      ++negatives;
      if (r.all_passed()) ++bad_neg;
    }
  }
  const auto expected_neg =
      static_cast<std::size_t>(std::llround(kNegativeFraction * static_cast<double>(stats.accepted_positives)));
  o.require(stats.errors.empty(), std::to_string(stats.errors.size()) + " teacher errors");
  o.require(stats.accepted_positives > 0, "no accepted positives");
  o.require(bad_pos == 0, std::to_string(bad_pos) + " positives fail re-validation");
  o.require(negatives == expected_neg, "negatives " + std::to_string(negatives) + " != " + std::to_string(expected_neg));
  o.require(bad_neg == 0, std::to_string(bad_neg) + " negatives pass every check");
  o.require(dataset_to_jsonl(data) == dataset_to_jsonl(again), "output not byte-reproducible");
  o.require(stats_to_json(stats).dump() == stats_to_json(stats2).dump(), "stats not reproducible");
  o.require(secs < kFactorySeconds, "runtime " + fmt(secs, 2) + " s");
  o.detail = std::to_string(kFactoryPairs) + " pairs, " + std::to_string(stats.accepted_positives) + " accepted, " +
             std::to_string(positives) + " positives + " + std::to_string(negatives) + " negatives, " +
             fmt(secs / 2.0, 2) + " s per run" + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// ---------------------------------------------------------------------------

Outcome oracle_round_trip(const BenchSuite& suite) {
  Outcome o;
  const std::map<std::string, ArchetypeStats> table{
      {"fuel", {11, 81}}, {"petrochemical", {22, 152}}, {"aromatics", {24, 148}}};
  o.require(suite.stats == table, "instance statistics differ");
  std::set<std::string> archetypes;
  for (const auto& t : suite.tasks) archetypes.insert(t.archetype);
  o.require(archetypes.size() == 3, "expected three archetypes");

  auto s1 = run_stage1(suite, oracle_selector());
  Stage2Config cfg;
  cfg.use_gt_units = false;
  cfg.predictions = s1.predictions;
  cfg.synth.proposer = ProposerKind::kMock;
  cfg.proposer = oracle_proposer();
  auto s2 = run_stage2(suite, cfg);
  ScoreReport merged = merge_reports(s1.report, s2.report);
  for (const auto& row : merged.per_task) {
    const bool ok = row.error.empty() && row.unf1 == 1.0 && row.nged == 0.0 && row.cspc == 1.0 && row.iov == 1.0;
    o.require(ok, row.task_id + " scores " + report_to_json(score_report({row})).dump());
  }
  if (o.pass) o.detail = "UNF1 1, nGED 0, CSPC 1, IOV 1 on 3 tasks; stats 11/81, 22/152, 24/148";
  return o;
}

// ---------------------------------------------------------------------------

Outcome partition_check(const BenchSuite& suite) {
  Outcome o;
  auto train = parse_dataset_jsonl(read_text_file(testing::fixtures_dir() / "train" / "sft.jsonl"));
  o.require(check_partition_disjoint(train, suite).disjoint, "shipped training set overlaps the bench");
  SftTriplet leak;
  leak.intent = suite.tasks[1].intent;
  leak.units = suite.tasks[1].gt_units;
  leak.rationale = suite.tasks[1].gt_rationale;
  train.insert(train.begin() + static_cast<std::ptrdiff_t>(train.size() / 2), leak);
  auto r = check_partition_disjoint(train, suite);
  o.require(!r.disjoint, "injection not detected");
  o.require(r.collisions.size() == 1, std::to_string(r.collisions.size()) + " collisions");
  if (o.pass) {
    o.detail = std::to_string(train.size() - 1) + " training triplets disjoint; injection gives 1 collision (" +
               r.collisions[0].task_id + ")";
  }
  return o;
}

// ---------------------------------------------------------------------------

Outcome determinism() {
  Outcome o;
  auto full_run = [](const std::vector<std::string>& extra) {
    std::vector<std::string> args{"--format", "json", "--seed", "42", "bench", "run", "--bench", bench_dir().string(),
                                  "--selector", "oracle"};
    args.insert(args.end(), extra.begin(), extra.end());
    std::ostringstream out, err;
    const int code = cli(args, out, err);
    return std::make_pair(code, out.str());
  };
  std::size_t bytes = 0;
  for (const auto& extra : std::vector<std::vector<std::string>>{{"--proposer", "heuristic"},
                                                                {"--proposer", "oracle"},
                                                                {"--proposer", "heuristic", "--use-gt-units"}}) {
    auto a = full_run(extra);
    auto b = full_run(extra);
    o.require(a.first == 0 && b.first == 0, "run failed");
    o.require(!a.second.empty() && a.second == b.second, "reports differ");
    bytes += a.second.size();
  }
  if (o.pass) o.detail = "3 configurations, byte-identical reports (" + std::to_string(bytes) + " bytes)";
  return o;
}

// ---------------------------------------------------------------------------

int run_all() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
  };
  std::optional<BenchSuite> suite;
  auto with_suite = [&](auto fn) {
    return [&, fn]() {
      if (!suite) suite = load_benchmark(bench_dir());
      return fn(*suite);
    };
  };
  const std::vector<Criterion> criteria{
      {1, "phi equivalence", phi_equivalence},
      {2, "metric formulas", metric_formulas},
      {3, "nGED oracle bound", nged_oracle_bound},
      {4, "synthesis safety", with_suite(synthesis_safety)},
      {5, "data factory", with_suite(data_factory)},
      {6, "benchmark oracle round trip", with_suite(oracle_round_trip)},
      {7, "partition check", with_suite(partition_check)},
      {8, "determinism", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace flowsynth

int main() { return flowsynth::run_all(); }
