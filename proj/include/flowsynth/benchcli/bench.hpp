#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowsynth/adapter/generator.hpp"
#include "flowsynth/datagen/datagen.hpp"
#include "flowsynth/kbgraph/knowledge_base.hpp"
#include "flowsynth/kbgraph/predicates.hpp"
#include "flowsynth/kbgraph/process_graph.hpp"
#include "flowsynth/metrics/report.hpp"
#include "flowsynth/metrics/selection.hpp"
#include "flowsynth/synth/synthesize.hpp"

namespace flowsynth {

inline constexpr const char* kBenchArchetypes[] = {"fuel", "petrochemical", "aromatics"};

struct BenchTask {
  std::string task_id;
  std::string archetype;
  DesignIntent intent;
  UnitSelection gt_units;
  std::string gt_rationale;
  ProcessGraph gt_graph;
  std::vector<CriticalPathRule> critical_rules;
};

struct ArchetypeStats {
  std::size_t units = 0;
  std::size_t flows = 0;

  bool operator==(const ArchetypeStats&) const = default;
};

struct BenchSuite {
  KnowledgeBase kb;
  std::vector<MechanismPredicate> predicates;  // empty when <dir>/predicates.json is absent
  std::vector<BenchTask> tasks;                // sorted by archetype rank, then task id
  std::map<std::string, ArchetypeStats> stats;  // summed over the tasks of each archetype
};

// Reads <dir>/kb.json, <dir>/tasks/*.json (graphs referenced relative to dir)
// and the optional <dir>/predicates.json and <dir>/stats.json. Every ground
// truth graph must satisfy Φ with IOV 1, have exactly gt_units as its units,
// and the computed stats must equal stats.json when present. Failures throw
// Error whose subject is the offending file.
BenchSuite load_benchmark(const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// partition

struct PartitionCollision {
  std::size_t train_index = 0;
  std::string task_id;
};

struct PartitionReport {
  bool disjoint = true;
  std::vector<PartitionCollision> collisions;
};

// Fingerprint of the canonical JSON of the intent.
std::string intent_fingerprint(const DesignIntent& intent);

// Collides when a training triplet has the same intent fingerprint and unit
// set as a bench task. Negatives are compared on their own unit set.
PartitionReport check_partition_disjoint(const std::vector<SftTriplet>& train, const BenchSuite& suite);
nlohmann::ordered_json partition_to_json(const PartitionReport& r);

// ---------------------------------------------------------------------------
// stage 1

struct Stage1Prediction {
  UnitSelection units;
  std::string rationale;
};

using Stage1Selector = std::function<Stage1Prediction(const BenchTask&)>;

Stage1Selector oracle_selector();
Stage1Selector empty_selector();
// {"<task_id>": {"units": [...], "rationale": "..."}}; tasks absent from the
// file fail with Error(kNoEntry).
Stage1Selector file_selector(const nlohmann::json& predictions);
// Prompts the generator with the intent and the unit library; the reply is
// parsed by parse_selection_reply().
Stage1Selector generator_selector(TextGenerator& gen, const KnowledgeBase& kb);

std::string selection_prompt(const BenchTask& task, const KnowledgeBase& kb);
// A line "UNITS: a, b, ..." gives the selection (names canonicalized, unknown
// names dropped); every other line is rationale.
Stage1Prediction parse_selection_reply(std::string_view reply, const KnowledgeBase& kb);

struct Stage1Result {
  ScoreReport report;
  std::map<std::string, Stage1Prediction> predictions;  // tasks whose selector succeeded
};

// UNF₁ and CoT-C per task; CoT-C uses the rule judge over the whole rationale.
// Selector failures score 0 with the error text in the row.
Stage1Result run_stage1(const BenchSuite& suite, const Stage1Selector& selector, std::size_t jobs = 1);

nlohmann::ordered_json predictions_to_json(const std::map<std::string, Stage1Prediction>& predictions);

// ---------------------------------------------------------------------------
// stage 2

// Generator handed to synthesize() for one task; null for the heuristic.
using ProposerFactory = std::function<std::unique_ptr<TextGenerator>(const BenchTask&)>;

// Replies with the task's ground-truth edges, one "a -> b : m" line each.
ProposerFactory oracle_proposer();
// Same generator for every task (not owned).
ProposerFactory shared_proposer(TextGenerator& gen);

struct Stage2Config {
  SynthConfig synth;
  bool use_gt_units = true;
  std::map<std::string, Stage1Prediction> predictions;  // used when !use_gt_units
  ProposerFactory proposer;                              // required unless synth.proposer is kHeuristic
  std::size_t jobs = 1;
};

struct Stage2Result {
  ScoreReport report;
  std::map<std::string, ProcessGraph> graphs;
  std::map<std::string, RepairTrace> traces;
};

// nGED, CSPC (task rules) and IOV per task. A synthesis failure, a missing
// prediction or an output violating Φ scores nGED 1, CSPC 0, IOV 0.
Stage2Result run_stage2(const BenchSuite& suite, const Stage2Config& cfg);

// ---------------------------------------------------------------------------
// command line

// Exit codes: 0 success, 1 validation failure or runtime error, 2 usage error.
int cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flowsynth
