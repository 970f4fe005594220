#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowsynth/adapter/generator.hpp"
#include "flowsynth/kbgraph/knowledge_base.hpp"
#include "flowsynth/kbgraph/predicates.hpp"
#include "flowsynth/metrics/selection.hpp"

namespace flowsynth {

enum class Polarity { kPositive, kNegative };

std::string_view polarity_name(Polarity p);
Polarity parse_polarity(std::string_view name);

inline constexpr std::string_view kMissingSupportUnit = "missing_support_unit";

struct CheckResult {
  bool passed = false;
  std::string detail;  // empty when passed
};

struct ValidationReport {
  CheckResult topological_feasibility;
  CheckResult unit_configuration_alignment;
  CheckResult semantic_unit_consistency;
  CheckResult engineering_mechanism_review;
  std::size_t attempts = 0;

  bool all_passed() const;
  // Names of failing checks, in check order.
  std::vector<std::string> failed_checks() const;
};

inline constexpr std::string_view kCheckNames[] = {"topological_feasibility", "unit_configuration_alignment",
                                                   "semantic_unit_consistency", "engineering_mechanism_review"};

struct SftTriplet {
  DesignIntent intent;
  std::string rationale;
  UnitSelection units;
  Polarity polarity = Polarity::kPositive;
  std::optional<std::string> defect;  // set for negatives
  std::string removed_unit;           // negatives: the unit taken out of V
  ValidationReport validation;
  bool accepted = false;
};

struct IntentUnits {
  DesignIntent intent;
  UnitSelection units;
};

// Prompt asking the teacher why each unit of V is needed. Contains the
// rendered intent and one render_unit_schema() line per unit.
std::string distillation_prompt(const DesignIntent& intent, const UnitSelection& units, const KnowledgeBase& kb);

// Throws Error(kUnknownUnit) for units missing from kb and
// Error(kEmptyResponse) when the teacher returns only whitespace.
std::string distill_rationale(const DesignIntent& intent, const UnitSelection& units, const KnowledgeBase& kb,
                              TextGenerator& teacher);

// Runs the four checks. attempts is left at 0.
//  1. heuristic proposer + repair over V reaches a converged Φ graph that is
//     weakly connected (a single unit passes; an empty V fails);
//  2. every unit of V occurs in a motif that fits the intent's archetype;
//  3. every KB unit mentioned in the rationale is in V;
//  4. every predicate holds on (intent, V).
ValidationReport validate_triplet(const SftTriplet& t, const KnowledgeBase& kb,
                                  const std::vector<MechanismPredicate>& predicates);

// Validates t; while a check fails and attempts remain, asks the teacher for a
// new rationale with the failing details appended to the prompt. V is never
// changed. The result is accepted iff all checks pass.
SftTriplet refine_until_valid(SftTriplet t, const KnowledgeBase& kb, const std::vector<MechanismPredicate>& predicates,
                              TextGenerator& teacher, std::size_t max_attempts);

// Removes one supporting unit of an accepted positive so that at least one of
// checks 1, 2 or 4 fails. Units that are the only satisfier of a predicate or
// of another unit's requires_input rule are preferred; the pick among the
// candidates is drawn from seed. Sentences of the rationale that mention the
// removed unit are dropped. Throws Error(kNoPerturbableUnit) when no removal
// breaks a check or V has a single unit.
SftTriplet perturb_negative(const SftTriplet& t, const KnowledgeBase& kb,
                            const std::vector<MechanismPredicate>& predicates, std::uint64_t seed);

// "<intent>" "<thinking>\n" rationale [defect block] "</thinking>\n" "UNITS: a, b\n".
// Literal <thinking> / </thinking> inside the rationale are written as
// &lt;thinking&gt; / &lt;/thinking&gt;.
std::string emit_training_record(const SftTriplet& t);
std::string escape_thinking_tags(std::string_view text);

struct DatagenConfig {
  double negative_fraction = 0.10;
  std::uint64_t seed = 0;
  std::size_t max_attempts = 3;
  std::size_t jobs = 1;
};

void validate_datagen_config(const DatagenConfig& cfg);

struct DatagenError {
  std::size_t index = 0;
  std::string message;
};

struct DatagenStats {
  std::size_t pairs = 0;
  std::size_t accepted_positives = 0;  // before negatives were taken out
  std::size_t rejected = 0;
  std::size_t negatives = 0;
  std::size_t positives = 0;  // in the emitted dataset
  std::map<std::string, std::size_t> check_failures;  // final failing checks of rejected pairs
  std::map<std::size_t, std::size_t> attempts_histogram;
  std::vector<DatagenError> errors;
};

// round(fraction * accepted), halves away from zero.
std::size_t negative_count(double fraction, std::size_t accepted);

// Emits accepted triplets only, in input order. round(negative_fraction *
// accepted) of them are replaced by their perturbed negatives; the positives
// to convert are taken from a seed-shuffled order, skipping those that admit
// no perturbation. Teacher errors are recorded per pair.
std::pair<std::vector<SftTriplet>, DatagenStats> build_sft_dataset(const std::vector<IntentUnits>& pairs,
                                                                   const KnowledgeBase& kb,
                                                                   const std::vector<MechanismPredicate>& predicates,
                                                                   TextGenerator& teacher, const DatagenConfig& cfg);

// Synthetic (intent, V) pairs: one or two overlapping motifs of a round-robin
// archetype, closed under the predicates. Deterministic in seed.
std::vector<IntentUnits> synthetic_pairs(const KnowledgeBase& kb, const std::vector<MechanismPredicate>& predicates,
                                         std::size_t count, std::uint64_t seed);

nlohmann::ordered_json validation_to_json(const ValidationReport& r);
nlohmann::ordered_json triplet_to_json(const SftTriplet& t);
SftTriplet triplet_from_json(const nlohmann::json& j);
nlohmann::ordered_json stats_to_json(const DatagenStats& s);

// One triplet_to_json() per line plus a "record" field.
std::string dataset_to_jsonl(const std::vector<SftTriplet>& dataset);
std::vector<SftTriplet> parse_dataset_jsonl(std::string_view text);

// [{"intent": {...}, "units": [...]}, ...]
std::vector<IntentUnits> parse_pairs(std::string_view text);
nlohmann::ordered_json pairs_to_json(const std::vector<IntentUnits>& pairs);

}  // namespace flowsynth
