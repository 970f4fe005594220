#include "flowsynth/datagen/datagen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "common/json_read.hpp"
#include "flowsynth/errors.hpp"
#include "flowsynth/kbgraph/constraints.hpp"
#include "flowsynth/kbgraph/graph_io.hpp"
#include "flowsynth/kbgraph/names.hpp"
#include "flowsynth/synth/repair.hpp"
#include "flowsynth/synth/synthesize.hpp"

namespace flowsynth {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string join(const std::set<std::string>& items, std::string_view sep) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool weakly_connected(const ProcessGraph& g) {
  if (g.node_count() <= 1) return true;
  std::vector<std::size_t> parent(g.node_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges()) parent[find(g.index_of(e.from))] = find(g.index_of(e.to));
  const std::size_t root = find(0);
  for (std::size_t i = 1; i < g.node_count(); ++i) {
    if (find(i) != root) return false;
  }
  return true;
}

CheckResult check_topology(const UnitSelection& v, const KnowledgeBase& kb) {
  if (v.units.empty()) return {false, "empty unit selection"};
  ProcessGraph g(nodes_for(v), heuristic_proposer(v, kb, 0));
  auto [out, trace] = repair_loop(g, kb, applicable_rules(g, kb), 10);
  if (!trace.converged || !check_phi(out, kb).satisfied) return {false, "repair did not converge"};
  if (!weakly_connected(out)) {
    std::set<std::string> isolated;
    for (std::size_t i = 0; i < out.node_count(); ++i) {
      if (out.in_edges(i).empty() && out.out_edges(i).empty()) isolated.insert(out.nodes()[i].id);
    }
    return {false, isolated.empty() ? "graph is not connected" : "isolated units: " + join(isolated, ", ")};
  }
  return {true, ""};
}

std::set<std::string> motif_units(const KnowledgeBase& kb, std::string_view archetype) {
  std::set<std::string> out;
  for (const auto& m : kb.motifs()) {
    if (m.fits_archetype(archetype)) out.insert(m.unit_ids.begin(), m.unit_ids.end());
  }
  return out;
}

CheckResult check_alignment(const UnitSelection& v, const KnowledgeBase& kb, std::string_view archetype) {
  const auto known = motif_units(kb, archetype);
  std::set<std::string> stray;
  for (const auto& u : v.units) {
    if (known.count(u) == 0) stray.insert(u);
  }
  if (stray.empty()) return {true, ""};
  return {false, "units outside " + std::string(archetype) + " motifs: " + join(stray, ", ")};
}

CheckResult check_mentions(std::string_view rationale, const UnitSelection& v, const MentionIndex& index) {
  std::set<std::string> extra;
  for (const auto& u : index.units_in(rationale)) {
    if (v.units.count(u) == 0) extra.insert(u);
  }
  if (extra.empty()) return {true, ""};
  return {false, "rationale mentions units not selected: " + join(extra, ", ")};
}

CheckResult check_mechanisms(const DesignIntent& intent, const UnitSelection& v, const KnowledgeBase& kb,
                             const std::vector<MechanismPredicate>& predicates) {
  std::set<std::string> failing;
  for (const auto& p : predicates) {
    if (!predicate_holds(p, intent, v.units, kb)) failing.insert(p.id);
  }
  if (failing.empty()) return {true, ""};
  return {false, "predicates violated: " + join(failing, ", ")};
}

bool structural_failure(const DesignIntent& intent, const UnitSelection& v, const KnowledgeBase& kb,
                        const std::vector<MechanismPredicate>& predicates) {
  return !check_mechanisms(intent, v, kb, predicates).passed || !check_alignment(v, kb, intent.archetype).passed ||
         !check_topology(v, kb).passed;
}

// True when u is the only unit of v satisfying some triggered predicate or
// some other unit's requires_input rule.
bool sole_satisfier(const std::string& u, const DesignIntent& intent, const UnitSelection& v, const KnowledgeBase& kb,
                    const std::vector<MechanismPredicate>& predicates) {
  std::set<std::string> rest = v.units;
  rest.erase(u);
  for (const auto& p : predicates) {
    if (predicate_holds(p, intent, v.units, kb) && predicate_triggered(p, intent, rest, kb) &&
        !predicate_holds(p, intent, rest, kb)) {
      return true;
    }
  }
  const auto& outputs = kb.unit(u).outputs;
  for (const auto& w : rest) {
    for (const auto& rule : kb.unit(w).io_rules) {
      if (rule.kind != IoRuleKind::kRequiresInput || outputs.count(rule.material) == 0) continue;
      const bool other = std::any_of(rest.begin(), rest.end(), [&](const std::string& x) {
        return x != w && kb.unit(x).outputs.count(rule.material) > 0;
      });
      if (!other) return true;
    }
  }
  return false;
}

std::string drop_sentences_mentioning(std::string_view text, const std::string& unit, const MentionIndex& index) {
  std::vector<std::string> keep;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    const bool end = i == text.size() || text[i] == '.' || text[i] == '!' || text[i] == '?' || text[i] == '\n';
    if (!end) continue;
    const std::size_t stop = i < text.size() && text[i] != '\n' ? i + 1 : i;
    const std::string sentence = trim(text.substr(start, stop - start));
    if (!sentence.empty() && index.units_in(sentence).count(unit) == 0) keep.push_back(sentence);
    start = i + 1;
  }
  std::string out;
  for (const auto& s : keep) {
    if (!out.empty()) out.push_back(' ');
    out += s;
  }
  return out;
}

std::string failure_details(const ValidationReport& r) {
  std::string out;
  const CheckResult* checks[] = {&r.topological_feasibility, &r.unit_configuration_alignment,
                                 &r.semantic_unit_consistency, &r.engineering_mechanism_review};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!checks[i]->passed) out += "FAILED " + std::string(kCheckNames[i]) + ": " + checks[i]->detail + "\n";
  }
  return out;
}

ordered_json check_json(const CheckResult& c) {
  ordered_json j{{"passed", c.passed}};
  if (!c.passed) j["detail"] = c.detail;
  return j;
}

CheckResult check_from_json(const json& j, const std::string& path) {
  detail::require_object(j, path);
  return {detail::get_bool(j, "passed", path), detail::get_string_or(j, "detail", path, "")};
}

ordered_json units_json(const UnitSelection& v) { return ordered_json(std::vector<std::string>(v.units.begin(), v.units.end())); }

}  // namespace

std::string_view polarity_name(Polarity p) { return p == Polarity::kPositive ? "positive" : "negative"; }

Polarity parse_polarity(std::string_view name) {
  if (name == "positive") return Polarity::kPositive;
  if (name == "negative") return Polarity::kNegative;
  throw Error(ErrorCode::kParse, "unknown polarity: " + std::string(name), std::string(name));
}

bool ValidationReport::all_passed() const {
  return topological_feasibility.passed && unit_configuration_alignment.passed && semantic_unit_consistency.passed &&
         engineering_mechanism_review.passed;
}

std::vector<std::string> ValidationReport::failed_checks() const {
  std::vector<std::string> out;
  const CheckResult* checks[] = {&topological_feasibility, &unit_configuration_alignment, &semantic_unit_consistency,
                                 &engineering_mechanism_review};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!checks[i]->passed) out.emplace_back(kCheckNames[i]);
  }
  return out;
}

std::string distillation_prompt(const DesignIntent& intent, const UnitSelection& units, const KnowledgeBase& kb) {
  std::string p =
      "Explain why each selected process unit is necessary for the design intent below.\n"
      "Use only the units and materials listed.\n\nINTENT\n";
  p += render_intent(intent);
  p += "\nUNITS\n";
  for (const auto& u : units.units) p += render_unit_schema(kb.unit(u)) + "\n";
  return p;
}

std::string distill_rationale(const DesignIntent& intent, const UnitSelection& units, const KnowledgeBase& kb,
                              TextGenerator& teacher) {
  GenerationRequest req;
  req.prompt = distillation_prompt(intent, units, kb);
  req.tags["stage"] = "distill";
  std::string out = teacher.generate(req);
  if (trim(out).empty()) throw Error(ErrorCode::kEmptyResponse, "teacher returned an empty rationale", teacher.name());
  return out;
}

ValidationReport validate_triplet(const SftTriplet& t, const KnowledgeBase& kb,
                                  const std::vector<MechanismPredicate>& predicates) {
  const MentionIndex index(kb);
  ValidationReport r;
  r.topological_feasibility = check_topology(t.units, kb);
  r.unit_configuration_alignment = check_alignment(t.units, kb, t.intent.archetype);
  r.semantic_unit_consistency = check_mentions(t.rationale, t.units, index);
  r.engineering_mechanism_review = check_mechanisms(t.intent, t.units, kb, predicates);
  return r;
}

SftTriplet refine_until_valid(SftTriplet t, const KnowledgeBase& kb, const std::vector<MechanismPredicate>& predicates,
                              TextGenerator& teacher, std::size_t max_attempts) {
  if (max_attempts < 1) throw Error(ErrorCode::kInvalidArgument, "max_attempts must be >= 1");
  for (std::size_t attempt = 1;; ++attempt) {
    t.validation = validate_triplet(t, kb, predicates);
    t.validation.attempts = attempt;
    t.accepted = t.validation.all_passed();
    if (t.accepted || attempt == max_attempts) return t;
    GenerationRequest req;
    req.prompt = distillation_prompt(t.intent, t.units, kb) + "\nPREVIOUS RATIONALE\n" + trim(t.rationale) +
                 "\n\nREVIEW\n" + failure_details(t.validation);
    req.tags["stage"] = "refine";
    req.tags["attempt"] = std::to_string(attempt + 1);
    t.rationale = teacher.generate(req);
  }
}

SftTriplet perturb_negative(const SftTriplet& t, const KnowledgeBase& kb,
                            const std::vector<MechanismPredicate>& predicates, std::uint64_t seed) {
  if (t.units.units.size() < 2) {
    throw Error(ErrorCode::kNoPerturbableUnit, "a single-unit selection cannot lose a unit");
  }
  std::vector<std::string> preferred;
  std::vector<std::string> other;
  for (const auto& u : t.units.units) {
    UnitSelection rest = t.units;
    rest.units.erase(u);
    if (!structural_failure(t.intent, rest, kb, predicates)) continue;
    (sole_satisfier(u, t.intent, t.units, kb, predicates) ? preferred : other).push_back(u);
  }
  const auto& pool = preferred.empty() ? other : preferred;
  if (pool.empty()) {
    throw Error(ErrorCode::kNoPerturbableUnit, "every single-unit removal keeps all checks passing");
  }
  std::mt19937_64 rng(seed);
  const std::string removed = pool[rng() % pool.size()];

  const MentionIndex index(kb);
  SftTriplet neg = t;
  neg.units.units.erase(removed);
  neg.polarity = Polarity::kNegative;
  neg.defect = std::string(kMissingSupportUnit);
  neg.removed_unit = removed;
  neg.rationale = drop_sentences_mentioning(t.rationale, removed, index);
  const std::size_t attempts = t.validation.attempts;
  neg.validation = validate_triplet(neg, kb, predicates);
  neg.validation.attempts = attempts;
  neg.accepted = !neg.validation.all_passed();
  return neg;
}

std::string escape_thinking_tags(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size();) {
    if (text.compare(i, 10, "<thinking>") == 0) {
      out += "&lt;thinking&gt;";
      i += 10;
    } else if (text.compare(i, 11, "</thinking>") == 0) {
      out += "&lt;/thinking&gt;";
      i += 11;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

std::string emit_training_record(const SftTriplet& t) {
  std::string out = render_intent(t.intent);
  out += "<thinking>\n";
  const std::string r = trim(escape_thinking_tags(t.rationale));
  if (!r.empty()) out += r + "\n";
  if (t.polarity == Polarity::kNegative) {
    out += "Defect: " + t.defect.value_or(std::string(kMissingSupportUnit)) + " (" + t.removed_unit + ")\n";
    std::string failed;
    for (const auto& c : t.validation.failed_checks()) failed += (failed.empty() ? "" : ", ") + c;
    out += "Corrective measure: add " + t.removed_unit + " to close " + (failed.empty() ? "the design" : failed) + "\n";
  }
  out += "</thinking>\n";
  out += "UNITS: " + join(t.units.units, ", ") + "\n";
  return out;
}

void validate_datagen_config(const DatagenConfig& cfg) {
  if (!(cfg.negative_fraction >= 0.0 && cfg.negative_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "negative_fraction must be in [0, 1]");
  }
  if (cfg.max_attempts < 1) throw Error(ErrorCode::kInvalidArgument, "max_attempts must be >= 1");
  if (cfg.jobs < 1) throw Error(ErrorCode::kInvalidArgument, "jobs must be >= 1");
}

std::size_t negative_count(double fraction, std::size_t accepted) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(accepted)));
}

std::pair<std::vector<SftTriplet>, DatagenStats> build_sft_dataset(const std::vector<IntentUnits>& pairs,
                                                                   const KnowledgeBase& kb,
                                                                   const std::vector<MechanismPredicate>& predicates,
                                                                   TextGenerator& teacher, const DatagenConfig& cfg) {
  validate_datagen_config(cfg);
  if (pairs.empty()) throw Error(ErrorCode::kInvalidArgument, "no (intent, units) pairs");

  std::vector<std::optional<SftTriplet>> results(pairs.size());
  std::vector<std::string> errors(pairs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < pairs.size(); i = next++) {
      try {
        SftTriplet t;
        t.intent = pairs[i].intent;
        t.units = pairs[i].units;
        t.rationale = distill_rationale(t.intent, t.units, kb, teacher);
        results[i] = refine_until_valid(std::move(t), kb, predicates, teacher, cfg.max_attempts);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const std::size_t jobs = std::min(cfg.jobs, pairs.size());
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }

  DatagenStats stats;
  stats.pairs = pairs.size();
  std::vector<std::size_t> accepted;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!results[i]) {
      stats.errors.push_back({i, errors[i]});
      continue;
    }
    ++stats.attempts_histogram[results[i]->validation.attempts];
    if (results[i]->accepted) {
      accepted.push_back(i);
    } else {
      ++stats.rejected;
      for (const auto& c : results[i]->validation.failed_checks()) ++stats.check_failures[c];
    }
  }
  stats.accepted_positives = accepted.size();

  const std::size_t wanted = negative_count(cfg.negative_fraction, accepted.size());
  std::vector<std::size_t> order = accepted;
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  for (std::size_t k = 0; k < order.size() && stats.negatives < wanted; ++k) {
    const std::size_t i = order[k];
    try {
      SftTriplet neg = perturb_negative(*results[i], kb, predicates, cfg.seed + i);
      if (!neg.accepted) continue;
      results[i] = std::move(neg);
      ++stats.negatives;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoPerturbableUnit) throw;
    }
  }

  std::vector<SftTriplet> dataset;
  for (std::size_t i : accepted) dataset.push_back(std::move(*results[i]));
  stats.positives = dataset.size() - stats.negatives;
  return {std::move(dataset), std::move(stats)};
}

std::vector<IntentUnits> synthetic_pairs(const KnowledgeBase& kb, const std::vector<MechanismPredicate>& predicates,
                                         std::size_t count, std::uint64_t seed) {
  std::vector<std::string> archetypes(kb.archetypes().begin(), kb.archetypes().end());
  if (archetypes.empty()) throw Error(ErrorCode::kInvalidArgument, "knowledge base declares no archetypes");
  std::mt19937_64 rng(seed);
  std::vector<IntentUnits> out;

  auto derive_intent = [&](const std::set<std::string>& v, const std::string& arch) {
    std::set<std::string> in;
    std::set<std::string> made;
    for (const auto& u : v) {
      in.insert(kb.unit(u).inputs.begin(), kb.unit(u).inputs.end());
      made.insert(kb.unit(u).outputs.begin(), kb.unit(u).outputs.end());
    }
    DesignIntent intent;
    intent.archetype = arch;
    for (const auto& m : in) {
      if (made.count(m) == 0 && intent.feedstock.size() < 2) intent.feedstock.push_back(m);
    }
    for (const auto& m : made) {
      if (in.count(m) == 0 && intent.products.size() < 3) intent.products.push_back(m);
    }
    return intent;
  };

  for (std::size_t i = 0; i < count; ++i) {
    const std::string& arch = archetypes[i % archetypes.size()];
    std::vector<const Motif*> fitting;
    for (const auto& m : kb.motifs()) {
      if (m.fits_archetype(arch) && !m.unit_ids.empty()) fitting.push_back(&m);
    }
    if (fitting.empty()) continue;
    const auto allowed = motif_units(kb, arch);
    const Motif* first = fitting[rng() % fitting.size()];
    std::set<std::string> v(first->unit_ids.begin(), first->unit_ids.end());
    if (rng() % 2 == 0) {
      std::vector<const Motif*> linked;
      for (const auto* m : fitting) {
        if (m == first) continue;
        if (std::any_of(m->unit_ids.begin(), m->unit_ids.end(), [&](const auto& u) { return v.count(u) > 0; })) {
          linked.push_back(m);
        }
      }
      if (!linked.empty()) {
        const Motif* second = linked[rng() % linked.size()];
        v.insert(second->unit_ids.begin(), second->unit_ids.end());
      }
    }

    auto provider = [&](bool produces, const std::string& material) -> std::optional<std::string> {
      for (const auto& u : allowed) {
        const auto& spec = kb.unit(u);
        if ((produces ? spec.outputs : spec.inputs).count(material) > 0) return u;
      }
      return std::nullopt;
    };
    DesignIntent intent = derive_intent(v, arch);
    for (int round = 0; round < 16; ++round) {
      bool changed = false;
      for (const auto& p : predicates) {
        if (predicate_holds(p, intent, v, kb)) continue;
        for (const auto& c : p.then) {
          if (condition_holds(c, intent, v, kb)) continue;
          std::optional<std::string> add;
          if (c.kind == Condition::Kind::kUnitPresent) add = c.id;
          if (c.kind == Condition::Kind::kAnyUnitProduces) add = provider(true, c.id);
          if (c.kind == Condition::Kind::kAnyUnitConsumes) add = provider(false, c.id);
          if (add && kb.has_unit(*add) && v.insert(*add).second) changed = true;
        }
      }
      intent = derive_intent(v, arch);
      if (!changed) break;
    }
    out.push_back({std::move(intent), UnitSelection{std::move(v)}});
  }
  return out;
}

ordered_json validation_to_json(const ValidationReport& r) {
  return {{"topological_feasibility", check_json(r.topological_feasibility)},
          {"unit_configuration_alignment", check_json(r.unit_configuration_alignment)},
          {"semantic_unit_consistency", check_json(r.semantic_unit_consistency)},
          {"engineering_mechanism_review", check_json(r.engineering_mechanism_review)},
          {"attempts", r.attempts}};
}

ordered_json triplet_to_json(const SftTriplet& t) {
  ordered_json j{{"intent", intent_to_json(t.intent)},
                 {"rationale", t.rationale},
                 {"units", units_json(t.units)},
                 {"polarity", polarity_name(t.polarity)}};
  if (t.defect) {
    j["defect"] = *t.defect;
    j["removed_unit"] = t.removed_unit;
  }
  j["validation"] = validation_to_json(t.validation);
  return j;
}

SftTriplet triplet_from_json(const json& j) {
  const std::string path = "triplet";
  detail::require_object(j, path);
  SftTriplet t;
  t.intent = intent_from_json(detail::require(j, "intent", path), detail::child(path, "intent"));
  t.rationale = detail::get_string(j, "rationale", path);
  t.units.units = detail::get_string_set(j, "units", path);
  t.polarity = parse_polarity(detail::get_string(j, "polarity", path));
  if (j.contains("defect")) {
    t.defect = detail::get_string(j, "defect", path);
    t.removed_unit = detail::get_string_or(j, "removed_unit", path, "");
  }
  if (t.polarity == Polarity::kNegative && !t.defect) detail::field_error(path, "negative triplet without defect");
  if (j.contains("validation")) {
    const auto& v = j["validation"];
    const std::string vp = detail::child(path, "validation");
    detail::require_object(v, vp);
    t.validation.topological_feasibility =
        check_from_json(detail::require(v, "topological_feasibility", vp), detail::child(vp, "topological_feasibility"));
    t.validation.unit_configuration_alignment = check_from_json(
        detail::require(v, "unit_configuration_alignment", vp), detail::child(vp, "unit_configuration_alignment"));
    t.validation.semantic_unit_consistency = check_from_json(detail::require(v, "semantic_unit_consistency", vp),
                                                             detail::child(vp, "semantic_unit_consistency"));
    t.validation.engineering_mechanism_review = check_from_json(
        detail::require(v, "engineering_mechanism_review", vp), detail::child(vp, "engineering_mechanism_review"));
    if (v.contains("attempts") && v["attempts"].is_number_unsigned()) {
      t.validation.attempts = v["attempts"].get<std::size_t>();
    }
  }
  t.accepted = t.polarity == Polarity::kPositive ? t.validation.all_passed() : !t.validation.all_passed();
  return t;
}

ordered_json stats_to_json(const DatagenStats& s) {
  ordered_json failures = ordered_json::object();
  for (const auto name : kCheckNames) {
    const auto it = s.check_failures.find(std::string(name));
    const std::size_t n = it == s.check_failures.end() ? 0 : it->second;
    failures[std::string(name)] = s.pairs == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(s.pairs);
  }
  ordered_json histogram = ordered_json::object();
  for (const auto& [attempts, n] : s.attempts_histogram) histogram[std::to_string(attempts)] = n;
  ordered_json errors = ordered_json::array();
  for (const auto& e : s.errors) errors.push_back({{"index", e.index}, {"message", e.message}});
  return {{"pairs", s.pairs},
          {"accepted_positives", s.accepted_positives},
          {"rejected", s.rejected},
          {"positives", s.positives},
          {"negatives", s.negatives},
          {"check_failure_rate", failures},
          {"attempts_histogram", histogram},
          {"errors", errors}};
}

std::string dataset_to_jsonl(const std::vector<SftTriplet>& dataset) {
  std::string out;
  for (const auto& t : dataset) {
    auto j = triplet_to_json(t);
    j["record"] = emit_training_record(t);
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<SftTriplet> parse_dataset_jsonl(std::string_view text) {
  std::vector<SftTriplet> out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string line = trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    try {
      out.push_back(triplet_from_json(detail::parse_json_text(line, "dataset line")));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what(), e.subject());
    }
  }
  return out;
}

std::vector<IntentUnits> parse_pairs(std::string_view text) {
  const json j = detail::parse_json_text(text, "pairs");
  detail::require_array(j, "pairs");
  std::vector<IntentUnits> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = detail::child("pairs", i);
    detail::require_object(j[i], path);
    IntentUnits p;
    p.intent = intent_from_json(detail::require(j[i], "intent", path), detail::child(path, "intent"));
    p.units.units = detail::get_string_set(j[i], "units", path);
    out.push_back(std::move(p));
  }
  return out;
}

ordered_json pairs_to_json(const std::vector<IntentUnits>& pairs) {
  ordered_json arr = ordered_json::array();
  for (const auto& p : pairs) arr.push_back({{"intent", intent_to_json(p.intent)}, {"units", units_json(p.units)}});
  return arr;
}

}  // namespace flowsynth
