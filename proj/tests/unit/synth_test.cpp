#include <gtest/gtest.h>

#include <random>

#include "flowsynth/errors.hpp"
#include "flowsynth/kbgraph/constraints.hpp"
#include "flowsynth/kbgraph/graph_io.hpp"
#include "flowsynth/synth/repair.hpp"
#include "flowsynth/synth/synthesize.hpp"
#include "support/test_support.hpp"

namespace flowsynth {
namespace {

using testing::edge;
using testing::make_kb;
using testing::unit_graph;

UnitSelection sel(std::initializer_list<std::string> ids) { return {{ids.begin(), ids.end()}}; }

KnowledgeBase bench_kb() { return load_knowledge_base(testing::fixtures_dir() / "bench" / "kb.json"); }

UnitSelection task_units(const std::string& arch) {
  auto task = nlohmann::json::parse(read_text_file(testing::fixtures_dir() / "bench" / "tasks" / (arch + ".json")));
  UnitSelection v;
  for (const auto& u : task["gt_units"]) v.units.insert(u.get<std::string>());
  return v;
}

// ---------------------------------------------------------------------------
// retrieval

Motif motif(std::string id, std::vector<std::string> units) { return {std::move(id), std::move(units), {}, "", {}}; }

KnowledgeBase motif_kb() {
  return make_kb({{"a", {"m"}, {"m"}}, {"b", {"m"}, {"m"}}, {"c", {"m"}, {"m"}}, {"d", {"m"}, {"m"}}},
                 {motif("zeta", {"a", "b"}), motif("alpha", {"a", "c"}), motif("full", {"a", "b", "c"})});
}

TEST(RetrieveContext, FullMotifRanksFirst) {
  const KnowledgeBase kb = motif_kb();
  auto ctx = retrieve_context(sel({"a", "b", "c"}), kb, 1);
  ASSERT_EQ(ctx.motifs.size(), 1u);
  EXPECT_EQ(ctx.motifs[0].motif->id, "alpha");  // alpha, full and zeta all have overlap 1.0
  EXPECT_DOUBLE_EQ(ctx.motifs[0].overlap, 1.0);
  EXPECT_EQ(ctx.unit_schemas.size(), 3u);
}

TEST(RetrieveContext, TiesBrokenById) {
  // {a, b}: zeta 2/2, full 2/3, alpha 1/2.
  const KnowledgeBase kb = motif_kb();
  auto ctx = retrieve_context(sel({"a", "b"}), kb, 3);
  ASSERT_EQ(ctx.motifs.size(), 3u);
  EXPECT_EQ(ctx.motifs[0].motif->id, "zeta");
  EXPECT_EQ(ctx.motifs[1].motif->id, "full");
  EXPECT_EQ(ctx.motifs[2].motif->id, "alpha");
  // {d}: every motif scores 0, so ids decide.
  auto zero = retrieve_context(sel({"d"}), kb, 2);
  EXPECT_EQ(zero.motifs[0].motif->id, "alpha");
  EXPECT_EQ(zero.motifs[1].motif->id, "full");
}

TEST(RetrieveContext, ZeroAndOversizedN) {
  auto none = retrieve_context(sel({"a"}), motif_kb(), 0);
  EXPECT_TRUE(none.motifs.empty());
  EXPECT_EQ(none.unit_schemas.size(), 1u);
  for (std::size_t n = 0; n < 6; ++n) {
    EXPECT_EQ(retrieve_context(sel({"a"}), motif_kb(), n).n, std::min<std::size_t>(n, 3));
  }
}

TEST(RetrieveContext, UnknownUnit) {
  try {
    retrieve_context(sel({"a", "ghost"}), motif_kb(), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownUnit);
  }
}

// ---------------------------------------------------------------------------
// heuristic proposer

TEST(HeuristicProposer, HandEnumeratedPairs) {
  // cdu -> nht shares {naphtha}; nht -> cdu shares nothing.
  KnowledgeBase kb = make_kb({{"cdu", {"crude"}, {"naphtha", "diesel"}},
                              {"nht", {"naphtha", "hydrogen"}, {"treated_naphtha"}}});
  auto edges = heuristic_proposer(sel({"cdu", "nht"}), kb, 0);
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(edges[0], edge("cdu", "nht", "naphtha"));
  EXPECT_TRUE(heuristic_proposer(sel({"cdu"}), kb, 0).empty());
  KnowledgeBase apart = make_kb({{"x", {"a"}, {"b"}}, {"y", {"c"}, {"d"}}});
  EXPECT_TRUE(heuristic_proposer(sel({"x", "y"}), apart, 0).empty());
}

TEST(HeuristicProposer, SmallestSharedMaterial) {
  KnowledgeBase kb = make_kb({{"p", {"z"}, {"b", "a", "c"}}, {"q", {"c", "b"}, {"z"}}});
  auto edges = heuristic_proposer(sel({"p", "q"}), kb, 0);
  EXPECT_EQ(edges, (std::vector<Edge>{edge("p", "q", "b"), edge("q", "p", "z")}));
}

// ---------------------------------------------------------------------------
// proposal parsing

TEST(ParseProposedEdges, LinesWithAliasesAndDrops) {
  KnowledgeBase kb = bench_kb();
  auto v = sel({"cdu", "vdu", "fcc"});
  const char* text =
      "Here is the flowsheet:\n"
      "```\n"
      "1. cdu -> vdu : atmospheric residue\n"
      "- Vacuum Distillation Unit -> fcc : vgo\n"
      "cdu -> fcc\n"
      "cdu -> vdu : atm_residue\n"   // duplicate of line 1
      "cdu -> cdu : steam\n"         // self-loop
      "cdu -> sru : acid_gas\n"      // sru not selected
      "vdu -> fcc : unobtainium\n"   // unknown material
      "fcc ->\n"                     // malformed
      "```\n";
  auto p = parse_proposed_edges(text, v, kb);
  EXPECT_EQ(p.edges, (std::vector<Edge>{edge("cdu", "fcc"), edge("cdu", "vdu", "atm_residue"),
                                        edge("vdu", "fcc", "vgo")}));
  EXPECT_EQ(p.dropped, 4u);
}

TEST(ParseProposedEdges, Json) {
  KnowledgeBase kb = bench_kb();
  auto v = sel({"cdu", "vdu"});
  auto p = parse_proposed_edges(
      R"({"edges": [{"from": "cdu", "to": "vdu", "material": "atm_residue"}, {"from": "cdu"}, 7]})", v, kb);
  EXPECT_EQ(p.edges, (std::vector<Edge>{edge("cdu", "vdu", "atm_residue")}));
  EXPECT_EQ(p.dropped, 2u);
  auto bare = parse_proposed_edges(R"([{"from": "vdu", "to": "cdu", "material": null}])", v, kb);
  EXPECT_EQ(bare.edges, (std::vector<Edge>{edge("vdu", "cdu")}));
  EXPECT_EQ(parse_proposed_edges("no edges here", v, kb).edges.size(), 0u);
}

// ---------------------------------------------------------------------------
// repair loop

KnowledgeBase h2_kb() {
  IoRule needs_h2{IoRuleKind::kRequiresInput, "hydrogen", ""};
  return make_kb({{"cdu", {"crude"}, {"diesel", "sour_water"}},
                  {"hgu", {"natural_gas"}, {"hydrogen"}},
                  {"dht", {"diesel", "hydrogen"}, {"ulsd", "sour_water"}, {needs_h2}},
                  {"sws", {"sour_water"}, {"stripped_water"}}},
                 {}, {{"sour_water_to_sws", {SourcePredicate::Kind::kMaterial, "sour_water"}, "sws", ""}});
}

TEST(RepairLoop, RemovesIncompatibleEdge) {
  KnowledgeBase kb = h2_kb();
  ProcessGraph g = unit_graph({"cdu", "dht"}, {edge("cdu", "dht", "diesel"), edge("dht", "cdu")});
  auto [out, trace] = repair_loop(g, kb, {}, 10);
  EXPECT_FALSE(out.has_edge(edge("dht", "cdu")));
  EXPECT_TRUE(out.has_edge(edge("cdu", "dht", "diesel")));
  ASSERT_EQ(trace.iterations.size(), 1u);
  EXPECT_EQ(trace.iterations[0].edges_removed, (std::vector<Edge>{edge("dht", "cdu")}));
  EXPECT_TRUE(trace.converged);
  // Hydrogen cannot be supplied without a producer in the graph.
  EXPECT_EQ(trace.unrepairable, (std::vector<std::string>{"io_rule:dht:requires_input:hydrogen"}));
}

TEST(RepairLoop, FixpointIsUnchanged) {
  KnowledgeBase kb = h2_kb();
  ProcessGraph g = unit_graph({"cdu", "hgu", "dht"}, {edge("cdu", "dht", "diesel"), edge("hgu", "dht", "hydrogen")});
  auto [out, trace] = repair_loop(g, kb, kb.critical_paths(), 10);
  EXPECT_EQ(out, g);
  EXPECT_TRUE(trace.iterations.empty());
  EXPECT_TRUE(trace.converged);
}

TEST(RepairLoop, AddsHydrogenFromHydrogenPlant) {
  KnowledgeBase kb = h2_kb();
  ProcessGraph g = unit_graph({"cdu", "hgu", "dht"}, {edge("cdu", "dht", "diesel")});
  auto [out, trace] = repair_loop(g, kb, {}, 10);
  EXPECT_TRUE(out.has_edge(edge("hgu", "dht", "hydrogen")));
  EXPECT_EQ(out.edge_count(), 2u);
  ASSERT_EQ(trace.iterations.size(), 1u);
  EXPECT_EQ(trace.iterations[0].violations_before, 1u);
  EXPECT_TRUE(trace.converged);
}

TEST(RepairLoop, AddsCriticalPathEdge) {
  // Sources of sour water: cdu and dht. Candidates into sws: (cdu, sour_water)
  // and (dht, sour_water); cdu is smaller.
  KnowledgeBase kb = h2_kb();
  ProcessGraph g = unit_graph({"cdu", "hgu", "dht", "sws"},
                              {edge("cdu", "dht", "diesel"), edge("hgu", "dht", "hydrogen")});
  auto [out, trace] = repair_loop(g, kb, kb.critical_paths(), 10);
  EXPECT_EQ(out.edge_count(), 3u);
  EXPECT_TRUE(out.has_edge(edge("cdu", "sws", "sour_water")));
  EXPECT_TRUE(critical_path_satisfied(out, kb, kb.critical_paths()[0]));
}

TEST(RepairLoop, UnknownUnitThrows) {
  ProcessGraph g = unit_graph({"ghost"});
  EXPECT_THROW(repair_loop(g, h2_kb(), {}, 3), Error);
}

struct RandomCase {
  KnowledgeBase kb;
  ProcessGraph g;
};

RandomCase random_case(std::mt19937_64& rng) {
  KnowledgeBase base = testing::random_kb(rng, 6, 4);
  std::vector<testing::UnitDef> defs;
  for (const auto& u : base.units()) {
    testing::UnitDef d{u.id, u.inputs, u.outputs};
    if (!u.inputs.empty() && testing::coin(rng, 0.4)) d.rules.push_back({IoRuleKind::kRequiresInput, *u.inputs.begin(), ""});
    if (testing::coin(rng, 0.2)) d.rules.push_back({IoRuleKind::kRequiresOutput, *u.outputs.rbegin(), ""});
    if (testing::coin(rng, 0.1)) d.rules.push_back({IoRuleKind::kForbidsInput, "m0", ""});
    defs.push_back(d);
  }
  std::vector<CriticalPathRule> rules{{"r0", {SourcePredicate::Kind::kUnit, "u0"}, "u3", ""},
                                      {"r1", {SourcePredicate::Kind::kUnit, "u1"}, "u2", ""}};
  KnowledgeBase kb = make_kb(defs, {}, rules);
  ProcessGraph g = testing::random_graph(rng, kb, 8, 0.3);
  return {std::move(kb), std::move(g)};
}

TEST(RepairLoopProperty, PhiIdempotentAndMonotoneProgress) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 400; ++trial) {
    auto [kb, g] = random_case(rng);
    const auto rules = applicable_rules(g, kb);
    auto [out, trace] = repair_loop(g, kb, rules, 10);
    ASSERT_TRUE(check_phi(out, kb).satisfied) << serialize_graph(g);
    ASSERT_TRUE(testing::brute_force_phi(out, kb));
    ASSERT_LE(trace.iterations.size(), 10u);
    ASSERT_TRUE(trace.converged) << serialize_graph(g);
    for (std::size_t i = 1; i < trace.iterations.size(); ++i) {
      ASSERT_LT(trace.iterations[i].violations_before, trace.iterations[i - 1].violations_before);
    }
    auto [again, trace2] = repair_loop(out, kb, rules, 10);
    ASSERT_EQ(again, out);
    ASSERT_TRUE(trace2.iterations.empty());
  }
}

// ---------------------------------------------------------------------------
// synthesize

TEST(Synthesize, HeuristicOnFixtureTasks) {
  KnowledgeBase kb = bench_kb();
  for (const char* arch : {"fuel", "petrochemical", "aromatics"}) {
    UnitSelection v = task_units(arch);
    auto [g, trace] = synthesize(v, kb, SynthConfig{}, nullptr);
    EXPECT_TRUE(check_phi(g, kb).satisfied) << arch;
    EXPECT_TRUE(trace.converged) << arch;
    EXPECT_EQ(g.node_count(), v.units.size());
    for (const auto& rule : applicable_rules(g, kb)) EXPECT_TRUE(critical_path_satisfied(g, kb, rule)) << rule.id;
  }
}

TEST(Synthesize, MockBadEdgeIsRemoved) {
  KnowledgeBase kb = bench_kb();
  auto v = sel({"cdu", "vdu"});
  CallbackGenerator mock([](const GenerationRequest&) { return "cdu -> vdu : atm_residue\nvdu -> cdu : vgo\n"; });
  SynthConfig cfg;
  cfg.proposer = ProposerKind::kMock;
  auto [g, trace] = synthesize(v, kb, cfg, &mock);
  EXPECT_TRUE(g.has_edge(edge("cdu", "vdu", "atm_residue")));
  EXPECT_FALSE(g.has_edge(edge("vdu", "cdu", "vgo")));
  EXPECT_TRUE(check_phi(g, kb).satisfied);
}

TEST(Synthesize, EmptySelection) {
  auto [g, trace] = synthesize({}, bench_kb(), SynthConfig{}, nullptr);
  EXPECT_TRUE(g.empty());
  EXPECT_TRUE(trace.converged);
}

TEST(Synthesize, GeneratorRequiredForMock) {
  SynthConfig cfg;
  cfg.proposer = ProposerKind::kMock;
  EXPECT_THROW(synthesize(sel({"cdu"}), bench_kb(), cfg, nullptr), Error);
}

TEST(Synthesize, PromptFollowsRationaleMode) {
  KnowledgeBase kb = bench_kb();
  auto ctx = retrieve_context(task_units("fuel"), kb, 2);
  const std::string none = build_synthesis_prompt(ctx, RationaleMode::kNone, "because");
  const std::string topo = build_synthesis_prompt(ctx, RationaleMode::kKeyTopology, "because");
  const std::string reasoning = build_synthesis_prompt(ctx, RationaleMode::kReasoning, "because");
  const std::string all = build_synthesis_prompt(ctx, RationaleMode::kAll, "because");
  EXPECT_EQ(none.find("KEY TOPOLOGY"), std::string::npos);
  EXPECT_EQ(none.find("because"), std::string::npos);
  EXPECT_NE(topo.find("KEY TOPOLOGY"), std::string::npos);
  EXPECT_EQ(topo.find("because"), std::string::npos);
  EXPECT_EQ(reasoning.find("KEY TOPOLOGY"), std::string::npos);
  EXPECT_NE(reasoning.find("because"), std::string::npos);
  EXPECT_NE(all.find("KEY TOPOLOGY"), std::string::npos);
  EXPECT_NE(all.find("because"), std::string::npos);
  EXPECT_NE(none.find("UNIT cdu | Crude Distillation Unit |"), std::string::npos);
}

// Emits random edge lines, some nonsense, over the KB's whole vocabulary.
std::string adversarial_proposal(std::mt19937_64& rng, const KnowledgeBase& kb, const UnitSelection& v) {
  std::vector<std::string> names(v.units.begin(), v.units.end());
  names.push_back("flux capacitor");
  names.push_back(kb.units()[testing::pick(rng, kb.units().size())].id);
  std::string out = "Sure, here you go:\n";
  const std::size_t lines = testing::pick(rng, 60);
  for (std::size_t i = 0; i < lines; ++i) {
    const std::string& a = names[testing::pick(rng, names.size())];
    const std::string& b = names[testing::pick(rng, names.size())];
    switch (testing::pick(rng, 4)) {
      case 0:
        out += a + " -> " + b + "\n";
        break;
      case 1:
        out += a + " -> " + b + " : " + kb.materials()[testing::pick(rng, kb.materials().size())].id + "\n";
        break;
      case 2:
        out += a + " -> \n";
        break;
      default:
        out += "- " + a + " feeds " + b + "\n";
    }
  }
  return out;
}

TEST(SynthesizeProperty, AdversarialProposerAlwaysYieldsPhi) {
  KnowledgeBase kb = bench_kb();
  std::mt19937_64 rng(5150);
  const UnitSelection tasks[] = {task_units("fuel"), task_units("petrochemical"), task_units("aromatics")};
  CallbackGenerator adversary([&](const GenerationRequest&) { return adversarial_proposal(rng, kb, tasks[0]); });
  for (int trial = 0; trial < 30; ++trial) {
    const UnitSelection& v = tasks[trial % 3];
    CallbackGenerator gen([&](const GenerationRequest&) { return adversarial_proposal(rng, kb, v); });
    SynthConfig cfg;
    cfg.proposer = ProposerKind::kRemote;
    auto [g, trace] = synthesize(v, kb, cfg, &gen);
    ASSERT_TRUE(check_phi(g, kb).satisfied);
    ASSERT_TRUE(trace.converged);
    ASSERT_LE(trace.iterations.size(), cfg.max_repair_iters);
    auto [again, trace2] = repair_loop(g, kb, applicable_rules(g, kb), cfg.max_repair_iters);
    ASSERT_EQ(again, g);
  }
}

TEST(SynthesizeProperty, DeterministicWithMockTable) {
  KnowledgeBase kb = bench_kb();
  UnitSelection v = task_units("aromatics");
  MockTable table;
  table.fallback = "cdu -> vdu : atm_residue\nreformer -> nht : hydrogen\nsru -> cdu : steam\n";
  MockGenerator mock(table);
  SynthConfig cfg;
  cfg.proposer = ProposerKind::kMock;
  auto [g1, t1] = synthesize(v, kb, cfg, &mock);
  auto [g2, t2] = synthesize(v, kb, cfg, &mock);
  EXPECT_EQ(serialize_graph(g1), serialize_graph(g2));
  EXPECT_EQ(trace_to_json(t1).dump(), trace_to_json(t2).dump());
}

}  // namespace
}  // namespace flowsynth
