#include "flowsynth/synth/synthesize.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flowsynth/errors.hpp"
#include "flowsynth/kbgraph/names.hpp"

namespace flowsynth {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Drops list markers such as "-", "*", "3." or "3)".
std::string strip_marker(std::string s) {
  std::size_t i = 0;
  while (i < s.size() && (s[i] == '-' || s[i] == '*' || s[i] == ' ' || s[i] == '\t') && s.compare(i, 2, "->") != 0) {
    ++i;
  }
  std::size_t j = i;
  while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
  if (j > i && j < s.size() && (s[j] == '.' || s[j] == ')')) i = j + 1;
  return trim(std::string_view(s).substr(i));
}

class EdgeResolver {
 public:
  EdgeResolver(const UnitSelection& v, const KnowledgeBase& kb) : v_(v), kb_(kb) {
    for (const auto& m : kb.materials()) {
      materials_[phrase_key(m.id)] = m.id;
      for (const auto& a : m.aliases) materials_[phrase_key(a)] = m.id;
    }
  }

  std::optional<Edge> resolve(std::string_view from, std::string_view to, std::optional<std::string_view> material) const {
    auto a = unit(from);
    auto b = unit(to);
    if (!a || !b || *a == *b) return std::nullopt;
    Edge e{*a, *b, std::nullopt};
    if (material && !trim(*material).empty()) {
      auto it = materials_.find(phrase_key(*material));
      if (it == materials_.end()) return std::nullopt;
      e.material = it->second;
    }
    return e;
  }

 private:
  std::optional<std::string> unit(std::string_view name) const {
    try {
      std::string id = canonicalize_unit_name(name, kb_);
      if (v_.units.count(id) == 0) return std::nullopt;
      return id;
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  const UnitSelection& v_;
  const KnowledgeBase& kb_;
  std::map<std::string, std::string> materials_;
};

bool parse_json_edges(std::string_view text, const EdgeResolver& resolver, std::set<Edge>& edges,
                      std::size_t& dropped) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    return false;
  }
  const nlohmann::json* list = &j;
  if (j.is_object()) {
    if (!j.contains("edges")) return false;
    list = &j["edges"];
  }
  if (!list->is_array()) return false;
  for (const auto& item : *list) {
    const bool shaped = item.is_object() && item.contains("from") && item["from"].is_string() &&
                        item.contains("to") && item["to"].is_string() &&
                        (!item.contains("material") || item["material"].is_string() || item["material"].is_null());
    std::optional<Edge> e;
    if (shaped) {
      std::optional<std::string> m;
      if (item.contains("material") && item["material"].is_string()) m = item["material"].get<std::string>();
      e = resolver.resolve(item["from"].get<std::string>(), item["to"].get<std::string>(),
                           m ? std::optional<std::string_view>(*m) : std::nullopt);
    }
    if (e) {
      edges.insert(*e);
    } else {
      ++dropped;
    }
  }
  return true;
}

}  // namespace

ContextBundle retrieve_context(const UnitSelection& v, const KnowledgeBase& kb, std::size_t n) {
  ContextBundle ctx;
  for (const auto& u : v.units) ctx.unit_schemas.push_back(kb.unit(u));
  std::vector<ScoredMotif> scored;
  for (const auto& m : kb.motifs()) {
    std::size_t hit = 0;
    for (const auto& u : m.unit_ids) hit += v.units.count(u);
    const double overlap = m.unit_ids.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(m.unit_ids.size());
    scored.push_back({&m, overlap});
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredMotif& a, const ScoredMotif& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    return a.motif->id < b.motif->id;
  });
  scored.resize(std::min(n, scored.size()));
  for (const auto& s : scored) {
    for (const auto& e : s.motif->edges) ctx.exemplars.push_back(e.from + " -> " + e.to + " : " + e.material);
  }
  ctx.motifs = std::move(scored);
  ctx.n = ctx.motifs.size();
  return ctx;
}

std::vector<Node> nodes_for(const UnitSelection& v) {
  std::vector<Node> nodes;
  for (const auto& u : v.units) nodes.push_back({u, u});
  return nodes;
}

std::vector<Edge> heuristic_proposer(const UnitSelection& v, const KnowledgeBase& kb, [[maybe_unused]] std::uint64_t seed) {
  std::vector<Edge> edges;
  for (const auto& a : v.units) {
    const auto& out = kb.unit(a).outputs;
    for (const auto& b : v.units) {
      if (a == b) continue;
      const auto& in = kb.unit(b).inputs;
      for (const auto& m : out) {  // sets iterate in order: first hit is the smallest
        if (in.count(m) > 0) {
          edges.push_back({a, b, m});
          break;
        }
      }
    }
  }
  return edges;
}

ParsedProposal parse_proposed_edges(std::string_view text, const UnitSelection& v, const KnowledgeBase& kb) {
  EdgeResolver resolver(v, kb);
  std::set<Edge> edges;
  std::size_t dropped = 0;

  // Strip Markdown code fences.
  std::string body;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).rfind("```", 0) == 0) continue;
      body += line;
      body.push_back('\n');
    }
  }
  const std::string stripped = trim(body);
  const bool json_like = !stripped.empty() && (stripped.front() == '{' || stripped.front() == '[');
  if (!json_like || !parse_json_edges(stripped, resolver, edges, dropped)) {
    std::istringstream in{body};
    std::string line;
    while (std::getline(in, line)) {
      const auto arrow = line.find("->");
      if (arrow == std::string::npos) continue;
      const std::string lhs = strip_marker(line.substr(0, arrow));
      std::string rhs = line.substr(arrow + 2);
      std::optional<std::string> material;
      const auto colon = rhs.find(':');
      if (colon != std::string::npos) {
        material = trim(std::string_view(rhs).substr(colon + 1));
        rhs = rhs.substr(0, colon);
      }
      auto e = resolver.resolve(lhs, trim(rhs), material ? std::optional<std::string_view>(*material) : std::nullopt);
      if (e) {
        edges.insert(*e);
      } else {
        ++dropped;
      }
    }
  }
  return {{edges.begin(), edges.end()}, dropped};
}

std::string_view proposer_kind_name(ProposerKind kind) {
  switch (kind) {
    case ProposerKind::kHeuristic:
      return "heuristic";
    case ProposerKind::kMock:
      return "mock";
    case ProposerKind::kRemote:
      return "remote";
  }
  return "heuristic";
}

ProposerKind parse_proposer_kind(std::string_view name) {
  for (auto k : {ProposerKind::kHeuristic, ProposerKind::kMock, ProposerKind::kRemote}) {
    if (proposer_kind_name(k) == name) return k;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown proposer: " + std::string(name), std::string(name));
}

std::string_view rationale_mode_name(RationaleMode mode) {
  switch (mode) {
    case RationaleMode::kNone:
      return "none";
    case RationaleMode::kReasoning:
      return "reasoning";
    case RationaleMode::kKeyTopology:
      return "key_topology";
    case RationaleMode::kAll:
      return "all";
  }
  return "all";
}

RationaleMode parse_rationale_mode(std::string_view name) {
  for (auto m : {RationaleMode::kNone, RationaleMode::kReasoning, RationaleMode::kKeyTopology, RationaleMode::kAll}) {
    if (rationale_mode_name(m) == name) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown rationale mode: " + std::string(name), std::string(name));
}

void validate_synth_config(const SynthConfig& cfg) {
  if (cfg.max_repair_iters < 1) throw Error(ErrorCode::kInvalidArgument, "max_repair_iters must be >= 1");
}

std::string build_synthesis_prompt(const ContextBundle& ctx, RationaleMode mode, std::string_view rationale) {
  std::string p =
      "Connect the selected process units into a process flow diagram.\n"
      "Answer with one edge per line in the form: <from unit id> -> <to unit id> : <material id>\n"
      "Hard constraint: an edge a -> b may only carry a material that is an output of a and an input of b.\n"
      "\nUNITS\n";
  for (const auto& u : ctx.unit_schemas) p += render_unit_schema(u) + "\n";
  if ((mode == RationaleMode::kKeyTopology || mode == RationaleMode::kAll) && !ctx.exemplars.empty()) {
    p += "\nKEY TOPOLOGY\n";
    for (const auto& e : ctx.exemplars) p += e + "\n";
  }
  if ((mode == RationaleMode::kReasoning || mode == RationaleMode::kAll) && !trim(rationale).empty()) {
    p += "\nREASONING\n" + trim(rationale) + "\n";
  }
  return p;
}

std::pair<ProcessGraph, RepairTrace> synthesize(const UnitSelection& v, const KnowledgeBase& kb,
                                                const SynthConfig& cfg, TextGenerator* proposer,
                                                std::string_view rationale) {
  validate_synth_config(cfg);
  if (v.units.empty()) {
    RepairTrace trace;
    trace.converged = true;
    return {ProcessGraph{}, trace};
  }
  const ContextBundle ctx = retrieve_context(v, kb, cfg.context_n);
  ParsedProposal proposal;
  if (cfg.proposer == ProposerKind::kHeuristic) {
    proposal.edges = heuristic_proposer(v, kb, cfg.seed);
  } else {
    if (proposer == nullptr) {
      throw Error(ErrorCode::kInvalidArgument,
                  "proposer " + std::string(proposer_kind_name(cfg.proposer)) + " needs a generator");
    }
    GenerationRequest req;
    req.prompt = build_synthesis_prompt(ctx, cfg.rationale_mode, rationale);
    req.tags["stage"] = "synth";
    req.tags["seed"] = std::to_string(cfg.seed);
    proposal = parse_proposed_edges(proposer->generate(req), v, kb);
  }
  ProcessGraph g(nodes_for(v), std::move(proposal.edges));
  auto [out, trace] = repair_loop(g, kb, applicable_rules(g, kb), cfg.max_repair_iters);
  trace.proposal_dropped = proposal.dropped;
  return {std::move(out), std::move(trace)};
}

}  // namespace flowsynth
