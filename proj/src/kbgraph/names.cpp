#include "flowsynth/kbgraph/names.hpp"

#include <algorithm>
#include <cctype>

#include "flowsynth/errors.hpp"

namespace flowsynth {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }
bool is_token_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool is_segment_break(char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case '(': case ')': case '[': case ']': case '{': case '}':
    case '"': case '\n': case '\r': case '<': case '>':
      return true;
    default:
      return false;
  }
}

std::vector<std::string> tokens_of(std::string_view raw) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : raw) {
    if (is_token_char(c)) {
      cur.push_back(lower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

std::string normalize_name(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(lower(c));
  }
  return out;
}

std::string canonicalize_unit_name(std::string_view raw, const KnowledgeBase& kb) {
  const std::string token = normalize_name(raw);
  for (const auto& u : kb.units()) {
    if (normalize_name(u.id) == token) return u.id;
  }
  for (const auto& u : kb.units()) {
    for (const auto& a : u.aliases) {
      if (normalize_name(a) == token) return u.id;
    }
  }
  throw Error(ErrorCode::kUnresolvedName, "unresolved unit name \"" + token + "\"", token);
}

std::vector<std::vector<std::string>> tokenize_segments(std::string_view text) {
  std::vector<std::vector<std::string>> segments;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || is_segment_break(text[i])) {
      auto toks = tokens_of(text.substr(start, i - start));
      if (!toks.empty()) segments.push_back(std::move(toks));
      start = i + 1;
    }
  }
  return segments;
}

MentionIndex::MentionIndex(const KnowledgeBase& kb) {
  std::set<std::vector<std::string>> seen;
  auto add = [&](std::string_view name, EntityKind kind, const std::string& id) {
    auto toks = tokens_of(name);
    if (toks.empty() || !seen.insert(toks).second) return;
    phrases_.push_back({std::move(toks), {kind, id}});
  };
  for (const auto& u : kb.units()) {
    add(u.id, EntityKind::kUnit, u.id);
    for (const auto& a : u.aliases) add(a, EntityKind::kUnit, u.id);
    add(u.display_name, EntityKind::kUnit, u.id);
  }
  for (const auto& m : kb.materials()) {
    add(m.id, EntityKind::kMaterial, m.id);
    for (const auto& a : m.aliases) add(a, EntityKind::kMaterial, m.id);
  }
  std::stable_sort(phrases_.begin(), phrases_.end(),
                   [](const Phrase& a, const Phrase& b) { return a.tokens.size() > b.tokens.size(); });
}

std::vector<Mention> MentionIndex::scan(std::string_view text) const {
  std::vector<Mention> found;
  const auto segments = tokenize_segments(text);
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto& seg = segments[s];
    std::size_t i = 0;
    while (i < seg.size()) {
      const Phrase* hit = nullptr;
      for (const auto& p : phrases_) {
        if (p.tokens.size() > seg.size() - i) continue;
        if (std::equal(p.tokens.begin(), p.tokens.end(), seg.begin() + static_cast<std::ptrdiff_t>(i))) {
          hit = &p;
          break;
        }
      }
      if (hit != nullptr) {
        found.push_back(hit->target);
        found.back().segment = s;
        found.back().token = i;
        i += hit->tokens.size();
      } else {
        ++i;
      }
    }
  }
  return found;
}

std::set<std::string> MentionIndex::units_in(std::string_view text) const {
  std::set<std::string> out;
  for (const auto& m : scan(text)) {
    if (m.kind == EntityKind::kUnit) out.insert(m.id);
  }
  return out;
}

std::set<std::string> MentionIndex::materials_in(std::string_view text) const {
  std::set<std::string> out;
  for (const auto& m : scan(text)) {
    if (m.kind == EntityKind::kMaterial) out.insert(m.id);
  }
  return out;
}

std::string phrase_key(std::string_view raw) {
  std::string key;
  for (const auto& t : tokens_of(raw)) {
    if (!key.empty()) key.push_back(' ');
    key += t;
  }
  return key;
}

}  // namespace flowsynth
