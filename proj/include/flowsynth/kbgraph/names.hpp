#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "flowsynth/kbgraph/knowledge_base.hpp"

namespace flowsynth {

// Lowercase, trim, collapse internal whitespace runs to one space.
std::string normalize_name(std::string_view raw);

// Exact match on id or alias after normalize_name(). Throws
// Error(kUnresolvedName) whose subject is the normalized token.
std::string canonicalize_unit_name(std::string_view raw, const KnowledgeBase& kb);

enum class EntityKind { kUnit, kMaterial };

struct Mention {
  EntityKind kind;
  std::string id;
  std::size_t segment = 0;  // index into tokenize_segments(text)
  std::size_t token = 0;    // first token of the phrase within the segment
};

// Phrase lexicon over unit and material ids/aliases/display names. Text is
// split into segments at sentence punctuation, each segment into lowercase
// alphanumeric tokens ('_' and '-' separate tokens), and phrases are matched
// leftmost-longest on whole tokens. A phrase never spans a segment boundary,
// and "reformer" never matches inside "reformulated".
class MentionIndex {
 public:
  explicit MentionIndex(const KnowledgeBase& kb);

  std::vector<Mention> scan(std::string_view text) const;
  std::set<std::string> units_in(std::string_view text) const;
  std::set<std::string> materials_in(std::string_view text) const;

 private:
  struct Phrase {
    std::vector<std::string> tokens;
    Mention target;
  };
  std::vector<Phrase> phrases_;  // longest first
};

std::vector<std::vector<std::string>> tokenize_segments(std::string_view text);

// Space-joined token sequence of a name; two names with the same key are
// indistinguishable to MentionIndex.
std::string phrase_key(std::string_view raw);

}  // namespace flowsynth
