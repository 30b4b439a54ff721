#pragma once

#include <compare>
#include <functional>
#include <string>
#include <vector>

namespace relx {

// One token of a dependency-parsed sentence. Indices are 1-based; head 0
// marks the root.
struct Token {
  int index = 0;
  std::string form;
  std::string lemma;
  std::string upos;
  int head = 0;
  std::string deprel;

  bool operator==(const Token&) const = default;
};

// Inclusive token span carrying an entity type and an optional canonical id.
struct EntityMention {
  int start = 0;
  int end = 0;
  std::string etype;
  std::string cid;  // empty = none

  bool operator==(const EntityMention&) const = default;
};

struct Sentence {
  std::string sid;
  std::vector<Token> tokens;
  std::vector<EntityMention> entities;

  bool operator==(const Sentence&) const = default;

  // 1-based access.
  const Token& token(int index) const { return tokens.at(index - 1); }
  int size() const { return static_cast<int>(tokens.size()); }
};

struct Corpus {
  std::vector<Sentence> sentences;

  bool operator==(const Corpus&) const = default;
};

// Typed pair plus the ordered relation-type names. The (atype, btype) order
// fixes slot assignment for pair keys (e.g. COMPOUND before DISEASE).
struct RelationSchema {
  std::string atype;
  std::string btype;
  std::vector<std::string> relations;
};

// Canonical identity of an entity pair, used as the distant-supervision key.
struct PairKey {
  std::string a;
  std::string b;
  std::string atype;
  std::string btype;

  auto operator<=>(const PairKey&) const = default;
};

// "a|b|atype|btype", for log lines and error messages.
std::string to_string(const PairKey& key);

// Parses one interchange record. line_no is used in error messages only.
Sentence parse_sentence_record(const std::string& line, std::size_t line_no);

// Compact canonical one-line form of a sentence (what write_corpus emits).
std::string sentence_record(const Sentence& s);

// Checks the tree structure and entity-span invariants; throws Error naming
// the sentence id on violation.
void validate_sentence(const Sentence& s);

// Loads a whole corpus file (one record per line), validating every sentence
// and rejecting duplicate sentence ids.
Corpus load_corpus(const std::string& path);

void write_corpus(const Corpus& c, const std::string& path);

// Streams a corpus file without materializing it; the callback sees each
// validated sentence once, in file order.
void for_each_sentence(const std::string& path,
                       const std::function<void(Sentence&&)>& fn);

// cid when present, else the case-folded space-joined lemmas of the span.
std::string canonical_entity(const Sentence& s, const EntityMention& m);

// Masks the two candidate mentions with their entity-type strings; all other
// tokens (including other entities) keep their surface forms.
std::string mask_sentence(const Sentence& s, const EntityMention& a,
                          const EntityMention& b);

// Deterministic key for the pair. The mention whose type fills schema slot 1
// goes first regardless of argument or surface order; for same-type schemas
// the lexicographically smaller canonical string goes first.
PairKey pair_key(const Sentence& s, const EntityMention& a,
                 const EntityMention& b, const RelationSchema& schema);

}  // namespace relx
