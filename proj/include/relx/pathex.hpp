#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relx/corpus.hpp"
#include "relx/embed.hpp"

namespace relx {

// Token indices from one entity head to the other, consecutive elements
// linked by a head/dependent edge.
struct DepPath {
  std::vector<int> token_indices;

  bool operator==(const DepPath&) const = default;
};

// High-precision (pair, relation) evidence extracted from one sentence.
struct SeedRelation {
  PairKey key;
  RelationType rtype;
  double similarity = 0.0;
  std::vector<std::string> verbs;
  std::string sid;

  bool operator==(const SeedRelation&) const = default;
};

struct SeedSet {
  std::vector<SeedRelation> seeds;
  std::map<PairKey, std::vector<std::size_t>> index;  // key -> seed positions

  void add(SeedRelation seed);
  std::size_t size() const { return seeds.size(); }
};

// Span root: the unique span token whose head lies outside the span (the
// root counts as outside). Leftmost wins when annotation is non-projective;
// falls back to the span start for malformed spans.
int entity_head(const Sentence& s, const EntityMention& m);

// BFS over the undirected head-link tree; unique and minimal on well-formed
// trees. Throws when i == j or the structure is disconnected.
DepPath shortest_path(const Sentence& s, int i, int j);

// Lemmas of VERB/AUX tokens strictly between the path endpoints, in sentence
// order. The endpoints are entity heads and never count as relation evidence.
std::vector<std::string> path_verbs(const Sentence& s, const DepPath& p);

// entity_head + shortest_path + path_verbs + map_verb composed: a seed is
// produced when the path carries at least one verb and the joint verb phrase
// maps at or above the threshold.
std::optional<SeedRelation> extract_seed(const Sentence& s,
                                         const EntityMention& a,
                                         const EntityMention& b,
                                         const RelationSchema& schema,
                                         const MappingConfig& cfg,
                                         const VectorSpace& space);

// extract_seed over every typed candidate pair of every sentence.
SeedSet harvest_seeds(const Corpus& c, const RelationSchema& schema,
                      const MappingConfig& cfg, const VectorSpace& space);

void write_seeds(const SeedSet& seeds, const std::string& path);
SeedSet load_seeds(const std::string& path);

}  // namespace relx
