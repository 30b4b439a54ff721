#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relx/corpus.hpp"
#include "relx/embed.hpp"
#include "relx/pathex.hpp"

namespace relx {

enum class Source { seed, distant, negative, gold };

std::string to_string(Source s);
Source source_from_string(const std::string& s);

// One labeled training/evaluation unit: a masked sentence for one entity
// pair. label absent = Null class.
struct Instance {
  std::string iid;
  std::string sid;
  PairKey key;
  std::string masked_text;
  std::optional<RelationType> label;
  Source source = Source::negative;

  bool operator==(const Instance&) const = default;
};

struct WeakDataset {
  std::vector<Instance> instances;
  std::map<std::string, std::int64_t> class_counts;  // includes "Null"

  void recount();
  bool operator==(const WeakDataset&) const = default;
};

// All typed mention pairs of the sentence matching the schema, each once,
// oriented so the first element fills schema slot 1. Pairs whose canonical
// strings coincide (self-relations) are skipped.
std::vector<std::pair<EntityMention, EntityMention>> candidate_pairs(
    const Sentence& s, const RelationSchema& schema);

// Stable instance id: hash of (sid, key), so identity survives re-runs.
std::string instance_id(const std::string& sid, const PairKey& key);

// Locates the mention pair of the sentence whose pair key equals `key`.
std::optional<std::pair<EntityMention, EntityMention>> find_pair(
    const Sentence& s, const PairKey& key, const RelationSchema& schema);

// Pair-level label: the relation type with the most seeds for the key;
// count ties break on highest max similarity, then on schema order.
std::optional<RelationType> resolve_pair_label(const SeedSet& seeds,
                                               const PairKey& key,
                                               const RelationSchema& schema);

// Labels every candidate pair in every sentence: the resolved pair label
// when the key is seeded (source=distant), otherwise Null (source=negative).
WeakDataset annotate(const Corpus& c, const SeedSet& seeds,
                     const RelationSchema& schema);

// Streaming single-sentence step of annotate; shared by the CLI so large
// corpora never have to be resident. Repeated (sid, key) pairs within one
// sentence are emitted once.
std::vector<Instance> annotate_sentence(const Sentence& s, const SeedSet& seeds,
                                        const RelationSchema& schema);

void export_dataset(const WeakDataset& d, const std::string& path);
WeakDataset import_dataset(const std::string& path);

std::string instance_record(const Instance& inst);
Instance parse_instance_record(const std::string& line, std::size_t line_no);

// Enforces that the masked text contains each type placeholder exactly as
// often as the key requires (once each for distinct types).
void validate_instance(const Instance& inst);

}  // namespace relx
