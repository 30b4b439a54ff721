#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "relx/corpus.hpp"
#include "relx/embed.hpp"
#include "relx/weaklabel.hpp"

namespace relx {

// Synthetic compound/disease benchmark. Ground truth lives at the pair
// level; sentences either express their pair's relation explicitly (a
// mapping verb on the dependency path), implicitly (signal nouns only), or
// not at all. A small set of trap pairs is unrelated yet sometimes rendered
// with an explicit verb, which bounds seed precision away from 1.
struct SynthParams {
  std::uint64_t seed = 1;
  std::size_t sentences = 5000;
  int cause_pairs = 40;
  int treat_pairs = 40;
  int null_pairs = 200;
  int reserve_entities = 20;     // distractor-only entities, never related
  double relation_prob = 0.3;    // sentence draws a related pair
  double explicit_prob = 0.35;   // related sentence uses a mapping verb
  double trap_verb_prob = 0.25;  // trap sentence fires its misleading verb
  double distractor_prob = 0.15; // null sentence gains a third entity
  int trap_every = 25;           // every k-th null pair is a trap
  int eval_stride = 5;           // sentence i goes to eval when i % k == k-1

  void validate() const;
};

// COMPOUND/DISEASE with relations {cause, treat}, in that order.
RelationSchema synth_schema();
MappingConfig synth_mapping();

// The benchmark vector space: relation-name anchors, mapping verbs, decoy
// verbs below the mapping threshold, signal nouns, and filler vocabulary,
// with seeded jitter. Fails loudly if jitter ever pushes a word across the
// wrong side of the mapping threshold.
std::vector<std::pair<std::string, std::vector<double>>> synth_vectors(
    std::uint64_t seed);

struct SynthStats {
  std::size_t train_sentences = 0;
  std::size_t eval_sentences = 0;
  std::size_t explicit_sentences = 0;  // both splits, traps excluded
  std::size_t trap_sentences = 0;      // rendered with the misleading verb
  std::size_t gold_train_instances = 0;
  std::size_t gold_eval_instances = 0;
  std::map<std::string, std::int64_t> train_class_counts;
  std::map<std::string, std::int64_t> eval_class_counts;
  int trap_pairs = 0;
};

// Streaming generation; the sinks see every sentence and gold instance once,
// in order. The bool argument marks the eval split.
struct SynthSink {
  std::function<void(const Sentence&, bool)> sentence;
  std::function<void(const Instance&, bool)> gold;
};

SynthStats generate(const SynthParams& p, const SynthSink& sink);

// In-memory convenience for small runs.
struct SynthBundle {
  Corpus train;
  Corpus eval;
  WeakDataset gold_train;
  WeakDataset gold_eval;
  SynthStats stats;
};

SynthBundle generate(const SynthParams& p);

// Writes corpus_train.jsonl, corpus_eval.jsonl, gold_train.jsonl,
// gold_eval.jsonl, vectors.txt, and synth_summary.json under dir.
SynthStats write_synth(const SynthParams& p, const std::string& dir);

}  // namespace relx
