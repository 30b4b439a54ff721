#pragma once

#include <iosfwd>
#include <string>

#include "relx/config.hpp"
#include "relx/synth.hpp"

namespace relx {

// Pipeline subcommands. Each streams what it can, writes its artifacts under
// cfg.out, prints a one-line summary to `out`, and reports problems by
// throwing: DegenerateError for an unusable pipeline state (exit 1),
// Error for config/usage/IO trouble (exit 2).

// Harvests seeds into <out>/seeds.jsonl. With strict set, an empty seed set
// is an error instead of a warning.
void cmd_seed_extract(const PipelineConfig& cfg, bool strict, std::ostream& out,
                      std::ostream& err);

// Distantly annotates the corpus against a seed file into
// <out>/dataset.jsonl, one pass, constant memory in the corpus size.
void cmd_annotate(const PipelineConfig& cfg, const std::string& seeds_path,
                  bool strict, std::ostream& out, std::ostream& err);

// Trains one balanced-bagging ensemble per relation type on the dataset and
// writes the model files under <out>/model.
void cmd_train(const PipelineConfig& cfg, const std::string& dataset_path,
               std::ostream& out, std::ostream& err);

// Scores every instance of the dataset with the saved ensembles and writes
// probabilities plus the thresholded decision to predictions_path.
void cmd_predict(const PipelineConfig& cfg, const std::string& dataset_path,
                 const std::string& model_dir,
                 const std::string& predictions_path, std::ostream& out,
                 std::ostream& err);

// Evaluates one method ("model", "cooccurrence", or "spvm") against a gold
// dataset; writes <out>/report.json and <out>/report.txt and prints the
// table.
void cmd_evaluate(const PipelineConfig& cfg, const std::string& method,
                  const std::string& model_dir, const std::string& gold_path,
                  std::ostream& out, std::ostream& err);

// CoNLL-U + standoff entities -> interchange corpus file.
void cmd_convert(const std::string& conllu_path,
                 const std::string& entities_path,
                 const std::string& output_path, std::ostream& out,
                 std::ostream& err);

// Generates the synthetic benchmark under dir.
void cmd_synth(const SynthParams& params, const std::string& dir,
               std::ostream& out, std::ostream& err);

}  // namespace relx
