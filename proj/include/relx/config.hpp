#pragma once

#include <string>

#include "relx/corpus.hpp"
#include "relx/embed.hpp"
#include "relx/model.hpp"

namespace relx {

// Everything a pipeline command needs. Sources, weakest to strongest:
// built-in defaults, config file, RELX_* environment variables (paths only),
// command-line flags.
struct PipelineConfig {
  std::string corpus;
  std::string vectors;
  std::string out = "out";
  RelationSchema schema{"COMPOUND", "DISEASE", {"cause", "treat"}};
  double threshold = 0.4;    // verb-mapping similarity floor
  double p_threshold = 0.5;  // classification probability floor
  Hyper hyper;

  MappingConfig mapping() const { return {schema.relations, threshold}; }
  void validate() const;
};

// Strict JSON load: unknown keys are an error.
PipelineConfig load_config(const std::string& path);

// RELX_CORPUS, RELX_VECTORS, RELX_OUT override the corresponding paths when
// set and non-empty.
void apply_env(PipelineConfig& cfg);

}  // namespace relx
