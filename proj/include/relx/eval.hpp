#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relx/corpus.hpp"
#include "relx/embed.hpp"
#include "relx/weaklabel.hpp"

namespace relx {

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const Metrics&) const = default;
};

// Zero-denominator convention: precision and recall fall back to 0, and so
// does F1 when precision + recall is 0.
Metrics prf1(std::int64_t tp, std::int64_t fp, std::int64_t fn);

struct Prediction {
  std::string iid;
  std::optional<RelationType> label;     // hard decision; absent = Null
  std::map<RelationType, double> probs;  // empty for rule-based methods

  bool operator==(const Prediction&) const = default;
};

using Predictions = std::vector<Prediction>;

void write_predictions(const Predictions& preds, const std::string& path);
Predictions load_predictions(const std::string& path);

// Per-relation scores against the gold labels. A prediction is positive for
// a relation when its probability for it reaches p_threshold, or, without
// probabilities, when its hard label matches. Prediction and gold ids must
// align exactly; any mismatch is an error naming the offending ids.
std::map<RelationType, Metrics> score(const WeakDataset& gold,
                                      const Predictions& preds,
                                      const std::vector<RelationType>& relations,
                                      double p_threshold = 0.5);

// Announces every pair as standing in every relation, the classic
// recall-one baseline.
Predictions cooccurrence_baseline(const WeakDataset& gold,
                                  const std::vector<RelationType>& relations);

// The seed extractor run directly as a classifier: shortest path plus verb
// mapping, no learned model. Throws when gold instances reference sentences
// or pairs absent from the corpus, listing the unresolvable ids.
Predictions spvm_baseline(const WeakDataset& gold, const Corpus& c,
                          const RelationSchema& schema,
                          const MappingConfig& cfg, const VectorSpace& space);

struct MetricsSummary {
  Metrics mean;
  Metrics variance;  // population variance over the runs
  int runs = 0;
};

std::map<RelationType, MetricsSummary> summarize_runs(
    const std::vector<std::map<RelationType, Metrics>>& runs);

struct ReportRow {
  std::string method;
  RelationType rtype;
  Metrics mean;
  Metrics variance;
  int runs = 1;
};

// Aligned text table (percentages, one decimal).
std::string report_table(const std::vector<ReportRow>& rows);

// Machine-readable report: raw fractions plus free-form context entries
// (input digests, thresholds, seeds).
std::string report_json(const std::vector<ReportRow>& rows,
                        const std::map<std::string, std::string>& context);

// FNV-1a over the raw bytes of the file, as 16 hex digits.
std::string file_digest(const std::string& path);

}  // namespace relx
