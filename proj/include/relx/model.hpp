#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relx/corpus.hpp"
#include "relx/embed.hpp"
#include "relx/weaklabel.hpp"

namespace relx {

// Token-gap buckets between the two placeholders: 1, 2-3, 4-6, 7-10, >10.
// A gap of 0 (adjacent placeholders) falls into the first bucket.
inline constexpr int kGapBuckets = 5;

inline int feature_dim(int vector_dim) { return 3 * vector_dim + kGapBuckets + 1; }

using FeatureVector = std::vector<double>;

// Mean lemma embedding of the tokens left of the first placeholder, between
// the placeholders, and right of the second one (empty segment = zeros, OOV
// skipped), a gap-bucket one-hot, and a bias term.
FeatureVector featurize(const Instance& inst, const Sentence& s,
                        const VectorSpace& space, const RelationSchema& schema);

struct FeatureMatrix {
  std::size_t dim = 0;
  std::vector<double> data;

  std::size_t rows() const { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * dim, dim};
  }
  void append(std::span<const double> v) {
    data.insert(data.end(), v.begin(), v.end());
  }
};

// Row i holds the features of d.instances[i].
FeatureMatrix featurize_dataset(const WeakDataset& d, const Corpus& c,
                                const VectorSpace& space,
                                const RelationSchema& schema);

// All positives of one relation type plus an equal-size (capped) uniform
// sample of the rest (Null and foreign relations alike). Ids index into the
// dataset's instance list.
struct Bag {
  std::vector<std::uint32_t> positives;
  std::vector<std::uint32_t> negatives;
};

// n_bags bags for rtype; bag b draws its negatives from a generator seeded
// by (seed, b). Throws DegenerateError when either class is empty.
std::vector<Bag> make_bags(const WeakDataset& d, const RelationType& rtype,
                           int n_bags, std::uint64_t seed);

// Same sampling over explicit id pools (used with a held-out split).
std::vector<Bag> make_bags_from_pools(const std::vector<std::uint32_t>& pos_ids,
                                      const std::vector<std::uint32_t>& neg_ids,
                                      int n_bags, std::uint64_t seed);

struct Hyper {
  int epochs = 5;
  double learning_rate = 0.01;
  int batch_size = 128;
  int bags = 10;
  std::uint64_t seed = 1;

  void validate() const;  // all counts and the rate must be positive
};

struct LinearModel {
  RelationType rtype;
  std::vector<double> weights;
};

struct TrainLog {
  std::vector<double> train_loss;    // per epoch, as-run average
  std::vector<double> heldout_loss;  // per epoch; empty without a held-out set
  int best_epoch = -1;               // 1-based; -1 = final weights kept
};

// Row ids with their binary labels for one relation type.
struct LabeledRows {
  std::vector<std::uint32_t> ids;
  std::vector<char> y;
};

// Mean binary logistic loss over the rows; fills grad when non-null.
double logistic_loss(std::span<const double> w, const FeatureMatrix& X,
                     std::span<const std::uint32_t> rows,
                     std::span<const char> y, std::span<double> grad = {});

// Mini-batch SGD from zero weights over the bag, epoch shuffling seeded by
// member_seed. With a held-out set, keeps the epoch checkpoint with the best
// held-out loss; otherwise returns the final weights.
LinearModel train_member(const FeatureMatrix& X, const Bag& bag,
                         const RelationType& rtype, const Hyper& h,
                         std::uint64_t member_seed,
                         const LabeledRows* heldout = nullptr,
                         TrainLog* log = nullptr);

struct Ensemble {
  RelationType rtype;
  std::vector<LinearModel> members;
  Hyper hyper;
};

// Holds a seeded 10% of the dataset out for checkpoint selection, bags the
// rest, and trains h.bags members with seeds derived from (h.seed, i).
// Fully deterministic.
Ensemble train_ensemble(const WeakDataset& d, const FeatureMatrix& X,
                        const RelationType& rtype, const Hyper& h,
                        std::vector<TrainLog>* logs = nullptr);

// Arithmetic mean of the member sigmoid outputs.
double predict(const Ensemble& e, std::span<const double> features);
double predict(const Ensemble& e, const Instance& inst, const Sentence& s,
               const VectorSpace& space, const RelationSchema& schema);

// Argmax relation if its probability reaches p_threshold (inclusive), else
// Null. Ties keep the earlier ensemble.
std::optional<RelationType> classify(std::span<const Ensemble> ensembles,
                                     std::span<const double> features,
                                     double p_threshold = 0.5);

// One manifest plus one file per member under dir, named
// "<rtype>.json" / "<rtype>.memberNN.json" / "<rtype>.heldout.log".
void save_ensemble(const Ensemble& e, const std::vector<TrainLog>& logs,
                   const std::string& dir);
Ensemble load_ensemble(const std::string& dir, const RelationType& rtype);

}  // namespace relx
