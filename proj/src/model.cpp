#include "relx/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <unordered_map>

#include <json.hpp>

#include "relx/error.hpp"
#include "relx/rng.hpp"

namespace relx {

using json = nlohmann::json;

namespace {

int gap_bucket(int gap) {
  if (gap <= 1) return 0;
  if (gap <= 3) return 1;
  if (gap <= 6) return 2;
  if (gap <= 10) return 3;
  return 4;
}

double dot(std::span<const double> w, std::span<const double> x) {
  double z = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * x[i];
  return z;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow for large |z|.
double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

// Mean lemma vector of tokens [from, to] (1-based, inclusive) appended to
// out. Out-of-vocabulary lemmas are skipped; an empty or fully unknown
// segment contributes zeros.
void append_segment_mean(const Sentence& s, int from, int to,
                         const VectorSpace& space, FeatureVector& out) {
  std::vector<double> sum(space.dim, 0.0);
  int hits = 0;
  for (int i = from; i <= to; ++i) {
    if (const auto* v = space.find(s.token(i).lemma)) {
      for (int d = 0; d < space.dim; ++d) sum[d] += (*v)[d];
      ++hits;
    }
  }
  if (hits > 0) {
    for (double& x : sum) x /= hits;
  }
  out.insert(out.end(), sum.begin(), sum.end());
}

}  // namespace

FeatureVector featurize(const Instance& inst, const Sentence& s,
                        const VectorSpace& space, const RelationSchema& schema) {
  auto pair = find_pair(s, inst.key, schema);
  if (!pair) {
    throw Error("instance " + inst.iid + ": pair " + to_string(inst.key) +
                " not found in sentence " + s.sid);
  }
  const EntityMention* first = &pair->first;
  const EntityMention* second = &pair->second;
  if (second->start < first->start) std::swap(first, second);

  FeatureVector out;
  out.reserve(feature_dim(space.dim));
  append_segment_mean(s, 1, first->start - 1, space, out);
  append_segment_mean(s, first->end + 1, second->start - 1, space, out);
  append_segment_mean(s, second->end + 1, s.size(), space, out);

  const int gap = std::max(0, second->start - first->end - 1);
  for (int b = 0; b < kGapBuckets; ++b) {
    out.push_back(b == gap_bucket(gap) ? 1.0 : 0.0);
  }
  out.push_back(1.0);  // bias
  return out;
}

FeatureMatrix featurize_dataset(const WeakDataset& d, const Corpus& c,
                                const VectorSpace& space,
                                const RelationSchema& schema) {
  std::unordered_map<std::string, const Sentence*> by_sid;
  by_sid.reserve(c.sentences.size());
  for (const Sentence& s : c.sentences) by_sid.emplace(s.sid, &s);

  FeatureMatrix X;
  X.dim = static_cast<std::size_t>(feature_dim(space.dim));
  X.data.reserve(X.dim * d.instances.size());
  for (const Instance& inst : d.instances) {
    auto it = by_sid.find(inst.sid);
    if (it == by_sid.end()) {
      throw Error("instance " + inst.iid + ": unknown sentence " + inst.sid);
    }
    X.append(featurize(inst, *it->second, space, schema));
  }
  return X;
}

double logistic_loss(std::span<const double> w, const FeatureMatrix& X,
                     std::span<const std::uint32_t> rows,
                     std::span<const char> y, std::span<double> grad) {
  if (rows.size() != y.size()) throw Error("logistic_loss: rows/labels mismatch");
  if (!grad.empty() && grad.size() != w.size()) {
    throw Error("logistic_loss: gradient size mismatch");
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  if (rows.empty()) return 0.0;

  double loss = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto x = X.row(rows[k]);
    const double z = dot(w, x);
    const double yk = static_cast<double>(y[k]);
    loss += softplus(z) - yk * z;
    if (!grad.empty()) {
      const double r = sigmoid(z) - yk;
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += r * x[i];
    }
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (double& g : grad) g *= inv;
  return loss * inv;
}

std::vector<Bag> make_bags_from_pools(const std::vector<std::uint32_t>& pos_ids,
                                      const std::vector<std::uint32_t>& neg_ids,
                                      int n_bags, std::uint64_t seed) {
  if (pos_ids.empty()) {
    throw DegenerateError("degenerate class distribution: no positive instances");
  }
  if (neg_ids.empty()) {
    throw DegenerateError("degenerate class distribution: no negative instances");
  }
  if (n_bags <= 0) throw Error("bag count must be positive");

  const std::size_t k = std::min(pos_ids.size(), neg_ids.size());
  std::vector<Bag> bags;
  bags.reserve(n_bags);
  for (int b = 0; b < n_bags; ++b) {
    Rng rng(derive_seed(seed, "bag", b));
    Bag bag;
    bag.positives = pos_ids;
    // Sorted sample positions through a sorted pool stay sorted.
    for (std::uint32_t i : sample_without_replacement(neg_ids.size(), k, rng)) {
      bag.negatives.push_back(neg_ids[i]);
    }
    bags.push_back(std::move(bag));
  }
  return bags;
}

std::vector<Bag> make_bags(const WeakDataset& d, const RelationType& rtype,
                           int n_bags, std::uint64_t seed) {
  std::vector<std::uint32_t> pos_ids;
  std::vector<std::uint32_t> neg_ids;
  for (std::size_t i = 0; i < d.instances.size(); ++i) {
    const auto& label = d.instances[i].label;
    if (label && *label == rtype) {
      pos_ids.push_back(static_cast<std::uint32_t>(i));
    } else {
      // One-vs-rest: Null and foreign relations are both negative.
      neg_ids.push_back(static_cast<std::uint32_t>(i));
    }
  }
  if (pos_ids.empty()) {
    throw DegenerateError("degenerate class distribution for " + rtype +
                          ": no positive instances");
  }
  if (neg_ids.empty()) {
    throw DegenerateError("degenerate class distribution for " + rtype +
                          ": no negative instances");
  }
  return make_bags_from_pools(pos_ids, neg_ids, n_bags, seed);
}

void Hyper::validate() const {
  if (epochs <= 0) throw Error("epochs must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error("learning rate must be positive and finite");
  }
  if (batch_size <= 0) throw Error("batch size must be positive");
  if (bags <= 0) throw Error("bag count must be positive");
}

LinearModel train_member(const FeatureMatrix& X, const Bag& bag,
                         const RelationType& rtype, const Hyper& h,
                         std::uint64_t member_seed, const LabeledRows* heldout,
                         TrainLog* log) {
  h.validate();
  if (bag.positives.empty() || bag.negatives.empty()) {
    throw DegenerateError("degenerate class distribution in bag for " + rtype);
  }

  std::vector<std::uint32_t> rows = bag.positives;
  rows.insert(rows.end(), bag.negatives.begin(), bag.negatives.end());
  std::vector<char> y(bag.positives.size(), 1);
  y.resize(rows.size(), 0);

  const std::size_t n = rows.size();
  std::vector<std::uint32_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);

  std::vector<double> w(X.dim, 0.0);
  std::vector<double> grad(X.dim, 0.0);
  std::vector<std::uint32_t> batch_rows;
  std::vector<char> batch_y;

  std::vector<double> best_w;
  double best_heldout = std::numeric_limits<double>::infinity();
  int best_epoch = -1;

  for (int epoch = 1; epoch <= h.epochs; ++epoch) {
    Rng rng(derive_seed(member_seed, "shuffle", epoch));
    rng.shuffle(order);

    double epoch_loss = 0.0;
    for (std::size_t at = 0; at < n; at += h.batch_size) {
      const std::size_t stop = std::min(n, at + h.batch_size);
      batch_rows.clear();
      batch_y.clear();
      for (std::size_t i = at; i < stop; ++i) {
        batch_rows.push_back(rows[order[i]]);
        batch_y.push_back(y[order[i]]);
      }
      const double loss = logistic_loss(w, X, batch_rows, batch_y, grad);
      epoch_loss += loss * static_cast<double>(batch_rows.size());
      for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] -= h.learning_rate * grad[i];
      }
    }
    epoch_loss /= static_cast<double>(n);
    if (!std::isfinite(epoch_loss)) {
      throw Error("training diverged for " + rtype + " at epoch " +
                  std::to_string(epoch));
    }
    if (log) log->train_loss.push_back(epoch_loss);

    if (heldout && !heldout->ids.empty()) {
      const double hl = logistic_loss(w, X, heldout->ids, heldout->y);
      if (!std::isfinite(hl)) {
        throw Error("training diverged for " + rtype + " at epoch " +
                    std::to_string(epoch));
      }
      if (log) log->heldout_loss.push_back(hl);
      if (hl < best_heldout) {
        best_heldout = hl;
        best_w = w;
        best_epoch = epoch;
      }
    }
  }

  if (best_epoch > 0) w = std::move(best_w);
  if (log) log->best_epoch = best_epoch;
  return LinearModel{rtype, std::move(w)};
}

Ensemble train_ensemble(const WeakDataset& d, const FeatureMatrix& X,
                        const RelationType& rtype, const Hyper& h,
                        std::vector<TrainLog>* logs) {
  h.validate();
  if (X.rows() != d.instances.size()) {
    throw Error("feature matrix does not match dataset (" +
                std::to_string(X.rows()) + " rows vs " +
                std::to_string(d.instances.size()) + " instances)");
  }

  std::vector<std::uint32_t> pos_ids;
  std::vector<std::uint32_t> neg_ids;
  for (std::size_t i = 0; i < d.instances.size(); ++i) {
    const auto& label = d.instances[i].label;
    if (label && *label == rtype) {
      pos_ids.push_back(static_cast<std::uint32_t>(i));
    } else {
      neg_ids.push_back(static_cast<std::uint32_t>(i));
    }
  }
  if (pos_ids.empty()) {
    throw DegenerateError("degenerate class distribution for " + rtype +
                          ": no positive instances");
  }
  if (neg_ids.empty()) {
    throw DegenerateError("degenerate class distribution for " + rtype +
                          ": no negative instances");
  }

  // Stratified 90/10 split so neither class can vanish from the training
  // pool; the held-out rows pick each member's best epoch.
  Rng split_rng(derive_seed(h.seed, "holdout"));
  LabeledRows heldout;
  std::vector<std::uint32_t> train_pos;
  std::vector<std::uint32_t> train_neg;
  auto split = [&](std::vector<std::uint32_t>& pool, char label,
                   std::vector<std::uint32_t>& train_out) {
    split_rng.shuffle(pool);
    const std::size_t held = pool.size() / 10;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (i < held) {
        heldout.ids.push_back(pool[i]);
        heldout.y.push_back(label);
      } else {
        train_out.push_back(pool[i]);
      }
    }
    std::sort(train_out.begin(), train_out.end());
  };
  split(pos_ids, 1, train_pos);
  split(neg_ids, 0, train_neg);

  const auto bags = make_bags_from_pools(train_pos, train_neg, h.bags,
                                         derive_seed(h.seed, "bags:" + rtype));

  Ensemble e;
  e.rtype = rtype;
  e.hyper = h;
  for (int i = 0; i < h.bags; ++i) {
    TrainLog lg;
    const std::uint64_t member_seed = derive_seed(h.seed, "member:" + rtype, i);
    e.members.push_back(train_member(X, bags[i], rtype, h, member_seed,
                                     heldout.ids.empty() ? nullptr : &heldout,
                                     &lg));
    if (logs) logs->push_back(std::move(lg));
  }
  return e;
}

double predict(const Ensemble& e, std::span<const double> features) {
  if (e.members.empty()) throw Error("ensemble " + e.rtype + " has no members");
  double sum = 0.0;
  for (const LinearModel& m : e.members) {
    if (m.weights.size() != features.size()) {
      throw Error("ensemble " + e.rtype + ": feature size mismatch");
    }
    sum += sigmoid(dot(m.weights, features));
  }
  return sum / static_cast<double>(e.members.size());
}

double predict(const Ensemble& e, const Instance& inst, const Sentence& s,
               const VectorSpace& space, const RelationSchema& schema) {
  const FeatureVector x = featurize(inst, s, space, schema);
  return predict(e, x);
}

std::optional<RelationType> classify(std::span<const Ensemble> ensembles,
                                     std::span<const double> features,
                                     double p_threshold) {
  std::optional<RelationType> best;
  double best_p = -1.0;
  for (const Ensemble& e : ensembles) {
    const double p = predict(e, features);
    if (p > best_p) {
      best_p = p;
      best = e.rtype;
    }
  }
  if (best && best_p >= p_threshold) return best;
  return std::nullopt;
}

namespace {

std::string member_file_name(const RelationType& rtype, int i) {
  char num[8];
  std::snprintf(num, sizeof num, "%02d", i);
  return rtype + ".member" + num + ".json";
}

json hyper_to_json(const Hyper& h) {
  return json{{"epochs", h.epochs},
              {"learning_rate", h.learning_rate},
              {"batch_size", h.batch_size},
              {"bags", h.bags},
              {"seed", h.seed}};
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
  if (!out) throw Error("cannot write " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace

void save_ensemble(const Ensemble& e, const std::vector<TrainLog>& logs,
                   const std::string& dir) {
  if (e.members.empty()) throw Error("ensemble " + e.rtype + " has no members");
  std::filesystem::create_directories(dir);

  std::vector<std::string> member_files;
  for (std::size_t i = 0; i < e.members.size(); ++i) {
    const std::string name = member_file_name(e.rtype, static_cast<int>(i));
    json j{{"rtype", e.rtype},
           {"member_seed", derive_seed(e.hyper.seed, "member:" + e.rtype, i)},
           {"best_epoch", i < logs.size() ? logs[i].best_epoch : -1},
           {"weights", e.members[i].weights}};
    write_text_file(dir + "/" + name, j.dump(2) + "\n");
    member_files.push_back(name);
  }

  // A full-scale run fine-tunes an external pretrained encoder with these
  // settings instead of the linear members; recorded so the two model kinds
  // stay interchangeable downstream.
  json manifest{{"rtype", e.rtype},
                {"hyper", hyper_to_json(e.hyper)},
                {"members", member_files},
                {"external_finetune",
                 {{"epochs_max", 5},
                  {"learning_rate", 5e-05},
                  {"batch_size", 128}}}};
  write_text_file(dir + "/" + e.rtype + ".json", manifest.dump(2) + "\n");

  std::string log_text;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const TrainLog& lg = logs[i];
    for (std::size_t ep = 0; ep < lg.train_loss.size(); ++ep) {
      char line[160];
      if (ep < lg.heldout_loss.size()) {
        std::snprintf(line, sizeof line,
                      "member %02zu epoch %zu train %.6f heldout %.6f\n", i,
                      ep + 1, lg.train_loss[ep], lg.heldout_loss[ep]);
      } else {
        std::snprintf(line, sizeof line, "member %02zu epoch %zu train %.6f\n",
                      i, ep + 1, lg.train_loss[ep]);
      }
      log_text += line;
    }
    char line[64];
    std::snprintf(line, sizeof line, "member %02zu best_epoch %d\n", i,
                  lg.best_epoch);
    log_text += line;
  }
  write_text_file(dir + "/" + e.rtype + ".heldout.log", log_text);
}

Ensemble load_ensemble(const std::string& dir, const RelationType& rtype) {
  const std::string manifest_path = dir + "/" + rtype + ".json";
  const json manifest = read_json_file(manifest_path);

  Ensemble e;
  try {
    e.rtype = manifest.at("rtype").get<std::string>();
    const json& h = manifest.at("hyper");
    e.hyper.epochs = h.at("epochs").get<int>();
    e.hyper.learning_rate = h.at("learning_rate").get<double>();
    e.hyper.batch_size = h.at("batch_size").get<int>();
    e.hyper.bags = h.at("bags").get<int>();
    e.hyper.seed = h.at("seed").get<std::uint64_t>();

    for (const json& name : manifest.at("members")) {
      const json member = read_json_file(dir + "/" + name.get<std::string>());
      LinearModel m;
      m.rtype = member.at("rtype").get<std::string>();
      m.weights = member.at("weights").get<std::vector<double>>();
      e.members.push_back(std::move(m));
    }
  } catch (const json::exception& ex) {
    throw Error(manifest_path + ": " + ex.what());
  }

  if (e.rtype != rtype) {
    throw Error(manifest_path + ": manifest is for " + e.rtype);
  }
  if (e.members.empty()) throw Error(manifest_path + ": no members listed");
  const std::size_t dim = e.members.front().weights.size();
  for (const LinearModel& m : e.members) {
    if (m.weights.size() != dim || m.rtype != e.rtype) {
      throw Error(manifest_path + ": inconsistent member files");
    }
  }
  return e;
}

}  // namespace relx
