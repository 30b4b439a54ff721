#include "relx/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "relx/convert.hpp"
#include "relx/error.hpp"
#include "relx/eval.hpp"
#include "relx/model.hpp"
#include "relx/pathex.hpp"

namespace relx {

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir + ": " + ec.message());
}

void need_path(const std::string& value, const char* what) {
  if (value.empty()) {
    throw Error(std::string("no ") + what +
                " configured (flag, config file, or environment)");
  }
}

std::string class_summary(const std::vector<RelationType>& relations,
                          const std::map<std::string, std::int64_t>& counts) {
  std::string s;
  for (const RelationType& r : relations) {
    if (!s.empty()) s += ", ";
    auto it = counts.find(r);
    s += r + ": " + std::to_string(it == counts.end() ? 0 : it->second);
  }
  return s;
}

// One corpus pass filling a row per instance; instances must resolve to a
// sentence. Duplicate sids keep the first occurrence.
FeatureMatrix featurize_streaming(const WeakDataset& d,
                                  const std::string& corpus_path,
                                  const VectorSpace& space,
                                  const RelationSchema& schema) {
  FeatureMatrix X;
  X.dim = static_cast<std::size_t>(feature_dim(space.dim));
  X.data.assign(X.dim * d.instances.size(), 0.0);

  std::unordered_map<std::string, std::vector<std::uint32_t>> by_sid;
  for (std::size_t i = 0; i < d.instances.size(); ++i) {
    by_sid[d.instances[i].sid].push_back(static_cast<std::uint32_t>(i));
  }

  std::vector<char> done(d.instances.size(), 0);
  for_each_sentence(corpus_path, [&](Sentence&& s) {
    auto it = by_sid.find(s.sid);
    if (it == by_sid.end()) return;
    for (std::uint32_t idx : it->second) {
      const FeatureVector row = featurize(d.instances[idx], s, space, schema);
      std::copy(row.begin(), row.end(), X.data.begin() + idx * X.dim);
      done[idx] = 1;
    }
    by_sid.erase(it);
  });

  std::vector<std::string> missing;
  for (std::size_t i = 0; i < done.size(); ++i) {
    if (!done[i]) missing.push_back(d.instances[i].iid);
  }
  if (!missing.empty()) {
    std::string msg = "instances reference sentences missing from " +
                      corpus_path + ":";
    for (std::size_t i = 0; i < missing.size() && i < 5; ++i) {
      msg += " " + missing[i];
    }
    if (missing.size() > 5) {
      msg += " (+" + std::to_string(missing.size() - 5) + " more)";
    }
    throw Error(msg);
  }
  return X;
}

std::vector<Ensemble> load_ensembles(const std::string& model_dir,
                                     const RelationSchema& schema) {
  std::vector<Ensemble> ensembles;
  for (const RelationType& rtype : schema.relations) {
    ensembles.push_back(load_ensemble(model_dir, rtype));
  }
  return ensembles;
}

Predictions predict_dataset(const WeakDataset& d, const FeatureMatrix& X,
                            const std::vector<Ensemble>& ensembles,
                            double p_threshold) {
  Predictions preds;
  preds.reserve(d.instances.size());
  for (std::size_t i = 0; i < d.instances.size(); ++i) {
    Prediction p;
    p.iid = d.instances[i].iid;
    for (const Ensemble& e : ensembles) {
      p.probs[e.rtype] = predict(e, X.row(i));
    }
    p.label = classify(ensembles, X.row(i), p_threshold);
    preds.push_back(std::move(p));
  }
  return preds;
}

}  // namespace

void cmd_seed_extract(const PipelineConfig& cfg, bool strict, std::ostream& out,
                      std::ostream& err) {
  cfg.validate();
  need_path(cfg.corpus, "corpus file");
  need_path(cfg.vectors, "vectors file");

  const VectorSpace space = load_vectors(cfg.vectors);
  const MappingConfig mapping = cfg.mapping();
  check_mapping_config(mapping, space);

  SeedSet seeds;
  for_each_sentence(cfg.corpus, [&](Sentence&& s) {
    for (const auto& [a, b] : candidate_pairs(s, cfg.schema)) {
      if (auto seed = extract_seed(s, a, b, cfg.schema, mapping, space)) {
        seeds.add(std::move(*seed));
      }
    }
  });

  if (seeds.size() == 0) {
    if (strict) throw DegenerateError("no seeds extracted");
    err << "warning: no seeds extracted\n";
  }

  ensure_dir(cfg.out);
  write_seeds(seeds, cfg.out + "/seeds.jsonl");

  std::map<std::string, std::int64_t> by_type;
  for (const SeedRelation& s : seeds.seeds) ++by_type[s.rtype];
  std::string detail;
  for (const RelationType& r : cfg.schema.relations) {
    auto it = by_type.find(r);
    if (it == by_type.end()) continue;
    if (!detail.empty()) detail += ", ";
    detail += r + ": " + std::to_string(it->second);
  }
  out << "seeds: " << seeds.size();
  if (!detail.empty()) out << " (" << detail << ")";
  out << "\n";
}

void cmd_annotate(const PipelineConfig& cfg, const std::string& seeds_path,
                  bool strict, std::ostream& out, std::ostream& err) {
  cfg.validate();
  need_path(cfg.corpus, "corpus file");

  const SeedSet seeds = load_seeds(seeds_path);
  if (seeds.size() == 0) {
    if (strict) throw DegenerateError("seed set is empty: " + seeds_path);
    err << "warning: seed set is empty, all instances will be Null\n";
  }

  ensure_dir(cfg.out);
  const std::string dataset_path = cfg.out + "/dataset.jsonl";
  std::ofstream dataset(dataset_path, std::ios::binary);
  if (!dataset) throw Error("cannot write " + dataset_path);

  std::int64_t total = 0;
  std::map<std::string, std::int64_t> counts;
  for_each_sentence(cfg.corpus, [&](Sentence&& s) {
    for (const Instance& inst : annotate_sentence(s, seeds, cfg.schema)) {
      dataset << instance_record(inst) << '\n';
      ++total;
      ++counts[inst.label ? *inst.label : "Null"];
    }
  });
  if (!dataset) throw Error("write failed: " + dataset_path);

  out << "instances: " << total << " ("
      << class_summary(cfg.schema.relations, counts) << ")\n";
}

void cmd_train(const PipelineConfig& cfg, const std::string& dataset_path,
               std::ostream& out, std::ostream& err) {
  (void)err;
  cfg.validate();
  need_path(cfg.corpus, "corpus file");
  need_path(cfg.vectors, "vectors file");

  const VectorSpace space = load_vectors(cfg.vectors);
  const WeakDataset d = import_dataset(dataset_path);
  if (d.instances.empty()) {
    throw DegenerateError("dataset is empty: " + dataset_path);
  }
  const FeatureMatrix X = featurize_streaming(d, cfg.corpus, space, cfg.schema);

  const std::string model_dir = cfg.out + "/model";
  ensure_dir(model_dir);
  for (const RelationType& rtype : cfg.schema.relations) {
    std::vector<TrainLog> logs;
    const Ensemble e = train_ensemble(d, X, rtype, cfg.hyper, &logs);
    save_ensemble(e, logs, model_dir);
    out << "trained " << rtype << ": " << e.members.size() << " members\n";
  }
  out << "model written to " << model_dir << "\n";
}

void cmd_predict(const PipelineConfig& cfg, const std::string& dataset_path,
                 const std::string& model_dir,
                 const std::string& predictions_path, std::ostream& out,
                 std::ostream& err) {
  (void)err;
  cfg.validate();
  need_path(cfg.corpus, "corpus file");
  need_path(cfg.vectors, "vectors file");

  const VectorSpace space = load_vectors(cfg.vectors);
  const WeakDataset d = import_dataset(dataset_path);
  const FeatureMatrix X = featurize_streaming(d, cfg.corpus, space, cfg.schema);
  const std::vector<Ensemble> ensembles = load_ensembles(model_dir, cfg.schema);

  const Predictions preds = predict_dataset(d, X, ensembles, cfg.p_threshold);
  const std::string parent =
      std::filesystem::path(predictions_path).parent_path().string();
  if (!parent.empty()) ensure_dir(parent);
  write_predictions(preds, predictions_path);
  out << "predictions: " << preds.size() << "\n";
}

void cmd_evaluate(const PipelineConfig& cfg, const std::string& method,
                  const std::string& model_dir, const std::string& gold_path,
                  std::ostream& out, std::ostream& err) {
  (void)err;
  cfg.validate();

  const WeakDataset gold = import_dataset(gold_path);
  if (gold.instances.empty()) throw Error("gold dataset is empty: " + gold_path);

  std::map<std::string, std::string> context{
      {"method", method},
      {"gold", gold_path},
      {"gold_digest", file_digest(gold_path)},
      {"p_threshold", std::to_string(cfg.p_threshold)},
      {"seed", std::to_string(cfg.hyper.seed)}};

  Predictions preds;
  if (method == "cooccurrence") {
    preds = cooccurrence_baseline(gold, cfg.schema.relations);
  } else if (method == "spvm") {
    need_path(cfg.corpus, "corpus file");
    need_path(cfg.vectors, "vectors file");
    const Corpus c = load_corpus(cfg.corpus);
    const VectorSpace space = load_vectors(cfg.vectors);
    const MappingConfig mapping = cfg.mapping();
    check_mapping_config(mapping, space);
    preds = spvm_baseline(gold, c, cfg.schema, mapping, space);
    context["corpus_digest"] = file_digest(cfg.corpus);
    context["vectors_digest"] = file_digest(cfg.vectors);
  } else if (method == "model") {
    need_path(cfg.corpus, "corpus file");
    need_path(cfg.vectors, "vectors file");
    const VectorSpace space = load_vectors(cfg.vectors);
    const FeatureMatrix X =
        featurize_streaming(gold, cfg.corpus, space, cfg.schema);
    const std::vector<Ensemble> ensembles =
        load_ensembles(model_dir, cfg.schema);
    preds = predict_dataset(gold, X, ensembles, cfg.p_threshold);
    context["corpus_digest"] = file_digest(cfg.corpus);
    context["vectors_digest"] = file_digest(cfg.vectors);
    context["model"] = model_dir;
  } else {
    throw Error("unknown evaluation method: " + method +
                " (expected model, cooccurrence, or spvm)");
  }

  const auto metrics =
      score(gold, preds, cfg.schema.relations, cfg.p_threshold);
  std::vector<ReportRow> rows;
  for (const RelationType& rtype : cfg.schema.relations) {
    rows.push_back({method, rtype, metrics.at(rtype), Metrics{}, 1});
  }

  ensure_dir(cfg.out);
  const std::string table = report_table(rows);
  std::ofstream txt(cfg.out + "/report.txt", std::ios::binary);
  if (!txt) throw Error("cannot write " + cfg.out + "/report.txt");
  txt << table;
  std::ofstream js(cfg.out + "/report.json", std::ios::binary);
  if (!js) throw Error("cannot write " + cfg.out + "/report.json");
  js << report_json(rows, context);

  out << table;
}

void cmd_convert(const std::string& conllu_path,
                 const std::string& entities_path,
                 const std::string& output_path, std::ostream& out,
                 std::ostream& err) {
  (void)err;
  const Corpus c = convert_corpus(conllu_path, entities_path);
  const std::string parent =
      std::filesystem::path(output_path).parent_path().string();
  if (!parent.empty()) ensure_dir(parent);
  write_corpus(c, output_path);
  out << "sentences: " << c.sentences.size() << "\n";
}

void cmd_synth(const SynthParams& params, const std::string& dir,
               std::ostream& out, std::ostream& err) {
  (void)err;
  const SynthStats stats = write_synth(params, dir);
  out << "sentences: " << params.sentences << " (train: " << stats.train_sentences
      << ", eval: " << stats.eval_sentences << ")\n"
      << "gold instances: train " << stats.gold_train_instances << ", eval "
      << stats.gold_eval_instances << "\n"
      << "benchmark written to " << dir << "\n";
}

}  // namespace relx
