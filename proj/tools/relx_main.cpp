#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "relx/commands.hpp"
#include "relx/config.hpp"
#include "relx/error.hpp"
#include "relx/synth.hpp"

namespace {

// Carries raw flag values so "flag was given" can override config and
// environment in that order.
struct CommonFlags {
  std::string config_path;
  std::string corpus;
  std::string vectors;
  std::string out;
  double threshold = 0.0;
  double p_threshold = 0.0;
  int epochs = 0;
  double learning_rate = 0.0;
  int batch_size = 0;
  int bags = 0;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config_path, "JSON config file");
  sub->add_option("--corpus", f.corpus, "corpus file (jsonl)");
  sub->add_option("--vectors", f.vectors, "word2vec text vectors");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--threshold", f.threshold, "verb-mapping similarity floor");
  sub->add_option("--p-threshold", f.p_threshold,
                  "classification probability floor");
  sub->add_option("--epochs", f.epochs, "training epochs");
  sub->add_option("--learning-rate", f.learning_rate, "SGD learning rate");
  sub->add_option("--batch-size", f.batch_size, "SGD batch size");
  sub->add_option("--bags", f.bags, "ensemble size");
  sub->add_option("--seed", f.seed, "master seed");
}

// defaults < config file < environment < flags.
relx::PipelineConfig resolve(const CLI::App* sub, const CommonFlags& f) {
  relx::PipelineConfig cfg;
  if (sub->count("--config")) cfg = relx::load_config(f.config_path);
  relx::apply_env(cfg);
  if (sub->count("--corpus")) cfg.corpus = f.corpus;
  if (sub->count("--vectors")) cfg.vectors = f.vectors;
  if (sub->count("--out")) cfg.out = f.out;
  if (sub->count("--threshold")) cfg.threshold = f.threshold;
  if (sub->count("--p-threshold")) cfg.p_threshold = f.p_threshold;
  if (sub->count("--epochs")) cfg.hyper.epochs = f.epochs;
  if (sub->count("--learning-rate")) cfg.hyper.learning_rate = f.learning_rate;
  if (sub->count("--batch-size")) cfg.hyper.batch_size = f.batch_size;
  if (sub->count("--bags")) cfg.hyper.bags = f.bags;
  if (sub->count("--seed")) cfg.hyper.seed = f.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unsupervised relation-extraction bootstrapping pipeline"};
  app.require_subcommand(1);

  CommonFlags f;
  bool strict = false;
  std::string seeds_path;
  std::string dataset_path;
  std::string model_dir;
  std::string predictions_path;
  std::string gold_path;
  std::string method = "model";
  std::string conllu_path;
  std::string entities_path;
  std::string output_path;
  relx::SynthParams synth_params;
  std::string synth_dir = "synth";

  CLI::App* seed_extract =
      app.add_subcommand("seed-extract", "harvest seed relations");
  add_common(seed_extract, f);
  seed_extract->add_flag("--strict", strict, "fail when no seeds are found");

  CLI::App* annotate =
      app.add_subcommand("annotate", "distantly annotate the corpus");
  add_common(annotate, f);
  annotate->add_option("--seeds", seeds_path,
                       "seed file (default <out>/seeds.jsonl)");
  annotate->add_flag("--strict", strict, "fail when the seed set is empty");

  CLI::App* train = app.add_subcommand("train", "train the ensembles");
  add_common(train, f);
  train->add_option("--dataset", dataset_path,
                    "weak dataset (default <out>/dataset.jsonl)");

  CLI::App* predict = app.add_subcommand("predict", "score a dataset");
  add_common(predict, f);
  predict->add_option("--dataset", dataset_path, "instances to score")
      ->required();
  predict->add_option("--model", model_dir,
                      "model directory (default <out>/model)");
  predict->add_option("--predictions", predictions_path,
                      "output file (default <out>/predictions.jsonl)");

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "score a method against gold labels");
  add_common(evaluate, f);
  evaluate->add_option("--gold", gold_path, "gold dataset (jsonl)")->required();
  evaluate
      ->add_option("--method", method, "model, cooccurrence, or spvm")
      ->check(CLI::IsMember({"model", "cooccurrence", "spvm"}));
  evaluate->add_option("--model", model_dir,
                       "model directory (default <out>/model)");

  CLI::App* convert =
      app.add_subcommand("convert", "CoNLL-U + entity standoff -> corpus");
  convert->add_option("--conllu", conllu_path, "CoNLL-U input")->required();
  convert->add_option("--entities", entities_path, "entity standoff TSV")
      ->required();
  convert->add_option("--output", output_path, "corpus output (jsonl)")
      ->required();

  CLI::App* synth =
      app.add_subcommand("synth", "generate the synthetic benchmark");
  synth->add_option("--out", synth_dir, "output directory");
  synth->add_option("--seed", synth_params.seed, "generator seed");
  synth->add_option("--sentences", synth_params.sentences, "sentence count");
  synth->add_option("--relation-prob", synth_params.relation_prob,
                    "share of sentences with a related pair");
  synth->add_option("--explicit-prob", synth_params.explicit_prob,
                    "share of related sentences with a mapping verb");
  synth->add_option("--trap-verb-prob", synth_params.trap_verb_prob,
                    "chance a trap sentence fires its misleading verb");
  synth->add_option("--distractor-prob", synth_params.distractor_prob,
                    "chance a null sentence gains a third entity");
  synth->add_option("--eval-stride", synth_params.eval_stride,
                    "every k-th sentence goes to the eval split");

  try {
    app.parse(argc, argv);

    if (seed_extract->parsed()) {
      relx::PipelineConfig cfg = resolve(seed_extract, f);
      relx::cmd_seed_extract(cfg, strict, std::cout, std::cerr);
    } else if (annotate->parsed()) {
      relx::PipelineConfig cfg = resolve(annotate, f);
      if (!annotate->count("--seeds")) seeds_path = cfg.out + "/seeds.jsonl";
      relx::cmd_annotate(cfg, seeds_path, strict, std::cout, std::cerr);
    } else if (train->parsed()) {
      relx::PipelineConfig cfg = resolve(train, f);
      if (!train->count("--dataset")) dataset_path = cfg.out + "/dataset.jsonl";
      relx::cmd_train(cfg, dataset_path, std::cout, std::cerr);
    } else if (predict->parsed()) {
      relx::PipelineConfig cfg = resolve(predict, f);
      if (!predict->count("--model")) model_dir = cfg.out + "/model";
      if (!predict->count("--predictions")) {
        predictions_path = cfg.out + "/predictions.jsonl";
      }
      relx::cmd_predict(cfg, dataset_path, model_dir, predictions_path,
                        std::cout, std::cerr);
    } else if (evaluate->parsed()) {
      relx::PipelineConfig cfg = resolve(evaluate, f);
      if (!evaluate->count("--model")) model_dir = cfg.out + "/model";
      relx::cmd_evaluate(cfg, method, model_dir, gold_path, std::cout,
                         std::cerr);
    } else if (convert->parsed()) {
      relx::cmd_convert(conllu_path, entities_path, output_path, std::cout,
                        std::cerr);
    } else if (synth->parsed()) {
      relx::cmd_synth(synth_params, synth_dir, std::cout, std::cerr);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const relx::DegenerateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
