#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "relx/commands.hpp"
#include "relx/config.hpp"
#include "relx/error.hpp"
#include "relx/eval.hpp"
#include "relx/pathex.hpp"
#include "relx/synth.hpp"
#include "testutil.hpp"

using namespace relx;
using testutil::sent;
using testutil::tok;

namespace {

// Corpus: one seedable sentence (explicit verb), one distant co-occurrence
// of the same pair, one unrelated pair.
void write_fixture(const testutil::TempDir& tmp) {
  Corpus c;
  c.sentences.push_back(
      sent("s1",
           {tok(1, "aspirin", "aspirin", "NOUN", 2, "nsubj"),
            tok(2, "induces", "induce", "VERB", 0, "root"),
            tok(3, "headache", "headache", "NOUN", 2, "obj")},
           {{1, 1, "COMPOUND", "C1"}, {3, 3, "DISEASE", "D1"}}));
  c.sentences.push_back(
      sent("s2",
           {tok(1, "aspirin", "aspirin", "NOUN", 2, "nsubj"),
            tok(2, "mentions", "mention", "VERB", 0, "root"),
            tok(3, "headache", "headache", "NOUN", 2, "obj")},
           {{1, 1, "COMPOUND", "C1"}, {3, 3, "DISEASE", "D1"}}));
  c.sentences.push_back(
      sent("s3",
           {tok(1, "ibuprofen", "ibuprofen", "NOUN", 2, "nsubj"),
            tok(2, "mentions", "mention", "VERB", 0, "root"),
            tok(3, "nausea", "nausea", "NOUN", 2, "obj")},
           {{1, 1, "COMPOUND", "C2"}, {3, 3, "DISEASE", "D2"}}));
  write_corpus(c, tmp.file("corpus.jsonl"));
  testutil::spit(tmp.file("vectors.txt"),
                 "4 3\n"
                 "cause 1 0 0\n"
                 "treat 0 1 0\n"
                 "induce 0.9 0.1 0\n"
                 "mention 0.05 0.05 1\n");
}

PipelineConfig fixture_config(const testutil::TempDir& tmp) {
  PipelineConfig cfg;
  cfg.corpus = tmp.file("corpus.jsonl");
  cfg.vectors = tmp.file("vectors.txt");
  cfg.out = tmp.file("out");
  return cfg;
}

int run_cli(const std::string& args) {
  const char* bin = std::getenv("RELX_BIN");
  REQUIRE(bin != nullptr);
  const int status = std::system((std::string(bin) + " " + args +
                                  " >/dev/null 2>&1")
                                     .c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("cmd_seed_extract writes seeds and a per-type summary") {
  testutil::TempDir tmp;
  write_fixture(tmp);
  std::ostringstream out, err;
  cmd_seed_extract(fixture_config(tmp), false, out, err);
  CHECK(out.str() == "seeds: 1 (cause: 1)\n");
  CHECK(err.str().empty());
  const SeedSet seeds = load_seeds(tmp.file("out/seeds.jsonl"));
  REQUIRE(seeds.size() == 1);
  CHECK(seeds.seeds[0].rtype == "cause");
  CHECK(seeds.seeds[0].sid == "s1");
}

TEST_CASE("cmd_seed_extract reports missing inputs as errors") {
  testutil::TempDir tmp;
  write_fixture(tmp);
  PipelineConfig cfg = fixture_config(tmp);
  cfg.vectors = tmp.file("absent.txt");
  std::ostringstream out, err;
  CHECK_THROWS_WITH_AS(cmd_seed_extract(cfg, false, out, err),
                       doctest::Contains("absent.txt"), Error);
}

TEST_CASE("cmd_seed_extract rejects invalid configuration") {
  testutil::TempDir tmp;
  write_fixture(tmp);
  PipelineConfig cfg = fixture_config(tmp);
  cfg.threshold = 1.01;
  std::ostringstream out, err;
  CHECK_THROWS_AS(cmd_seed_extract(cfg, false, out, err), Error);
}

TEST_CASE("an empty harvest warns, or errors under strict") {
  testutil::TempDir tmp;
  write_fixture(tmp);
  PipelineConfig cfg = fixture_config(tmp);
  cfg.threshold = 0.9999;  // nothing maps this high

  std::ostringstream out, err;
  cmd_seed_extract(cfg, false, out, err);
  CHECK(out.str() == "seeds: 0\n");
  CHECK(err.str() == "warning: no seeds extracted\n");
  CHECK(load_seeds(tmp.file("out/seeds.jsonl")).size() == 0);

  std::ostringstream out2, err2;
  CHECK_THROWS_AS(cmd_seed_extract(cfg, true, out2, err2), DegenerateError);
}

TEST_CASE("cmd_annotate labels the corpus against the seed file") {
  testutil::TempDir tmp;
  write_fixture(tmp);
  const PipelineConfig cfg = fixture_config(tmp);
  std::ostringstream out, err;
  cmd_seed_extract(cfg, false, out, err);

  std::ostringstream out2, err2;
  cmd_annotate(cfg, tmp.file("out/seeds.jsonl"), false, out2, err2);
  CHECK(out2.str() == "instances: 3 (cause: 2, treat: 0)\n");

  const WeakDataset d = import_dataset(tmp.file("out/dataset.jsonl"));
  REQUIRE(d.instances.size() == 3);
  CHECK(d.class_counts.at("cause") == 2);   // s1 (seed) + s2 (distant)
  CHECK(d.class_counts.at("Null") == 1);    // s3
  for (const Instance& inst : d.instances) {
    if (inst.sid == "s1") CHECK(inst.source == Source::seed);
    if (inst.sid == "s2") CHECK(inst.source == Source::distant);
    if (inst.sid == "s3") CHECK(inst.source == Source::negative);
  }
}

TEST_CASE("cmd_annotate warns on an empty seed set, errors under strict") {
  testutil::TempDir tmp;
  write_fixture(tmp);
  PipelineConfig cfg = fixture_config(tmp);
  cfg.threshold = 0.9999;
  std::ostringstream out, err;
  cmd_seed_extract(cfg, false, out, err);

  std::ostringstream out2, err2;
  cmd_annotate(cfg, tmp.file("out/seeds.jsonl"), false, out2, err2);
  CHECK(out2.str() == "instances: 3 (cause: 0, treat: 0)\n");
  CHECK(err2.str() ==
        "warning: seed set is empty, all instances will be Null\n");

  std::ostringstream out3, err3;
  CHECK_THROWS_AS(
      cmd_annotate(cfg, tmp.file("out/seeds.jsonl"), true, out3, err3),
      DegenerateError);
}

TEST_CASE("cmd_train needs positives for every relation type") {
  testutil::TempDir tmp;
  write_fixture(tmp);
  const PipelineConfig cfg = fixture_config(tmp);
  std::ostringstream out, err;
  cmd_seed_extract(cfg, false, out, err);
  cmd_annotate(cfg, tmp.file("out/seeds.jsonl"), false, out, err);
  // The fixture has cause instances only: treat is degenerate.
  CHECK_THROWS_WITH_AS(
      cmd_train(cfg, tmp.file("out/dataset.jsonl"), out, err),
      doctest::Contains("treat"), DegenerateError);
}

TEST_CASE("the full pipeline runs end to end on a synthetic corpus") {
  testutil::TempDir tmp;
  std::ostringstream out, err;
  SynthParams params;
  params.seed = 3;
  params.sentences = 600;
  cmd_synth(params, tmp.file("bench"), out, err);
  for (const char* f :
       {"corpus_train.jsonl", "corpus_eval.jsonl", "gold_train.jsonl",
        "gold_eval.jsonl", "vectors.txt", "synth_summary.json"}) {
    CHECK_FALSE(testutil::slurp(tmp.file(std::string("bench/") + f)).empty());
  }

  PipelineConfig cfg;
  cfg.corpus = tmp.file("bench/corpus_train.jsonl");
  cfg.vectors = tmp.file("bench/vectors.txt");
  cfg.out = tmp.file("run");
  cfg.hyper.epochs = 10;
  cfg.hyper.learning_rate = 0.5;
  cfg.hyper.seed = 3;

  std::ostringstream log;
  cmd_seed_extract(cfg, true, log, err);
  cmd_annotate(cfg, tmp.file("run/seeds.jsonl"), true, log, err);
  cmd_train(cfg, tmp.file("run/dataset.jsonl"), log, err);
  CHECK(log.str().find("trained cause: 10 members") != std::string::npos);
  CHECK(log.str().find("trained treat: 10 members") != std::string::npos);
  for (const char* f : {"cause.json", "cause.member00.json",
                        "cause.member09.json", "cause.heldout.log",
                        "treat.json", "treat.member00.json"}) {
    CHECK_FALSE(
        testutil::slurp(tmp.file(std::string("run/model/") + f)).empty());
  }

  // Predict on the eval gold; one prediction per instance.
  PipelineConfig eval_cfg = cfg;
  eval_cfg.corpus = tmp.file("bench/corpus_eval.jsonl");
  std::ostringstream plog;
  cmd_predict(eval_cfg, tmp.file("bench/gold_eval.jsonl"),
              tmp.file("run/model"), tmp.file("run/preds.jsonl"), plog, err);
  const WeakDataset gold = import_dataset(tmp.file("bench/gold_eval.jsonl"));
  const Predictions preds = load_predictions(tmp.file("run/preds.jsonl"));
  CHECK(preds.size() == gold.instances.size());
  CHECK(plog.str() ==
        "predictions: " + std::to_string(preds.size()) + "\n");
  for (const Prediction& p : preds) {
    CHECK(p.probs.count("cause") == 1);
    CHECK(p.probs.count("treat") == 1);
  }

  // Evaluate all three methods; reports land in distinct directories.
  for (const std::string method : {"model", "cooccurrence", "spvm"}) {
    PipelineConfig m_cfg = eval_cfg;
    m_cfg.out = tmp.file("eval_" + method);
    std::ostringstream mlog;
    cmd_evaluate(m_cfg, method, tmp.file("run/model"),
                 tmp.file("bench/gold_eval.jsonl"), mlog, err);
    CHECK(mlog.str().find(method) != std::string::npos);
    CHECK(mlog.str().find("cause") != std::string::npos);
    const std::string json =
        testutil::slurp(tmp.file("eval_" + method + "/report.json"));
    CHECK(json.find("\"method\": \"" + method + "\"") != std::string::npos);
    CHECK_FALSE(
        testutil::slurp(tmp.file("eval_" + method + "/report.txt")).empty());
  }
}

TEST_CASE("cmd_evaluate reproduces the co-occurrence identity") {
  testutil::TempDir tmp;
  WeakDataset gold;
  for (int i = 0; i < 1000; ++i) {
    Instance inst;
    inst.iid = "g" + std::to_string(i);
    inst.sid = "s" + std::to_string(i);
    inst.key = {"C" + std::to_string(i), "D" + std::to_string(i), "COMPOUND",
                "DISEASE"};
    inst.masked_text = "COMPOUND x DISEASE";
    if (i < 309) inst.label = "cause";
    inst.source = Source::gold;
    gold.instances.push_back(std::move(inst));
  }
  gold.recount();
  export_dataset(gold, tmp.file("gold.jsonl"));

  PipelineConfig cfg;
  cfg.out = tmp.file("out");
  std::ostringstream out, err;
  cmd_evaluate(cfg, "cooccurrence", "", tmp.file("gold.jsonl"), out, err);
  CHECK(out.str().find("30.9") != std::string::npos);
  CHECK(out.str().find("100.0") != std::string::npos);
  CHECK(out.str().find("47.2") != std::string::npos);
}

TEST_CASE("cmd_convert joins CoNLL-U and standoff entities") {
  testutil::TempDir tmp;
  testutil::spit(tmp.file("s.conllu"),
                 "# sent_id = d1\n"
                 "1\tAspirin\taspirin\tPROPN\t_\t_\t2\tnsubj\t_\t_\n"
                 "2\thelps\thelp\tVERB\t_\t_\t0\troot\t_\t_\n");
  testutil::spit(tmp.file("e.tsv"), "d1\t1\t1\tCOMPOUND\tC1\n");
  std::ostringstream out, err;
  cmd_convert(tmp.file("s.conllu"), tmp.file("e.tsv"), tmp.file("c.jsonl"),
              out, err);
  CHECK(out.str() == "sentences: 1\n");
  const Corpus c = load_corpus(tmp.file("c.jsonl"));
  REQUIRE(c.sentences.size() == 1);
  CHECK(c.sentences[0].entities.size() == 1);
}

TEST_CASE("config files load strictly") {
  testutil::TempDir tmp;
  testutil::spit(tmp.file("config.json"), R"({
    "corpus": "corpus.jsonl",
    "vectors": "vectors.txt",
    "out": "results",
    "threshold": 0.45,
    "p_threshold": 0.6,
    "schema": {
      "atype": "COMPOUND",
      "btype": "DISEASE",
      "relations": ["cause", "treat"]
    },
    "hyper": {"epochs": 7, "learning_rate": 0.2, "batch_size": 64,
              "bags": 4, "seed": 9}
  })");
  const PipelineConfig cfg = load_config(tmp.file("config.json"));
  CHECK(cfg.corpus == "corpus.jsonl");
  CHECK(cfg.out == "results");
  CHECK(cfg.threshold == 0.45);
  CHECK(cfg.p_threshold == 0.6);
  CHECK(cfg.hyper.epochs == 7);
  CHECK(cfg.hyper.bags == 4);
  CHECK(cfg.hyper.seed == 9);

  testutil::spit(tmp.file("unknown.json"), R"({"corpsu": "typo.jsonl"})");
  CHECK_THROWS_WITH_AS(load_config(tmp.file("unknown.json")),
                       doctest::Contains("corpsu"), Error);
  testutil::spit(tmp.file("badhyper.json"), R"({"hyper": {"epoch": 3}})");
  CHECK_THROWS_AS(load_config(tmp.file("badhyper.json")), Error);
}

TEST_CASE("config validation guards schema and thresholds") {
  PipelineConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  PipelineConfig null_name = cfg;
  null_name.schema.relations = {"cause", "Null"};
  CHECK_THROWS_AS(null_name.validate(), Error);
  PipelineConfig dupes = cfg;
  dupes.schema.relations = {"cause", "cause"};
  CHECK_THROWS_AS(dupes.validate(), Error);
  PipelineConfig empty_types = cfg;
  empty_types.schema.atype = "";
  CHECK_THROWS_AS(empty_types.validate(), Error);
  PipelineConfig bad_p = cfg;
  bad_p.p_threshold = 1.5;
  CHECK_THROWS_AS(bad_p.validate(), Error);
}

TEST_CASE("environment variables override configured paths") {
  PipelineConfig cfg;
  cfg.corpus = "from_file.jsonl";
  setenv("RELX_CORPUS", "from_env.jsonl", 1);
  setenv("RELX_VECTORS", "", 1);  // empty: ignored
  unsetenv("RELX_OUT");
  apply_env(cfg);
  unsetenv("RELX_CORPUS");
  unsetenv("RELX_VECTORS");
  CHECK(cfg.corpus == "from_env.jsonl");
  CHECK(cfg.vectors.empty());
  CHECK(cfg.out == "out");
}

TEST_CASE("the installed binary maps outcomes to exit codes") {
  testutil::TempDir tmp;
  // Usage error: unknown subcommand.
  CHECK(run_cli("frobnicate") == 2);
  // IO error: missing inputs.
  CHECK(run_cli("seed-extract --corpus " + tmp.file("no.jsonl") +
                " --vectors " + tmp.file("no.txt") + " --out " +
                tmp.file("o")) == 2);
  // Success path.
  CHECK(run_cli("synth --out " + tmp.file("bench") + " --sentences 100") == 0);
  CHECK(run_cli("seed-extract --corpus " + tmp.file("bench/corpus_train.jsonl") +
                " --vectors " + tmp.file("bench/vectors.txt") + " --out " +
                tmp.file("run")) == 0);
  // Degenerate pipeline state under strict: no seeds at threshold 1.
  CHECK(run_cli("seed-extract --strict --threshold 1.0 --corpus " +
                tmp.file("bench/corpus_train.jsonl") + " --vectors " +
                tmp.file("bench/vectors.txt") + " --out " + tmp.file("run2")) ==
        1);
}
