#include "relx/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "relx/error.hpp"
#include "relx/rng.hpp"

namespace relx {

using json = nlohmann::json;

namespace {

constexpr int kDim = 16;

// Axis layout: 0 cause-verb, 1 treat-verb, 2 cause-noun, 3 treat-noun,
// 5 generic noun, 6 generic verb, 7 reporting verb, 8+ filler/jitter.
struct WordSpec {
  const char* token;
  int axis;
  double weight;
  int aux_axis;
  double aux_weight;
};

constexpr WordSpec kAnchors[] = {
    {"cause", 0, 1.0, -1, 0.0},
    {"treat", 1, 1.0, -1, 0.0},
};

constexpr WordSpec kCauseVerbs[] = {
    {"induce", 0, 1.0, 6, 0.3},    {"trigger", 0, 1.0, 6, 0.5},
    {"provoke", 0, 0.9, 6, 0.4},   {"elicit", 0, 0.8, 6, 0.5},
    {"aggravate", 0, 0.7, 6, 0.6}, {"exacerbate", 0, 0.9, 6, 0.6},
};

constexpr WordSpec kTreatVerbs[] = {
    {"cure", 1, 1.0, 6, 0.3},       {"alleviate", 1, 0.9, 6, 0.4},
    {"relieve", 1, 0.9, 6, 0.5},    {"heal", 1, 0.8, 6, 0.4},
    {"ameliorate", 1, 0.8, 6, 0.6}, {"mitigate", 1, 0.7, 6, 0.5},
};

// Verbs that suggest a relation without asserting it; they must stay below
// the mapping threshold.
constexpr WordSpec kDecoyVerbs[] = {
    {"associate", 0, 0.25, 6, 1.0}, {"link", 0, 0.2, 6, 1.0},
    {"correlate", 0, 0.15, 6, 1.0}, {"receive", 1, 0.2, 6, 1.0},
    {"follow", 1, 0.15, 6, 1.0},
};

constexpr WordSpec kNullVerbs[] = {
    {"be", 7, 1.0, 6, 0.2},      {"have", 7, 0.9, 6, 0.3},
    {"mention", 7, 1.0, 6, 0.4}, {"describe", 7, 0.9, 6, 0.5},
    {"examine", 7, 1.0, 6, 0.3}, {"measure", 7, 0.95, 6, 0.35},
    {"observe", 7, 1.0, 6, 0.45}, {"detect", 7, 0.9, 6, 0.4},
    {"study", 7, 1.0, 6, 0.35},  {"assess", 7, 0.95, 6, 0.3},
    {"report", 7, 1.0, 6, 0.4},  {"appear", 7, 1.0, 6, 0.4},
};

constexpr WordSpec kCauseNouns[] = {
    {"onset", 2, 1.0, 5, 0.4},
    {"exposure", 2, 0.9, 5, 0.5},
    {"pathogenesis", 2, 1.0, 5, 0.3},
    {"toxicity", 2, 0.9, 5, 0.4},
};

constexpr WordSpec kTreatNouns[] = {
    {"therapy", 3, 1.0, 5, 0.4},  {"remission", 3, 0.9, 5, 0.4},
    {"regimen", 3, 0.8, 5, 0.5},  {"recovery", 3, 0.9, 5, 0.5},
    {"remedy", 3, 1.0, 5, 0.35},
};

constexpr WordSpec kNeutralWords[] = {
    {"patient", 5, 1.0, 8, 0.3},       {"mouse", 5, 1.0, 9, 0.3},
    {"rat", 5, 1.0, 10, 0.3},          {"serum", 5, 1.0, 11, 0.3},
    {"level", 5, 1.0, 12, 0.3},        {"activity", 5, 1.0, 13, 0.3},
    {"prevalence", 5, 1.0, 14, 0.3},   {"pharmacology", 5, 1.0, 15, 0.3},
    {"agent", 5, 1.0, 8, 0.4},         {"salt", 5, 1.0, 9, 0.4},
    {"administration", 5, 1.0, 3, 0.15},
    {"known", 11, 1.0, 12, 0.2},       {"measurable", 12, 1.0, 13, 0.2},
    {"effective", 13, 1.0, 14, 0.2},   {"often", 14, 1.0, 15, 0.2},
    {"reportedly", 15, 1.0, 8, 0.2},
};

std::vector<double> make_vector(const WordSpec& spec, Rng& rng, bool jitter) {
  std::vector<double> v(kDim, 0.0);
  v[spec.axis] = spec.weight;
  if (spec.aux_axis >= 0) v[spec.aux_axis] += spec.aux_weight;
  if (jitter) {
    for (int d = 8; d < kDim; ++d) {
      v[d] += std::clamp(0.03 * rng.normal(), -0.1, 0.1);
    }
  }
  return v;
}

std::optional<VerbMapping> map_phrase(const std::vector<std::string>& phrase,
                                      const VectorSpace& space,
                                      double threshold) {
  MappingConfig cfg = synth_mapping();
  cfg.threshold = threshold;
  return map_verb(phrase, cfg, space);
}

void check_space(const VectorSpace& space) {
  auto fail = [](const std::string& what) {
    throw Error("synthetic vector space failed margin check: " + what);
  };
  auto expect_mapped = [&](const std::vector<std::string>& phrase,
                           const RelationType& rtype, double min_sim) {
    auto m = map_phrase(phrase, space, 0.4);
    if (!m || m->rtype != rtype || m->similarity < min_sim) {
      std::string joined;
      for (const auto& w : phrase) joined += (joined.empty() ? "" : " ") + w;
      fail("'" + joined + "' must map to " + rtype);
    }
  };
  auto expect_unmapped = [&](const std::string& lemma) {
    auto m = map_phrase({lemma}, space, 0.0);
    if (m && m->similarity >= 0.35) fail("'" + lemma + "' maps too strongly");
  };

  for (const WordSpec& w : kCauseVerbs) {
    expect_mapped({w.token}, "cause", 0.6);
    expect_mapped({"appear", w.token}, "cause", 0.42);
  }
  for (const WordSpec& w : kTreatVerbs) {
    expect_mapped({w.token}, "treat", 0.6);
    expect_mapped({"appear", w.token}, "treat", 0.42);
  }
  for (const WordSpec& w : kDecoyVerbs) expect_unmapped(w.token);
  for (const WordSpec& w : kNullVerbs) expect_unmapped(w.token);
}

// --- sentence construction -------------------------------------------------

struct Ent {
  std::string form;
  std::string lemma;
  std::string upos;
  std::string cid;
};

Ent compound_ent(int i) {
  const std::string name = "compound" + std::to_string(i);
  return {name, name, "PROPN", "C" + std::to_string(i)};
}

// Every fifth disease has no catalog id, so its identity falls back to the
// lemma text.
Ent disease_ent(int j) {
  const std::string name = "disease" + std::to_string(j);
  return {name, name, "NOUN", j % 5 == 0 ? "" : "D" + std::to_string(j)};
}

std::string s_form(const std::string& lemma) { return lemma + "s"; }
std::string ed_form(const std::string& lemma) {
  return lemma.back() == 'e' ? lemma + "d" : lemma + "ed";
}

struct SentenceBuilder {
  Sentence s;

  explicit SentenceBuilder(std::string sid) { s.sid = std::move(sid); }

  SentenceBuilder& t(const std::string& form, const std::string& lemma,
                     const std::string& upos, int head,
                     const std::string& deprel) {
    s.tokens.push_back(
        {static_cast<int>(s.tokens.size()) + 1, form, lemma, upos, head, deprel});
    return *this;
  }

  SentenceBuilder& e(const Ent& ent, int head, const std::string& deprel) {
    return t(ent.form, ent.lemma, ent.upos, head, deprel);
  }

  SentenceBuilder& mark(int start, int end, const std::string& etype,
                        const std::string& cid) {
    s.entities.push_back({start, end, etype, cid});
    return *this;
  }
};

Sentence explicit_tpl(int tpl, const std::string& sid, const Ent& c,
                      const Ent& d, const std::string& verb) {
  SentenceBuilder b(sid);
  switch (tpl) {
    case 0:  // C VERBs D in patients .
      b.e(c, 2, "nsubj")
          .t(s_form(verb), verb, "VERB", 0, "root")
          .e(d, 2, "obj")
          .t("in", "in", "ADP", 5, "case")
          .t("patients", "patient", "NOUN", 2, "obl")
          .t(".", ".", "PUNCT", 2, "punct")
          .mark(1, 1, "COMPOUND", c.cid)
          .mark(3, 3, "DISEASE", d.cid);
      break;
    case 1:  // D was VERBed by C .
      b.e(d, 3, "nsubj:pass")
          .t("was", "be", "AUX", 3, "aux:pass")
          .t(ed_form(verb), verb, "VERB", 0, "root")
          .t("by", "by", "ADP", 5, "case")
          .e(c, 3, "obl")
          .t(".", ".", "PUNCT", 3, "punct")
          .mark(1, 1, "DISEASE", d.cid)
          .mark(5, 5, "COMPOUND", c.cid);
      break;
    case 2:  // the C salt VERBs D .
      b.t("the", "the", "DET", 3, "det")
          .e(c, 3, "compound")
          .t("salt", "salt", "NOUN", 4, "nsubj")
          .t(s_form(verb), verb, "VERB", 0, "root")
          .e(d, 4, "obj")
          .t(".", ".", "PUNCT", 4, "punct")
          .mark(2, 3, "COMPOUND", c.cid)
          .mark(5, 5, "DISEASE", d.cid);
      break;
    case 3:  // C , a known agent , VERBs D in mice .
      b.e(c, 7, "nsubj")
          .t(",", ",", "PUNCT", 5, "punct")
          .t("a", "a", "DET", 5, "det")
          .t("known", "known", "ADJ", 5, "amod")
          .t("agent", "agent", "NOUN", 1, "appos")
          .t(",", ",", "PUNCT", 5, "punct")
          .t(s_form(verb), verb, "VERB", 0, "root")
          .e(d, 7, "obj")
          .t("in", "in", "ADP", 10, "case")
          .t("mice", "mouse", "NOUN", 7, "obl")
          .t(".", ".", "PUNCT", 7, "punct")
          .mark(1, 1, "COMPOUND", c.cid)
          .mark(8, 8, "DISEASE", d.cid);
      break;
    default:  // C appears to VERB D .
      b.e(c, 2, "nsubj")
          .t("appears", "appear", "VERB", 0, "root")
          .t("to", "to", "PART", 4, "mark")
          .t(verb, verb, "VERB", 2, "xcomp")
          .e(d, 4, "obj")
          .t(".", ".", "PUNCT", 2, "punct")
          .mark(1, 1, "COMPOUND", c.cid)
          .mark(5, 5, "DISEASE", d.cid);
      break;
  }
  return b.s;
}

Sentence implicit_cause_tpl(int tpl, const std::string& sid, const Ent& c,
                            const Ent& d) {
  SentenceBuilder b(sid);
  switch (tpl) {
    case 0:  // C is associated with the onset of D .
      b.e(c, 3, "nsubj:pass")
          .t("is", "be", "AUX", 3, "aux:pass")
          .t("associated", "associate", "VERB", 0, "root")
          .t("with", "with", "ADP", 6, "case")
          .t("the", "the", "DET", 6, "det")
          .t("onset", "onset", "NOUN", 3, "obl")
          .t("of", "of", "ADP", 8, "case")
          .e(d, 6, "nmod")
          .t(".", ".", "PUNCT", 3, "punct")
          .mark(1, 1, "COMPOUND", c.cid)
          .mark(8, 8, "DISEASE", d.cid);
      break;
    case 1:  // the onset of D after C exposure was reported .
      b.t("the", "the", "DET", 2, "det")
          .t("onset", "onset", "NOUN", 9, "nsubj:pass")
          .t("of", "of", "ADP", 4, "case")
          .e(d, 2, "nmod")
          .t("after", "after", "ADP", 7, "case")
          .e(c, 7, "compound")
          .t("exposure", "exposure", "NOUN", 2, "nmod")
          .t("was", "be", "AUX", 9, "aux:pass")
          .t("reported", "report", "VERB", 0, "root")
          .t(".", ".", "PUNCT", 9, "punct")
          .mark(4, 4, "DISEASE", d.cid)
          .mark(6, 6, "COMPOUND", c.cid);
      break;
    default:  // C is a trigger for D .
      b.e(c, 4, "nsubj")
          .t("is", "be", "AUX", 4, "cop")
          .t("a", "a", "DET", 4, "det")
          .t("trigger", "trigger", "NOUN", 0, "root")
          .t("for", "for", "ADP", 6, "case")
          .e(d, 4, "nmod")
          .t(".", ".", "PUNCT", 4, "punct")
          .mark(1, 1, "COMPOUND", c.cid)
          .mark(6, 6, "DISEASE", d.cid);
      break;
  }
  return b.s;
}

Sentence implicit_treat_tpl(int tpl, const std::string& sid, const Ent& c,
                            const Ent& d) {
  SentenceBuilder b(sid);
  switch (tpl) {
    case 0:  // patients received C as therapy for D .
      b.t("patients", "patient", "NOUN", 2, "nsubj")
          .t("received", "receive", "VERB", 0, "root")
          .e(c, 2, "obj")
          .t("as", "as", "ADP", 5, "case")
          .t("therapy", "therapy", "NOUN", 2, "obl")
          .t("for", "for", "ADP", 7, "case")
          .e(d, 5, "nmod")
          .t(".", ".", "PUNCT", 2, "punct")
          .mark(3, 3, "COMPOUND", c.cid)
          .mark(7, 7, "DISEASE", d.cid);
      break;
    case 1:  // remission of D followed C administration .
      b.t("remission", "remission", "NOUN", 4, "nsubj")
          .t("of", "of", "ADP", 3, "case")
          .e(d, 1, "nmod")
          .t("followed", "follow", "VERB", 0, "root")
          .e(c, 6, "compound")
          .t("administration", "administration", "NOUN", 4, "obj")
          .t(".", ".", "PUNCT", 4, "punct")
          .mark(3, 3, "DISEASE", d.cid)
          .mark(5, 5, "COMPOUND", c.cid);
      break;
    default:  // C is an effective remedy for D .
      b.e(c, 5, "nsubj")
          .t("is", "be", "AUX", 5, "cop")
          .t("an", "an", "DET", 5, "det")
          .t("effective", "effective", "ADJ", 5, "amod")
          .t("remedy", "remedy", "NOUN", 0, "root")
          .t("for", "for", "ADP", 7, "case")
          .e(d, 5, "nmod")
          .t(".", ".", "PUNCT", 5, "punct")
          .mark(1, 1, "COMPOUND", c.cid)
          .mark(7, 7, "DISEASE", d.cid);
      break;
  }
  return b.s;
}

Sentence null_tpl(int tpl, const std::string& sid, const Ent& c, const Ent& d) {
  SentenceBuilder b(sid);
  switch (tpl) {
    case 0:  // C and D were mentioned in the report .
      b.e(c, 5, "nsubj:pass")
          .t("and", "and", "CCONJ", 3, "cc")
          .e(d, 1, "conj")
          .t("were", "be", "AUX", 5, "aux:pass")
          .t("mentioned", "mention", "VERB", 0, "root")
          .t("in", "in", "ADP", 8, "case")
          .t("the", "the", "DET", 8, "det")
          .t("report", "report", "NOUN", 5, "obl")
          .t(".", ".", "PUNCT", 5, "punct")
          .mark(1, 1, "COMPOUND", c.cid)
          .mark(3, 3, "DISEASE", d.cid);
      break;
    case 1:  // the study measured C levels and D activity .
      b.t("the", "the", "DET", 2, "det")
          .t("study", "study", "NOUN", 3, "nsubj")
          .t("measured", "measure", "VERB", 0, "root")
          .e(c, 5, "compound")
          .t("levels", "level", "NOUN", 3, "obj")
          .t("and", "and", "CCONJ", 8, "cc")
          .e(d, 8, "compound")
          .t("activity", "activity", "NOUN", 5, "conj")
          .t(".", ".", "PUNCT", 3, "punct")
          .mark(4, 4, "COMPOUND", c.cid)
          .mark(7, 7, "DISEASE", d.cid);
      break;
    case 2:  // C was detected in patients with D .
      b.e(c, 3, "nsubj:pass")
          .t("was", "be", "AUX", 3, "aux:pass")
          .t("detected", "detect", "VERB", 0, "root")
          .t("in", "in", "ADP", 5, "case")
          .t("patients", "patient", "NOUN", 3, "obl")
          .t("with", "with", "ADP", 7, "case")
          .e(d, 5, "nmod")
          .t(".", ".", "PUNCT", 3, "punct")
          .mark(1, 1, "COMPOUND", c.cid)
          .mark(7, 7, "DISEASE", d.cid);
      break;
    case 3:  // D patients often have measurable C exposure .
      b.e(d, 2, "compound")
          .t("patients", "patient", "NOUN", 4, "nsubj")
          .t("often", "often", "ADV", 4, "advmod")
          .t("have", "have", "VERB", 0, "root")
          .t("measurable", "measurable", "ADJ", 7, "amod")
          .e(c, 7, "compound")
          .t("exposure", "exposure", "NOUN", 4, "obj")
          .t(".", ".", "PUNCT", 4, "punct")
          .mark(1, 1, "DISEASE", d.cid)
          .mark(6, 6, "COMPOUND", c.cid);
      break;
    case 4:  // this report describes D prevalence and C pharmacology .
      b.t("this", "this", "DET", 2, "det")
          .t("report", "report", "NOUN", 3, "nsubj")
          .t("describes", "describe", "VERB", 0, "root")
          .e(d, 5, "compound")
          .t("prevalence", "prevalence", "NOUN", 3, "obj")
          .t("and", "and", "CCONJ", 8, "cc")
          .e(c, 8, "compound")
          .t("pharmacology", "pharmacology", "NOUN", 5, "conj")
          .t(".", ".", "PUNCT", 3, "punct")
          .mark(4, 4, "DISEASE", d.cid)
          .mark(7, 7, "COMPOUND", c.cid);
      break;
    default:  // C was studied to assess D .
      b.e(c, 3, "nsubj:pass")
          .t("was", "be", "AUX", 3, "aux:pass")
          .t("studied", "study", "VERB", 0, "root")
          .t("to", "to", "PART", 5, "mark")
          .t("assess", "assess", "VERB", 3, "advcl")
          .e(d, 5, "obj")
          .t(".", ".", "PUNCT", 3, "punct")
          .mark(1, 1, "COMPOUND", c.cid)
          .mark(6, 6, "DISEASE", d.cid);
      break;
  }
  return b.s;
}

// Three entities; the extra compound pads the candidate pairs with a
// guaranteed-Null one.
Sentence distractor_tpl(const std::string& sid, const Ent& c, const Ent& d,
                        const Ent& extra) {
  SentenceBuilder b(sid);
  b.e(c, 7, "nsubj:pass")
      .t(",", ",", "PUNCT", 3, "punct")
      .e(extra, 1, "conj")
      .t("and", "and", "CCONJ", 5, "cc")
      .e(d, 1, "conj")
      .t("were", "be", "AUX", 7, "aux:pass")
      .t("mentioned", "mention", "VERB", 0, "root")
      .t("in", "in", "ADP", 10, "case")
      .t("the", "the", "DET", 10, "det")
      .t("report", "report", "NOUN", 7, "obl")
      .t(".", ".", "PUNCT", 7, "punct")
      .mark(1, 1, "COMPOUND", c.cid)
      .mark(3, 3, "COMPOUND", extra.cid)
      .mark(5, 5, "DISEASE", d.cid);
  return b.s;
}

// An unrelated pair dressed up with a mapping verb.
Sentence trap_tpl(const std::string& sid, const Ent& c, const Ent& d,
                  const std::string& verb) {
  SentenceBuilder b(sid);
  b.e(c, 3, "nsubj")
      .t("reportedly", "reportedly", "ADV", 3, "advmod")
      .t(s_form(verb), verb, "VERB", 0, "root")
      .e(d, 3, "obj")
      .t(".", ".", "PUNCT", 3, "punct")
      .mark(1, 1, "COMPOUND", c.cid)
      .mark(4, 4, "DISEASE", d.cid);
  return b.s;
}

PairKey truth_key(int c, int d) {
  PairKey k;
  k.a = "C" + std::to_string(c);
  k.b = d % 5 == 0 ? "disease" + std::to_string(d) : "D" + std::to_string(d);
  k.atype = "COMPOUND";
  k.btype = "DISEASE";
  return k;
}

}  // namespace

void SynthParams::validate() const {
  if (sentences == 0) throw Error("sentences must be positive");
  if (cause_pairs <= 0 || treat_pairs <= 0 || null_pairs <= 0) {
    throw Error("pair counts must be positive");
  }
  if (reserve_entities <= 0) throw Error("reserve_entities must be positive");
  for (double p : {relation_prob, explicit_prob, trap_verb_prob, distractor_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("probabilities must lie in [0, 1]");
  }
  if (trap_every < 2) throw Error("trap_every must be at least 2");
  if (eval_stride < 2) throw Error("eval_stride must be at least 2");
  const long long u = cause_pairs + treat_pairs + 20;
  if (null_pairs > u * u / 2) throw Error("null_pairs too large for the entity universe");
}

RelationSchema synth_schema() {
  return RelationSchema{"COMPOUND", "DISEASE", {"cause", "treat"}};
}

MappingConfig synth_mapping() { return MappingConfig{{"cause", "treat"}, 0.4}; }

std::vector<std::pair<std::string, std::vector<double>>> synth_vectors(
    std::uint64_t seed) {
  Rng rng(derive_seed(seed, "vectors"));
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  for (const WordSpec& w : kAnchors) {
    rows.emplace_back(w.token, make_vector(w, rng, false));
  }
  for (const WordSpec& w : kCauseVerbs) {
    rows.emplace_back(w.token, make_vector(w, rng, true));
  }
  for (const WordSpec& w : kTreatVerbs) {
    rows.emplace_back(w.token, make_vector(w, rng, true));
  }
  for (const WordSpec& w : kDecoyVerbs) {
    rows.emplace_back(w.token, make_vector(w, rng, true));
  }
  for (const WordSpec& w : kNullVerbs) {
    rows.emplace_back(w.token, make_vector(w, rng, true));
  }
  for (const WordSpec& w : kCauseNouns) {
    rows.emplace_back(w.token, make_vector(w, rng, true));
  }
  for (const WordSpec& w : kTreatNouns) {
    rows.emplace_back(w.token, make_vector(w, rng, true));
  }
  for (const WordSpec& w : kNeutralWords) {
    rows.emplace_back(w.token, make_vector(w, rng, true));
  }

  VectorSpace space;
  space.dim = kDim;
  for (const auto& [token, vec] : rows) space.table.emplace(token, vec);
  check_space(space);
  return rows;
}

SynthStats generate(const SynthParams& p, const SynthSink& sink) {
  p.validate();
  const RelationSchema schema = synth_schema();

  struct PairDef {
    int c = 0;
    int d = 0;
  };
  std::vector<PairDef> relation_pairs[2];  // [0] cause, [1] treat
  std::map<PairKey, RelationType> truth;
  std::set<std::pair<int, int>> used;
  for (int k = 0; k < p.cause_pairs; ++k) {
    relation_pairs[0].push_back({k, k});
    truth.emplace(truth_key(k, k), "cause");
    used.insert({k, k});
  }
  for (int k = 0; k < p.treat_pairs; ++k) {
    const int i = p.cause_pairs + k;
    relation_pairs[1].push_back({i, i});
    truth.emplace(truth_key(i, i), "treat");
    used.insert({i, i});
  }

  // Null pairs reuse the relation entities in fresh combinations, so entity
  // identity alone cannot separate the classes.
  const int universe = p.cause_pairs + p.treat_pairs + 20;
  std::vector<PairDef> null_pairs;
  std::vector<int> trap_rtype(p.null_pairs, -1);  // -1 = not a trap
  SynthStats stats;
  for (int m = 0; m < p.null_pairs; ++m) {
    int c = m % universe;
    int d = static_cast<int>((7ll * m + 3 + 11ll * (m / universe)) % universe);
    while (used.count({c, d})) d = (d + 1) % universe;
    used.insert({c, d});
    null_pairs.push_back({c, d});
    if (m % p.trap_every == p.trap_every - 1) {
      trap_rtype[m] = (m / p.trap_every) % 2;
      ++stats.trap_pairs;
    }
  }

  static_assert(std::size(kCauseVerbs) == std::size(kTreatVerbs));
  constexpr std::size_t kVerbsPerType = std::size(kCauseVerbs);
  const WordSpec* verb_groups[2] = {kCauseVerbs, kTreatVerbs};
  std::set<PairKey> seen;  // per sentence, reused

  for (std::size_t i = 0; i < p.sentences; ++i) {
    Rng rng(derive_seed(p.seed, "sent", i));
    const bool eval_split =
        static_cast<int>(i % p.eval_stride) == p.eval_stride - 1;
    char sid_buf[24];
    std::snprintf(sid_buf, sizeof sid_buf, "synth-%06zu", i);
    const std::string sid = sid_buf;

    Sentence s;
    if (rng.unit() < p.relation_prob) {
      const int r = static_cast<int>(rng.below(2));
      const PairDef pd =
          relation_pairs[r][rng.below(relation_pairs[r].size())];
      const Ent c = compound_ent(pd.c);
      const Ent d = disease_ent(pd.d);
      if (rng.unit() < p.explicit_prob) {
        const std::string verb = verb_groups[r][rng.below(kVerbsPerType)].token;
        s = explicit_tpl(static_cast<int>(rng.below(5)), sid, c, d, verb);
        ++stats.explicit_sentences;
      } else {
        const int tpl = static_cast<int>(rng.below(3));
        s = r == 0 ? implicit_cause_tpl(tpl, sid, c, d)
                   : implicit_treat_tpl(tpl, sid, c, d);
      }
    } else {
      const std::size_t m = rng.below(null_pairs.size());
      const PairDef pd = null_pairs[m];
      const Ent c = compound_ent(pd.c);
      const Ent d = disease_ent(pd.d);
      if (trap_rtype[m] >= 0 && rng.unit() < p.trap_verb_prob) {
        const std::string verb =
            verb_groups[trap_rtype[m]][rng.below(kVerbsPerType)].token;
        s = trap_tpl(sid, c, d, verb);
        ++stats.trap_sentences;
      } else if (rng.unit() < p.distractor_prob) {
        const Ent extra = compound_ent(
            1000 + static_cast<int>(rng.below(p.reserve_entities)));
        s = distractor_tpl(sid, c, d, extra);
      } else {
        s = null_tpl(static_cast<int>(rng.below(6)), sid, c, d);
      }
    }
    validate_sentence(s);
    if (eval_split) {
      ++stats.eval_sentences;
    } else {
      ++stats.train_sentences;
    }
    if (sink.sentence) sink.sentence(s, eval_split);

    if (sink.gold) {
      seen.clear();
      for (const auto& [a, b] : candidate_pairs(s, schema)) {
        const PairKey key = pair_key(s, a, b, schema);
        if (!seen.insert(key).second) continue;
        Instance inst;
        inst.iid = instance_id(s.sid, key);
        inst.sid = s.sid;
        inst.key = key;
        inst.masked_text = mask_sentence(s, a, b);
        auto it = truth.find(key);
        if (it != truth.end()) inst.label = it->second;
        inst.source = Source::gold;
        auto& counts =
            eval_split ? stats.eval_class_counts : stats.train_class_counts;
        ++counts[inst.label ? *inst.label : "Null"];
        if (eval_split) {
          ++stats.gold_eval_instances;
        } else {
          ++stats.gold_train_instances;
        }
        sink.gold(inst, eval_split);
      }
    }
  }
  return stats;
}

SynthBundle generate(const SynthParams& p) {
  SynthBundle out;
  SynthSink sink;
  sink.sentence = [&](const Sentence& s, bool eval_split) {
    (eval_split ? out.eval : out.train).sentences.push_back(s);
  };
  sink.gold = [&](const Instance& inst, bool eval_split) {
    (eval_split ? out.gold_eval : out.gold_train).instances.push_back(inst);
  };
  out.stats = generate(p, sink);
  out.gold_train.recount();
  out.gold_eval.recount();
  return out;
}

SynthStats write_synth(const SynthParams& p, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir + "/" + name, std::ios::binary);
    if (!out) throw Error("cannot write " + dir + "/" + name);
    return out;
  };
  std::ofstream corpus_train = open("corpus_train.jsonl");
  std::ofstream corpus_eval = open("corpus_eval.jsonl");
  std::ofstream gold_train = open("gold_train.jsonl");
  std::ofstream gold_eval = open("gold_eval.jsonl");

  SynthSink sink;
  sink.sentence = [&](const Sentence& s, bool eval_split) {
    (eval_split ? corpus_eval : corpus_train) << sentence_record(s) << '\n';
  };
  sink.gold = [&](const Instance& inst, bool eval_split) {
    (eval_split ? gold_eval : gold_train) << instance_record(inst) << '\n';
  };
  const SynthStats stats = generate(p, sink);
  for (auto* f : {&corpus_train, &corpus_eval, &gold_train, &gold_eval}) {
    if (!*f) throw Error("write failed under " + dir);
  }

  write_vectors(synth_vectors(p.seed), kDim, dir + "/vectors.txt");

  json summary{
      {"params",
       {{"seed", p.seed},
        {"sentences", p.sentences},
        {"cause_pairs", p.cause_pairs},
        {"treat_pairs", p.treat_pairs},
        {"null_pairs", p.null_pairs},
        {"relation_prob", p.relation_prob},
        {"explicit_prob", p.explicit_prob},
        {"trap_verb_prob", p.trap_verb_prob},
        {"distractor_prob", p.distractor_prob},
        {"trap_every", p.trap_every},
        {"eval_stride", p.eval_stride}}},
      {"train_sentences", stats.train_sentences},
      {"eval_sentences", stats.eval_sentences},
      {"explicit_sentences", stats.explicit_sentences},
      {"trap_sentences", stats.trap_sentences},
      {"trap_pairs", stats.trap_pairs},
      {"gold_train_instances", stats.gold_train_instances},
      {"gold_eval_instances", stats.gold_eval_instances},
      {"train_class_counts", stats.train_class_counts},
      {"eval_class_counts", stats.eval_class_counts}};
  std::ofstream summary_out = open("synth_summary.json");
  summary_out << summary.dump(2) << '\n';
  if (!summary_out) throw Error("cannot write " + dir + "/synth_summary.json");
  return stats;
}

}  // namespace relx
