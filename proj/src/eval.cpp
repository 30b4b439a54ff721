#include "relx/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "relx/error.hpp"
#include "relx/pathex.hpp"
#include "relx/rng.hpp"

namespace relx {

using json = nlohmann::json;

Metrics prf1(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  if (tp < 0 || fp < 0 || fn < 0) throw Error("prf1: negative count");
  Metrics m;
  if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

void write_predictions(const Predictions& preds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (const Prediction& p : preds) {
    json j{{"iid", p.iid},
           {"label", p.label ? json(*p.label) : json(nullptr)},
           {"probs", json::object()}};
    for (const auto& [rtype, prob] : p.probs) j["probs"][rtype] = prob;
    out << j.dump() << '\n';
  }
  if (!out) throw Error("cannot write " + path);
}

Predictions load_predictions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  Predictions preds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    try {
      Prediction p;
      p.iid = j.at("iid").get<std::string>();
      if (!j.at("label").is_null()) p.label = j.at("label").get<std::string>();
      for (const auto& [rtype, prob] : j.at("probs").items()) {
        p.probs[rtype] = prob.get<double>();
      }
      preds.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return preds;
}

std::map<RelationType, Metrics> score(const WeakDataset& gold,
                                      const Predictions& preds,
                                      const std::vector<RelationType>& relations,
                                      double p_threshold) {
  if (relations.empty()) throw Error("score: no relation types");

  std::unordered_map<std::string, const Prediction*> by_iid;
  by_iid.reserve(preds.size());
  for (const Prediction& p : preds) {
    if (!by_iid.emplace(p.iid, &p).second) {
      throw Error("duplicate prediction for instance " + p.iid);
    }
  }

  auto mismatch = [](const char* what, const std::vector<std::string>& ids) {
    std::string msg = what + std::string(":");
    for (std::size_t i = 0; i < ids.size() && i < 5; ++i) msg += " " + ids[i];
    if (ids.size() > 5) msg += " (+" + std::to_string(ids.size() - 5) + " more)";
    throw Error(msg);
  };
  std::set<std::string> gold_iids;
  for (const Instance& inst : gold.instances) gold_iids.insert(inst.iid);
  std::vector<std::string> bad;
  for (const Prediction& p : preds) {
    if (!gold_iids.count(p.iid)) bad.push_back(p.iid);
  }
  if (!bad.empty()) mismatch("predictions for unknown instances", bad);
  for (const std::string& iid : gold_iids) {
    if (!by_iid.count(iid)) bad.push_back(iid);
  }
  if (!bad.empty()) mismatch("gold instances without predictions", bad);

  std::map<RelationType, Metrics> out;
  for (const RelationType& rtype : relations) {
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (const Instance& inst : gold.instances) {
      const bool is_gold = inst.label && *inst.label == rtype;
      const Prediction& p = *by_iid.at(inst.iid);
      bool positive;
      if (!p.probs.empty()) {
        auto pit = p.probs.find(rtype);
        positive = pit != p.probs.end() && pit->second >= p_threshold;
      } else {
        positive = p.label && *p.label == rtype;
      }
      if (positive && is_gold) ++tp;
      else if (positive) ++fp;
      else if (is_gold) ++fn;
    }
    out[rtype] = prf1(tp, fp, fn);
  }
  return out;
}

Predictions cooccurrence_baseline(const WeakDataset& gold,
                                  const std::vector<RelationType>& relations) {
  if (relations.empty()) throw Error("cooccurrence_baseline: no relation types");
  Predictions preds;
  preds.reserve(gold.instances.size());
  for (const Instance& inst : gold.instances) {
    Prediction p;
    p.iid = inst.iid;
    p.label = relations.front();
    for (const RelationType& rtype : relations) p.probs[rtype] = 1.0;
    preds.push_back(std::move(p));
  }
  return preds;
}

Predictions spvm_baseline(const WeakDataset& gold, const Corpus& c,
                          const RelationSchema& schema,
                          const MappingConfig& cfg, const VectorSpace& space) {
  std::unordered_map<std::string, const Sentence*> by_sid;
  by_sid.reserve(c.sentences.size());
  for (const Sentence& s : c.sentences) by_sid.emplace(s.sid, &s);

  Predictions preds;
  std::vector<std::string> unresolved;
  for (const Instance& inst : gold.instances) {
    auto sit = by_sid.find(inst.sid);
    if (sit == by_sid.end()) {
      unresolved.push_back(inst.iid);
      continue;
    }
    auto pair = find_pair(*sit->second, inst.key, schema);
    if (!pair) {
      unresolved.push_back(inst.iid);
      continue;
    }
    Prediction p;
    p.iid = inst.iid;
    if (auto seed = extract_seed(*sit->second, pair->first, pair->second,
                                 schema, cfg, space)) {
      p.label = seed->rtype;
    }
    preds.push_back(std::move(p));
  }
  if (!unresolved.empty()) {
    std::string msg = "eval instances not resolvable against the corpus:";
    for (std::size_t i = 0; i < unresolved.size() && i < 5; ++i) {
      msg += " " + unresolved[i];
    }
    if (unresolved.size() > 5) {
      msg += " (+" + std::to_string(unresolved.size() - 5) + " more)";
    }
    throw Error(msg);
  }
  return preds;
}

std::map<RelationType, MetricsSummary> summarize_runs(
    const std::vector<std::map<RelationType, Metrics>>& runs) {
  if (runs.empty()) throw Error("summarize_runs: no runs");
  for (const auto& run : runs) {
    if (run.size() != runs.front().size()) {
      throw Error("summarize_runs: runs cover different relation types");
    }
  }

  std::map<RelationType, MetricsSummary> out;
  const double n = static_cast<double>(runs.size());
  for (const auto& [rtype, first] : runs.front()) {
    MetricsSummary sum;
    sum.runs = static_cast<int>(runs.size());
    for (const auto& run : runs) {
      auto it = run.find(rtype);
      if (it == run.end()) {
        throw Error("summarize_runs: runs cover different relation types");
      }
      sum.mean.precision += it->second.precision;
      sum.mean.recall += it->second.recall;
      sum.mean.f1 += it->second.f1;
    }
    sum.mean.precision /= n;
    sum.mean.recall /= n;
    sum.mean.f1 /= n;
    for (const auto& run : runs) {
      const Metrics& m = run.at(rtype);
      const double dp = m.precision - sum.mean.precision;
      const double dr = m.recall - sum.mean.recall;
      const double df = m.f1 - sum.mean.f1;
      sum.variance.precision += dp * dp;
      sum.variance.recall += dr * dr;
      sum.variance.f1 += df * df;
    }
    sum.variance.precision /= n;
    sum.variance.recall /= n;
    sum.variance.f1 /= n;
    out[rtype] = sum;
  }
  return out;
}

std::string report_table(const std::vector<ReportRow>& rows) {
  std::size_t method_w = std::string("Method").size();
  std::size_t rel_w = std::string("Relation").size();
  for (const ReportRow& r : rows) {
    method_w = std::max(method_w, r.method.size());
    rel_w = std::max(rel_w, r.rtype.size());
  }

  std::ostringstream out;
  auto pad = [&](const std::string& s, std::size_t w) {
    out << s << std::string(w - s.size(), ' ');
  };
  pad("Method", method_w + 2);
  pad("Relation", rel_w + 2);
  out << "Precision  Recall   F1\n";
  for (const ReportRow& r : rows) {
    pad(r.method, method_w + 2);
    pad(r.rtype, rel_w + 2);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%9.1f  %6.1f  %5.1f\n",
                  100.0 * r.mean.precision, 100.0 * r.mean.recall,
                  100.0 * r.mean.f1);
    out << buf;
  }
  return out.str();
}

std::string report_json(const std::vector<ReportRow>& rows,
                        const std::map<std::string, std::string>& context) {
  json j{{"context", json::object()}, {"rows", json::array()}};
  for (const auto& [key, value] : context) j["context"][key] = value;
  for (const ReportRow& r : rows) {
    j["rows"].push_back(json{{"method", r.method},
                             {"relation", r.rtype},
                             {"precision", r.mean.precision},
                             {"recall", r.mean.recall},
                             {"f1", r.mean.f1},
                             {"variance",
                              {{"precision", r.variance.precision},
                               {"recall", r.variance.recall},
                               {"f1", r.variance.f1}}},
                             {"runs", r.runs}});
  }
  return j.dump(2) + "\n";
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace relx
