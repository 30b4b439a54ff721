#include "relx/weaklabel.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "relx/error.hpp"
#include "relx/rng.hpp"

namespace relx {

using json = nlohmann::json;

std::string to_string(Source s) {
  switch (s) {
    case Source::seed: return "seed";
    case Source::distant: return "distant";
    case Source::negative: return "negative";
    case Source::gold: return "gold";
  }
  return "negative";
}

Source source_from_string(const std::string& s) {
  if (s == "seed") return Source::seed;
  if (s == "distant") return Source::distant;
  if (s == "negative") return Source::negative;
  if (s == "gold") return Source::gold;
  throw Error("unknown instance source: " + s);
}

void WeakDataset::recount() {
  class_counts.clear();
  for (const Instance& inst : instances) {
    ++class_counts[inst.label ? *inst.label : "Null"];
  }
}

std::vector<std::pair<EntityMention, EntityMention>> candidate_pairs(
    const Sentence& s, const RelationSchema& schema) {
  std::vector<std::pair<EntityMention, EntityMention>> out;
  for (std::size_t i = 0; i < s.entities.size(); ++i) {
    for (std::size_t k = i + 1; k < s.entities.size(); ++k) {
      const EntityMention& x = s.entities[i];
      const EntityMention& y = s.entities[k];
      const EntityMention* a = nullptr;
      const EntityMention* b = nullptr;
      if (x.etype == schema.atype && y.etype == schema.btype) {
        a = &x;
        b = &y;
      } else if (y.etype == schema.atype && x.etype == schema.btype) {
        a = &y;
        b = &x;
      } else {
        continue;
      }
      if (canonical_entity(s, *a) == canonical_entity(s, *b)) continue;  // self
      out.emplace_back(*a, *b);
    }
  }
  return out;
}

std::string instance_id(const std::string& sid, const PairKey& key) {
  std::uint64_t h = fnv1a64(sid);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(key.a, h);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(key.b, h);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(key.atype, h);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(key.btype, h);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<std::pair<EntityMention, EntityMention>> find_pair(
    const Sentence& s, const PairKey& key, const RelationSchema& schema) {
  for (const auto& pair : candidate_pairs(s, schema)) {
    if (pair_key(s, pair.first, pair.second, schema) == key) return pair;
  }
  return std::nullopt;
}

std::optional<RelationType> resolve_pair_label(const SeedSet& seeds,
                                               const PairKey& key,
                                               const RelationSchema& schema) {
  auto it = seeds.index.find(key);
  if (it == seeds.index.end() || it->second.empty()) return std::nullopt;

  std::map<RelationType, std::pair<std::int64_t, double>> stats;  // count, max sim
  for (std::size_t pos : it->second) {
    const SeedRelation& s = seeds.seeds[pos];
    auto& [count, max_sim] = stats[s.rtype];
    ++count;
    max_sim = std::max(max_sim, s.similarity);
  }
  const RelationType* best = nullptr;
  std::int64_t best_count = 0;
  double best_sim = 0.0;
  for (const RelationType& r : schema.relations) {
    auto sit = stats.find(r);
    if (sit == stats.end()) continue;
    const auto& [count, max_sim] = sit->second;
    if (best == nullptr || count > best_count ||
        (count == best_count && max_sim > best_sim)) {
      best = &r;
      best_count = count;
      best_sim = max_sim;
    }
  }
  if (best == nullptr) return std::nullopt;  // seeds exist but for foreign types
  return *best;
}

std::vector<Instance> annotate_sentence(const Sentence& s, const SeedSet& seeds,
                                        const RelationSchema& schema) {
  std::vector<Instance> out;
  std::set<PairKey> seen;
  for (const auto& [a, b] : candidate_pairs(s, schema)) {
    Instance inst;
    inst.key = pair_key(s, a, b, schema);
    if (!seen.insert(inst.key).second) continue;
    inst.sid = s.sid;
    inst.iid = instance_id(s.sid, inst.key);
    inst.masked_text = mask_sentence(s, a, b);
    inst.label = resolve_pair_label(seeds, inst.key, schema);
    if (!inst.label) {
      inst.source = Source::negative;
    } else {
      // Distinguish the sentences the evidence came from.
      inst.source = Source::distant;
      if (auto it = seeds.index.find(inst.key); it != seeds.index.end()) {
        for (std::size_t pos : it->second) {
          const SeedRelation& seed = seeds.seeds[pos];
          if (seed.sid == s.sid && seed.rtype == *inst.label) {
            inst.source = Source::seed;
            break;
          }
        }
      }
    }
    out.push_back(std::move(inst));
  }
  return out;
}

WeakDataset annotate(const Corpus& c, const SeedSet& seeds,
                     const RelationSchema& schema) {
  WeakDataset d;
  for (const Sentence& s : c.sentences) {
    for (Instance& inst : annotate_sentence(s, seeds, schema)) {
      d.instances.push_back(std::move(inst));
    }
  }
  d.recount();
  return d;
}

std::string instance_record(const Instance& inst) {
  json j = {{"iid", inst.iid},
            {"sid", inst.sid},
            {"key",
             {{"a", inst.key.a},
              {"b", inst.key.b},
              {"atype", inst.key.atype},
              {"btype", inst.key.btype}}},
            {"masked_text", inst.masked_text},
            {"label", inst.label ? json(*inst.label) : json("Null")},
            {"source", to_string(inst.source)}};
  return j.dump();
}

Instance parse_instance_record(const std::string& line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error("line " + std::to_string(line_no) + ": invalid instance record: " +
                e.what());
  }
  try {
    Instance inst;
    inst.iid = j.at("iid").get<std::string>();
    inst.sid = j.at("sid").get<std::string>();
    const json& key = j.at("key");
    inst.key.a = key.at("a").get<std::string>();
    inst.key.b = key.at("b").get<std::string>();
    inst.key.atype = key.at("atype").get<std::string>();
    inst.key.btype = key.at("btype").get<std::string>();
    inst.masked_text = j.at("masked_text").get<std::string>();
    const std::string label = j.at("label").get<std::string>();
    if (label != "Null") inst.label = label;
    inst.source = source_from_string(j.at("source").get<std::string>());
    validate_instance(inst);
    return inst;
  } catch (const json::exception& e) {
    throw Error("line " + std::to_string(line_no) + ": invalid instance record: " +
                e.what());
  }
}

void validate_instance(const Instance& inst) {
  auto count_tokens = [](const std::string& text, const std::string& what) {
    std::istringstream in(text);
    std::string tok;
    int n = 0;
    while (in >> tok) {
      if (tok == what) ++n;
    }
    return n;
  };
  const int want_a = inst.key.atype == inst.key.btype ? 2 : 1;
  if (count_tokens(inst.masked_text, inst.key.atype) != want_a ||
      (inst.key.atype != inst.key.btype &&
       count_tokens(inst.masked_text, inst.key.btype) != 1)) {
    throw Error("instance " + inst.iid +
                ": masked text must contain each type placeholder exactly once");
  }
}

void export_dataset(const WeakDataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write dataset file: " + path);
  for (const Instance& inst : d.instances) out << instance_record(inst) << '\n';
  if (!out) throw Error("write failed: " + path);
}

WeakDataset import_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file: " + path);
  WeakDataset d;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    d.instances.push_back(parse_instance_record(line, line_no));
  }
  d.recount();
  return d;
}

}  // namespace relx
