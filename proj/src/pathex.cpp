#include "relx/pathex.hpp"

#include <algorithm>
#include <deque>
#include <fstream>

#include <json.hpp>

#include "relx/error.hpp"
#include "relx/weaklabel.hpp"

namespace relx {

using json = nlohmann::json;

void SeedSet::add(SeedRelation seed) {
  index[seed.key].push_back(seeds.size());
  seeds.push_back(std::move(seed));
}

int entity_head(const Sentence& s, const EntityMention& m) {
  for (int i = m.start; i <= m.end; ++i) {
    const int head = s.token(i).head;
    if (head < m.start || head > m.end) return i;
  }
  return m.start;
}

DepPath shortest_path(const Sentence& s, int i, int j) {
  const int n = s.size();
  if (i < 1 || i > n || j < 1 || j > n) {
    throw Error("sentence " + s.sid + ": path endpoint out of range");
  }
  if (i == j) {
    throw Error("sentence " + s.sid + ": path endpoints coincide (" +
                std::to_string(i) + ")");
  }
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n) + 1);
  for (const Token& t : s.tokens) {
    if (t.head != 0) {
      adj[static_cast<std::size_t>(t.index)].push_back(t.head);
      adj[static_cast<std::size_t>(t.head)].push_back(t.index);
    }
  }
  std::vector<int> parent(static_cast<std::size_t>(n) + 1, -1);
  std::deque<int> queue{i};
  parent[static_cast<std::size_t>(i)] = i;
  while (!queue.empty() && parent[static_cast<std::size_t>(j)] == -1) {
    const int cur = queue.front();
    queue.pop_front();
    for (int next : adj[static_cast<std::size_t>(cur)]) {
      if (parent[static_cast<std::size_t>(next)] == -1) {
        parent[static_cast<std::size_t>(next)] = cur;
        queue.push_back(next);
      }
    }
  }
  if (parent[static_cast<std::size_t>(j)] == -1) {
    throw Error("sentence " + s.sid + ": tokens " + std::to_string(i) + " and " +
                std::to_string(j) + " are disconnected");
  }
  DepPath path;
  for (int cur = j; cur != i; cur = parent[static_cast<std::size_t>(cur)]) {
    path.token_indices.push_back(cur);
  }
  path.token_indices.push_back(i);
  std::reverse(path.token_indices.begin(), path.token_indices.end());
  return path;
}

std::vector<std::string> path_verbs(const Sentence& s, const DepPath& p) {
  if (p.token_indices.size() < 2) return {};
  std::vector<int> interior(p.token_indices.begin() + 1, p.token_indices.end() - 1);
  std::sort(interior.begin(), interior.end());
  std::vector<std::string> verbs;
  for (int idx : interior) {
    const Token& t = s.token(idx);
    if (t.upos == "VERB" || t.upos == "AUX") verbs.push_back(t.lemma);
  }
  return verbs;
}

std::optional<SeedRelation> extract_seed(const Sentence& s,
                                         const EntityMention& a,
                                         const EntityMention& b,
                                         const RelationSchema& schema,
                                         const MappingConfig& cfg,
                                         const VectorSpace& space) {
  const int head_a = entity_head(s, a);
  const int head_b = entity_head(s, b);
  if (head_a == head_b) return std::nullopt;
  const DepPath path = shortest_path(s, head_a, head_b);
  std::vector<std::string> verbs = path_verbs(s, path);
  if (verbs.empty()) return std::nullopt;
  // Multiple verbs on the path form one n-gram phrase mapped jointly.
  auto mapping = map_verb(verbs, cfg, space);
  if (!mapping) return std::nullopt;
  SeedRelation seed;
  seed.key = pair_key(s, a, b, schema);
  seed.rtype = mapping->rtype;
  seed.similarity = mapping->similarity;
  seed.verbs = std::move(verbs);
  seed.sid = s.sid;
  return seed;
}

SeedSet harvest_seeds(const Corpus& c, const RelationSchema& schema,
                      const MappingConfig& cfg, const VectorSpace& space) {
  SeedSet out;
  for (const Sentence& s : c.sentences) {
    for (const auto& [a, b] : candidate_pairs(s, schema)) {
      if (auto seed = extract_seed(s, a, b, schema, cfg, space)) {
        out.add(std::move(*seed));
      }
    }
  }
  return out;
}

void write_seeds(const SeedSet& seeds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write seeds file: " + path);
  for (const SeedRelation& s : seeds.seeds) {
    json j = {{"key",
               {{"a", s.key.a},
                {"b", s.key.b},
                {"atype", s.key.atype},
                {"btype", s.key.btype}}},
              {"rtype", s.rtype},
              {"similarity", s.similarity},
              {"verbs", s.verbs},
              {"sid", s.sid}};
    out << j.dump() << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

SeedSet load_seeds(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open seeds file: " + path);
  SeedSet out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": invalid seed record: " +
                  e.what());
    }
    try {
      SeedRelation s;
      const json& key = j.at("key");
      s.key.a = key.at("a").get<std::string>();
      s.key.b = key.at("b").get<std::string>();
      s.key.atype = key.at("atype").get<std::string>();
      s.key.btype = key.at("btype").get<std::string>();
      s.rtype = j.at("rtype").get<std::string>();
      s.similarity = j.at("similarity").get<double>();
      s.verbs = j.at("verbs").get<std::vector<std::string>>();
      s.sid = j.at("sid").get<std::string>();
      if (s.verbs.empty()) {
        throw Error(path + ":" + std::to_string(line_no) + ": seed without verbs");
      }
      out.add(std::move(s));
    } catch (const json::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": invalid seed record: " +
                  e.what());
    }
  }
  return out;
}

}  // namespace relx
