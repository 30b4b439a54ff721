#include "relx/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "relx/error.hpp"

namespace relx {

using json = nlohmann::json;

std::string to_string(const PairKey& key) {
  return key.a + "|" + key.b + "|" + key.atype + "|" + key.btype;
}

namespace {

[[noreturn]] void record_error(std::size_t line_no, const std::string& what) {
  throw Error("line " + std::to_string(line_no) + ": " + what);
}

const json& need(const json& j, const char* field, std::size_t line_no) {
  auto it = j.find(field);
  if (it == j.end()) {
    record_error(line_no, std::string("missing field '") + field + "'");
  }
  return *it;
}

std::string need_string(const json& j, const char* field, std::size_t line_no) {
  const json& v = need(j, field, line_no);
  if (!v.is_string()) {
    record_error(line_no, std::string("field '") + field + "' must be a string");
  }
  return v.get<std::string>();
}

int need_int(const json& j, const char* field, std::size_t line_no) {
  const json& v = need(j, field, line_no);
  if (!v.is_number_integer()) {
    record_error(line_no, std::string("field '") + field + "' must be an integer");
  }
  return v.get<int>();
}

}  // namespace

Sentence parse_sentence_record(const std::string& line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    record_error(line_no, std::string("invalid record: ") + e.what());
  }
  if (!j.is_object()) record_error(line_no, "record must be an object");

  Sentence s;
  s.sid = need_string(j, "sid", line_no);
  const json& toks = need(j, "tokens", line_no);
  if (!toks.is_array() || toks.empty()) {
    record_error(line_no, "field 'tokens' must be a non-empty array");
  }
  int index = 0;
  for (const json& t : toks) {
    Token tok;
    tok.index = ++index;
    tok.form = need_string(t, "form", line_no);
    tok.lemma = need_string(t, "lemma", line_no);
    tok.upos = need_string(t, "upos", line_no);
    tok.head = need_int(t, "head", line_no);
    tok.deprel = need_string(t, "deprel", line_no);
    s.tokens.push_back(std::move(tok));
  }
  if (auto it = j.find("entities"); it != j.end()) {
    if (!it->is_array()) record_error(line_no, "field 'entities' must be an array");
    for (const json& e : *it) {
      EntityMention m;
      m.start = need_int(e, "start", line_no);
      m.end = need_int(e, "end", line_no);
      m.etype = need_string(e, "etype", line_no);
      if (auto cid = e.find("cid"); cid != e.end() && !cid->is_null()) {
        if (!cid->is_string()) record_error(line_no, "field 'cid' must be a string");
        m.cid = cid->get<std::string>();
      }
      s.entities.push_back(std::move(m));
    }
  }
  return s;
}

std::string sentence_record(const Sentence& s) {
  json toks = json::array();
  for (const Token& t : s.tokens) {
    toks.push_back({{"form", t.form},
                    {"lemma", t.lemma},
                    {"upos", t.upos},
                    {"head", t.head},
                    {"deprel", t.deprel}});
  }
  json ents = json::array();
  for (const EntityMention& m : s.entities) {
    json e = {{"start", m.start}, {"end", m.end}, {"etype", m.etype}};
    if (!m.cid.empty()) e["cid"] = m.cid;
    ents.push_back(std::move(e));
  }
  json j = {{"sid", s.sid}, {"tokens", std::move(toks)}, {"entities", std::move(ents)}};
  return j.dump();
}

void validate_sentence(const Sentence& s) {
  const int n = s.size();
  if (s.sid.empty()) throw Error("sentence with empty sid");
  int roots = 0;
  for (const Token& t : s.tokens) {
    if (t.head < 0 || t.head > n) {
      throw Error("sentence " + s.sid + ": token " + std::to_string(t.index) +
                  " head " + std::to_string(t.head) + " out of range");
    }
    if (t.head == t.index) {
      throw Error("sentence " + s.sid + ": token " + std::to_string(t.index) +
                  " is its own head");
    }
    if (t.head == 0) ++roots;
  }
  if (roots != 1) {
    throw Error("sentence " + s.sid + ": not a tree (" + std::to_string(roots) +
                " roots)");
  }
  // Walking up from every token must reach the root without exceeding n
  // steps; otherwise the head links contain a cycle.
  for (const Token& t : s.tokens) {
    int cur = t.index;
    int steps = 0;
    while (cur != 0) {
      cur = s.token(cur).head;
      if (++steps > n) {
        throw Error("sentence " + s.sid + ": not a tree (cycle through token " +
                    std::to_string(t.index) + ")");
      }
    }
  }
  for (const EntityMention& m : s.entities) {
    if (m.etype.empty()) throw Error("sentence " + s.sid + ": entity with empty etype");
    if (m.start < 1 || m.end < m.start || m.end > n) {
      throw Error("sentence " + s.sid + ": entity span [" +
                  std::to_string(m.start) + "," + std::to_string(m.end) +
                  "] out of range");
    }
  }
  for (std::size_t i = 0; i < s.entities.size(); ++i) {
    for (std::size_t k = i + 1; k < s.entities.size(); ++k) {
      const EntityMention& x = s.entities[i];
      const EntityMention& y = s.entities[k];
      if (x.etype == y.etype && x.start <= y.end && y.start <= x.end) {
        throw Error("sentence " + s.sid + ": overlapping " + x.etype + " spans");
      }
    }
  }
}

void for_each_sentence(const std::string& path,
                       const std::function<void(Sentence&&)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    Sentence s = parse_sentence_record(line, line_no);
    validate_sentence(s);
    fn(std::move(s));
  }
}

Corpus load_corpus(const std::string& path) {
  Corpus c;
  std::unordered_set<std::string> seen;
  for_each_sentence(path, [&](Sentence&& s) {
    if (!seen.insert(s.sid).second) {
      throw Error("duplicate sentence id: " + s.sid);
    }
    c.sentences.push_back(std::move(s));
  });
  return c;
}

void write_corpus(const Corpus& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus file: " + path);
  for (const Sentence& s : c.sentences) out << sentence_record(s) << '\n';
  if (!out) throw Error("write failed: " + path);
}

std::string canonical_entity(const Sentence& s, const EntityMention& m) {
  if (!m.cid.empty()) return m.cid;
  std::string out;
  for (int i = m.start; i <= m.end; ++i) {
    if (!out.empty()) out += ' ';
    for (char ch : s.token(i).lemma) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
  }
  return out;
}

std::string mask_sentence(const Sentence& s, const EntityMention& a,
                          const EntityMention& b) {
  if (a.start <= b.end && b.start <= a.end) {
    throw Error("sentence " + s.sid + ": cannot mask overlapping mentions");
  }
  const EntityMention& first = a.start < b.start ? a : b;
  const EntityMention& second = a.start < b.start ? b : a;
  std::string out;
  auto append = [&out](const std::string& piece) {
    if (!out.empty()) out += ' ';
    out += piece;
  };
  int i = 1;
  while (i <= s.size()) {
    if (i == first.start) {
      append(first.etype);
      i = first.end + 1;
    } else if (i == second.start) {
      append(second.etype);
      i = second.end + 1;
    } else {
      append(s.token(i).form);
      ++i;
    }
  }
  return out;
}

PairKey pair_key(const Sentence& s, const EntityMention& a,
                 const EntityMention& b, const RelationSchema& schema) {
  const EntityMention* slot_a = nullptr;
  const EntityMention* slot_b = nullptr;
  if (a.etype == schema.atype && b.etype == schema.btype) {
    slot_a = &a;
    slot_b = &b;
  } else if (b.etype == schema.atype && a.etype == schema.btype) {
    slot_a = &b;
    slot_b = &a;
  } else {
    throw Error("sentence " + s.sid + ": entity type pair (" + a.etype + ", " +
                b.etype + ") does not match schema (" + schema.atype + ", " +
                schema.btype + ")");
  }
  PairKey key;
  key.a = canonical_entity(s, *slot_a);
  key.b = canonical_entity(s, *slot_b);
  key.atype = schema.atype;
  key.btype = schema.btype;
  if (key.a.empty() || key.b.empty()) {
    throw Error("sentence " + s.sid + ": empty canonical entity string");
  }
  // Same-type schemas have no slot preference; order canonically.
  if (schema.atype == schema.btype && key.b < key.a) std::swap(key.a, key.b);
  return key;
}

}  // namespace relx
