#include "relx/convert.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "relx/error.hpp"

namespace relx {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line_no,
                       const std::string& what) {
  throw Error(path + ":" + std::to_string(line_no) + ": " + what);
}

int parse_int(const std::string& path, std::size_t line_no,
              const std::string& field, const char* what) {
  int value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    fail(path, line_no, std::string("bad ") + what + " '" + field + "'");
  }
  return value;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

// Plain token ids only; ranges and decimals mark lines we skip.
bool plain_token_id(const std::string& id) {
  if (id.empty()) return false;
  for (char c : id) {
    if (c == '-' || c == '.') return false;
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

Corpus load_conllu(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);

  Corpus c;
  Sentence current;
  bool in_sentence = false;
  std::size_t sentence_start = 0;
  int next_index = 1;
  std::string line;
  std::size_t line_no = 0;

  auto flush = [&]() {
    if (!in_sentence) return;
    if (current.sid.empty()) {
      fail(path, sentence_start, "sentence has no '# sent_id' comment");
    }
    if (current.tokens.empty()) {
      fail(path, sentence_start, "sentence " + current.sid + " has no tokens");
    }
    c.sentences.push_back(std::move(current));
    current = Sentence{};
    in_sentence = false;
    next_index = 1;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (!in_sentence) {
      in_sentence = true;
      sentence_start = line_no;
    }
    if (line[0] == '#') {
      const std::string marker = "# sent_id";
      if (line.compare(0, marker.size(), marker) == 0) {
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(path, line_no, "malformed sent_id");
        std::size_t begin = eq + 1;
        while (begin < line.size() && line[begin] == ' ') ++begin;
        current.sid = line.substr(begin);
        if (current.sid.empty()) fail(path, line_no, "empty sent_id");
      }
      continue;
    }

    const std::vector<std::string> f = split_tabs(line);
    if (f.size() < 8) fail(path, line_no, "expected at least 8 tab-separated columns");
    if (!plain_token_id(f[0])) continue;  // multiword range or empty node

    Token t;
    t.index = parse_int(path, line_no, f[0], "token id");
    if (t.index != next_index) {
      fail(path, line_no, "token ids must be consecutive from 1");
    }
    ++next_index;
    t.form = f[1];
    t.lemma = f[2];
    t.upos = f[3];
    if (t.form.empty() || t.lemma.empty() || t.upos.empty() || t.form == "_" ||
        t.lemma == "_" || t.upos == "_") {
      fail(path, line_no, "FORM, LEMMA, and UPOS must be filled");
    }
    if (f[6] == "_") fail(path, line_no, "HEAD must be filled");
    t.head = parse_int(path, line_no, f[6], "head");
    t.deprel = f[7];
    current.tokens.push_back(std::move(t));
  }
  flush();
  return c;
}

void attach_entities(Corpus& c, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);

  std::unordered_map<std::string, Sentence*> by_sid;
  by_sid.reserve(c.sentences.size());
  for (Sentence& s : c.sentences) by_sid.emplace(s.sid, &s);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    const std::vector<std::string> f = split_tabs(line);
    if (f.size() != 4 && f.size() != 5) {
      fail(path, line_no, "expected 4 or 5 tab-separated fields");
    }
    auto it = by_sid.find(f[0]);
    if (it == by_sid.end()) fail(path, line_no, "unknown sentence id '" + f[0] + "'");

    EntityMention m;
    m.start = parse_int(path, line_no, f[1], "start");
    m.end = parse_int(path, line_no, f[2], "end");
    m.etype = f[3];
    if (m.etype.empty()) fail(path, line_no, "empty entity type");
    if (f.size() == 5) m.cid = f[4];
    it->second->entities.push_back(std::move(m));
  }
}

Corpus convert_corpus(const std::string& conllu_path,
                      const std::string& entities_path) {
  Corpus c = load_conllu(conllu_path);
  attach_entities(c, entities_path);
  for (const Sentence& s : c.sentences) validate_sentence(s);
  return c;
}

}  // namespace relx
