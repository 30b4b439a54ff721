#include "relx/embed.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "relx/error.hpp"

namespace relx {

namespace {

[[noreturn]] void file_error(const std::string& path, std::size_t line_no,
                             const std::string& what) {
  throw Error(path + ":" + std::to_string(line_no) + ": " + what);
}

// Splits off the next whitespace-delimited field of `line` starting at pos;
// returns false at end of line.
bool next_field(const std::string& line, std::size_t& pos, std::size_t& begin,
                std::size_t& len) {
  while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
  if (pos >= line.size()) return false;
  begin = pos;
  while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') ++pos;
  len = pos - begin;
  return true;
}

}  // namespace

VectorSpace load_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vectors file: " + path);

  std::string line;
  if (!std::getline(in, line)) file_error(path, 1, "empty file");
  long vocab = 0, dim = 0;
  {
    std::size_t pos = 0, b = 0, l = 0;
    if (!next_field(line, pos, b, l) ||
        std::from_chars(line.data() + b, line.data() + b + l, vocab).ec != std::errc{}) {
      file_error(path, 1, "header must be \"V D\"");
    }
    if (!next_field(line, pos, b, l) ||
        std::from_chars(line.data() + b, line.data() + b + l, dim).ec != std::errc{}) {
      file_error(path, 1, "header must be \"V D\"");
    }
    if (next_field(line, pos, b, l)) file_error(path, 1, "header must be \"V D\"");
  }
  if (vocab <= 0) file_error(path, 1, "vocabulary size must be positive");
  if (dim <= 0) file_error(path, 1, "dimensionality must be positive");

  VectorSpace space;
  space.dim = static_cast<int>(dim);
  space.table.reserve(static_cast<std::size_t>(vocab));

  for (long row = 0; row < vocab; ++row) {
    const std::size_t line_no = static_cast<std::size_t>(row) + 2;
    if (!std::getline(in, line)) {
      file_error(path, line_no, "expected " + std::to_string(vocab) +
                                    " rows, file ended early");
    }
    std::size_t pos = 0, b = 0, l = 0;
    if (!next_field(line, pos, b, l)) file_error(path, line_no, "blank row");
    std::string token = line.substr(b, l);
    std::vector<double> vec;
    vec.reserve(static_cast<std::size_t>(dim));
    while (next_field(line, pos, b, l)) {
      double v = 0.0;
      auto res = std::from_chars(line.data() + b, line.data() + b + l, v);
      if (res.ec != std::errc{} || res.ptr != line.data() + b + l) {
        file_error(path, line_no, "bad number '" + line.substr(b, l) + "'");
      }
      vec.push_back(v);
    }
    if (static_cast<long>(vec.size()) != dim) {
      file_error(path, line_no, "expected " + std::to_string(dim) +
                                    " values, got " + std::to_string(vec.size()));
    }
    space.table.emplace(std::move(token), std::move(vec));  // keeps first on dup
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
      file_error(path, static_cast<std::size_t>(vocab) + 2,
                 "more rows than the header declares");
    }
  }
  return space;
}

void write_vectors(const std::vector<std::pair<std::string, std::vector<double>>>& rows,
                   int dim, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write vectors file: " + path);
  out << rows.size() << ' ' << dim << '\n';
  char buf[32];
  for (const auto& [token, vec] : rows) {
    out << token;
    for (double v : vec) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ' ' << buf;
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error("cosine: length mismatch (" + std::to_string(u.size()) + " vs " +
                std::to_string(v.size()) + ")");
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  double c = dot / (std::sqrt(nu) * std::sqrt(nv));
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return c;
}

void check_mapping_config(const MappingConfig& cfg, const VectorSpace& space) {
  if (cfg.relation_types.empty()) {
    throw Error("mapping config: at least one relation type required");
  }
  if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0)) {
    throw Error("mapping config: threshold must be in [0, 1]");
  }
  for (const RelationType& r : cfg.relation_types) {
    if (r.empty()) throw Error("mapping config: empty relation type name");
    if (!space.find(r)) {
      throw Error("relation type '" + r + "' missing from vector vocabulary");
    }
  }
}

std::optional<std::vector<double>> embed_phrase(
    const std::vector<std::string>& lemmas, const VectorSpace& space) {
  std::vector<double> sum(static_cast<std::size_t>(space.dim), 0.0);
  int hits = 0;
  for (const std::string& lemma : lemmas) {
    if (const std::vector<double>* vec = space.find(lemma)) {
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*vec)[i];
      ++hits;
    }
  }
  if (hits == 0) return std::nullopt;
  for (double& v : sum) v /= hits;
  return sum;
}

std::optional<VerbMapping> map_verb(const std::vector<std::string>& phrase,
                                    const MappingConfig& cfg,
                                    const VectorSpace& space) {
  check_mapping_config(cfg, space);
  auto embedded = embed_phrase(phrase, space);
  if (!embedded) return std::nullopt;

  const RelationType* best = nullptr;
  double best_sim = 0.0;
  for (const RelationType& r : cfg.relation_types) {
    const double sim = cosine(*embedded, *space.find(r));
    if (best == nullptr || sim > best_sim) {  // strict: ties keep earlier type
      best = &r;
      best_sim = sim;
    }
  }
  if (best_sim >= cfg.threshold) return VerbMapping{*best, best_sim};
  return std::nullopt;
}

}  // namespace relx
