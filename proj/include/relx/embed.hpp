#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace relx {

// A relation type is identified by its name; the Null class is represented
// by an absent optional wherever it can occur, never by a name.
using RelationType = std::string;

// Pre-trained word vectors, immutable after load.
struct VectorSpace {
  int dim = 0;
  std::unordered_map<std::string, std::vector<double>> table;

  const std::vector<double>* find(const std::string& token) const {
    auto it = table.find(token);
    return it == table.end() ? nullptr : &it->second;
  }
};

// Loads word2vec text format: header "V D", then V rows "token x1 ... xD".
// Streams line by line; duplicate tokens keep the first occurrence.
VectorSpace load_vectors(const std::string& path);

void write_vectors(const std::vector<std::pair<std::string, std::vector<double>>>& rows,
                   int dim, const std::string& path);

// Standard cosine similarity, clamped to [-1, 1]. Returns 0 when either
// vector has zero norm. Throws on length mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

struct MappingConfig {
  std::vector<RelationType> relation_types;  // order breaks ties
  double threshold = 0.4;
};

// Throws if the threshold is out of [0, 1], the type list is empty, or a
// relation-type name is missing from the vocabulary.
void check_mapping_config(const MappingConfig& cfg, const VectorSpace& space);

// Mean of the vectors of in-vocabulary lemmas; absent when every lemma is
// out of vocabulary.
std::optional<std::vector<double>> embed_phrase(
    const std::vector<std::string>& lemmas, const VectorSpace& space);

struct VerbMapping {
  RelationType rtype;
  double similarity = 0.0;
};

// Maps a verb phrase to the most similar relation type, if that similarity
// reaches the threshold (inclusive). Ties go to the earlier configured type.
std::optional<VerbMapping> map_verb(const std::vector<std::string>& phrase,
                                    const MappingConfig& cfg,
                                    const VectorSpace& space);

}  // namespace relx
