#include "relx/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include <json.hpp>

#include "relx/error.hpp"

namespace relx {

using json = nlohmann::json;

void PipelineConfig::validate() const {
  if (schema.atype.empty() || schema.btype.empty()) {
    throw Error("schema entity types must be non-empty");
  }
  if (schema.relations.empty()) throw Error("schema lists no relation types");
  std::set<std::string> seen;
  for (const std::string& r : schema.relations) {
    if (r.empty()) throw Error("relation type names must be non-empty");
    if (r == "Null") throw Error("'Null' is reserved for the absent relation");
    if (!seen.insert(r).second) throw Error("duplicate relation type: " + r);
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error("threshold must lie in [0, 1]");
  }
  if (!(p_threshold >= 0.0 && p_threshold <= 1.0)) {
    throw Error("p_threshold must lie in [0, 1]");
  }
  hyper.validate();
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(path + ": config must be a JSON object");

  static const std::set<std::string> known = {
      "corpus", "vectors", "out",       "schema",
      "threshold", "p_threshold", "hyper"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key)) throw Error(path + ": unknown config key '" + key + "'");
  }

  PipelineConfig cfg;
  try {
    if (j.contains("corpus")) cfg.corpus = j["corpus"].get<std::string>();
    if (j.contains("vectors")) cfg.vectors = j["vectors"].get<std::string>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("schema")) {
      const json& s = j["schema"];
      static const std::set<std::string> schema_keys = {"atype", "btype",
                                                        "relations"};
      for (const auto& [key, value] : s.items()) {
        (void)value;
        if (!schema_keys.count(key)) {
          throw Error(path + ": unknown schema key '" + key + "'");
        }
      }
      cfg.schema.atype = s.at("atype").get<std::string>();
      cfg.schema.btype = s.at("btype").get<std::string>();
      cfg.schema.relations = s.at("relations").get<std::vector<std::string>>();
    }
    if (j.contains("threshold")) cfg.threshold = j["threshold"].get<double>();
    if (j.contains("p_threshold")) {
      cfg.p_threshold = j["p_threshold"].get<double>();
    }
    if (j.contains("hyper")) {
      const json& h = j["hyper"];
      static const std::set<std::string> hyper_keys = {
          "epochs", "learning_rate", "batch_size", "bags", "seed"};
      for (const auto& [key, value] : h.items()) {
        (void)value;
        if (!hyper_keys.count(key)) {
          throw Error(path + ": unknown hyper key '" + key + "'");
        }
      }
      if (h.contains("epochs")) cfg.hyper.epochs = h["epochs"].get<int>();
      if (h.contains("learning_rate")) {
        cfg.hyper.learning_rate = h["learning_rate"].get<double>();
      }
      if (h.contains("batch_size")) {
        cfg.hyper.batch_size = h["batch_size"].get<int>();
      }
      if (h.contains("bags")) cfg.hyper.bags = h["bags"].get<int>();
      if (h.contains("seed")) cfg.hyper.seed = h["seed"].get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw Error(path + ": " + e.what());
  }
  return cfg;
}

void apply_env(PipelineConfig& cfg) {
  auto pick = [](const char* name, std::string& slot) {
    const char* v = std::getenv(name);
    if (v != nullptr && *v != '\0') slot = v;
  };
  pick("RELX_CORPUS", cfg.corpus);
  pick("RELX_VECTORS", cfg.vectors);
  pick("RELX_OUT", cfg.out);
}

}  // namespace relx
