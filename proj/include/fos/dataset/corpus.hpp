#pragma once

#include <map>
#include <string>
#include <vector>

#include "fos/schema.hpp"
#include "fos/types.hpp"

namespace fos {

// In-memory pattern-level FoS dataset: foreground instances, query inputs and
// the query -> compatible-pattern labelling.
struct DatasetCorpus {
  AttributeSchema schema;
  std::vector<ForegroundInstance> instances;
  std::vector<QueryInput> queries;
  // query id -> sorted compatible pattern ids
  std::map<std::string, std::vector<std::string>> compatibility;
  uint64_t seed = 0;
  std::string config_hash;

  const ForegroundInstance* find_instance(const std::string& id) const;
  const QueryInput* find_query(const std::string& id) const;
  std::vector<int> query_indices(QuerySplit split) const;
};

// Partition of the labelled instances by identical attribute vectors.
// Instances without attributes are excluded. Patterns and member ids are
// sorted for determinism.
std::vector<Pattern> group_patterns(const std::vector<ForegroundInstance>& instances);

// Manifest + images on disk. Layout under `dir`:
//   manifest.json, schema.json, images/fg/<id>.png, images/bg/<id>.png
void save_corpus(const DatasetCorpus& corpus, const std::string& dir);
DatasetCorpus load_corpus(const std::string& dir);

// Byte content of the manifest alone (used for checksum tests and to keep
// serialization in one place).
std::string corpus_manifest_json(const DatasetCorpus& corpus);

}  // namespace fos
