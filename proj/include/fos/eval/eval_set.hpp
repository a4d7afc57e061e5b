#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fos/dataset/corpus.hpp"
#include "fos/encoder/fg_encoder.hpp"
#include "fos/retrieval/store.hpp"

namespace fos {

// Test protocol: a foreground database sampled from the large-enough
// patterns, held-out queries and their compatible-pattern relevance.
struct EvalSet {
  std::vector<std::string> db_instance_ids;
  std::vector<std::string> db_pattern_ids;  // aligned with db_instance_ids
  std::vector<QueryInput> queries;
  std::map<std::string, std::set<std::string>> relevance;  // query id -> patterns
  int excluded_queries = 0;  // dropped for having no relevant pattern in the db
};

// Filters patterns by minimum member count, samples `per_pattern` instances
// from each (deterministic per seed) and attaches up to n_queries test-split
// queries. Queries without a single relevant instance are excluded and
// counted. Throws when no pattern passes the size threshold.
EvalSet build_eval_set(const DatasetCorpus& corpus, int min_pattern_size = 20, int per_pattern = 5,
                       int n_queries = 100, uint64_t seed = 1);

// Embeds the database instances with the given foreground encoder.
EmbeddingStore build_eval_store(const EvalSet& eval, const DatasetCorpus& corpus,
                                const ForegroundEncoder& encoder);

}  // namespace fos
