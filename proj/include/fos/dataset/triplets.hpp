#pragma once

#include <map>
#include <string>
#include <vector>

#include "fos/dataset/corpus.hpp"
#include "fos/rng.hpp"

namespace fos {

// Pattern-level compatible pair (the unit the training data is built from).
struct CompatiblePair {
  std::string query_id;
  std::string pattern_id;
};

struct TripletIdx {
  int query;     // index into corpus.queries
  int positive;  // index into corpus.instances
  int negative;  // index into corpus.instances
};

// Precomputed pattern/instance lookup over a corpus restricted to a query
// subset. Sampling: uniform compatible pattern, uniform member instance;
// negative likewise over incompatible patterns. A positive and negative can
// therefore never share a pattern.
class TripletSampler {
 public:
  TripletSampler(const DatasetCorpus& corpus, std::vector<int> query_indices);

  // Samples anchor uniformly from the query subset.
  TripletIdx sample(Rng& rng) const;
  // Samples positive/negative for a fixed anchor (corpus query index).
  TripletIdx sample_for(int query_index, Rng& rng) const;

  const std::vector<int>& query_indices() const { return queries_; }
  // All instance-level positives derivable for a query (pattern-level pair
  // expanded to its member instances).
  std::vector<std::string> instance_positives(const std::string& query_id) const;

 private:
  const DatasetCorpus& corpus_;
  std::vector<int> queries_;
  std::map<std::string, std::vector<int>> pattern_members_;   // pattern -> instance indices
  std::map<std::string, std::vector<std::string>> compat_;    // query -> compatible patterns
  std::map<std::string, std::vector<std::string>> incompat_;  // query -> incompatible patterns
};

// One-shot form used by tests and tooling.
TripletIdx sample_triplet(const DatasetCorpus& corpus, const std::string& anchor_query_id,
                          uint64_t rng_seed);

}  // namespace fos
