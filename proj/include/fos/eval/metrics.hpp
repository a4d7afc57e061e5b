#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fos/eval/eval_set.hpp"
#include "fos/retrieval/store.hpp"
#include "fos/types.hpp"

namespace fos {

// Non-interpolated average precision over a ranked binary relevance list:
// mean of precision@r over the relevant ranks r. Throws when nothing is
// relevant (such queries are excluded upstream).
double average_precision(const std::vector<int>& relevance_flags);

// Fraction of samples whose truth appears in their top-k ranked list.
double topk_accuracy(const std::vector<std::vector<std::string>>& ranked_predictions,
                     const std::vector<std::string>& truths, int k);

struct MapResult {
  double map = 0.0;
  int scored_queries = 0;
  int excluded_queries = 0;  // no relevant instance in the database
  std::vector<std::pair<std::string, double>> per_query_ap;
};

using QueryEmbedFn = std::function<Embedding(const QueryInput&)>;

// Ranks the full database per query by cosine and averages AP under
// instance-level relevance (a pattern-compatible instance is relevant).
MapResult mean_average_precision(const EvalSet& eval, const QueryEmbedFn& embed_query,
                                 const EmbeddingStore& store);

// Secondary metric: AP over the ranked pattern centroids under
// pattern-level relevance.
MapResult mean_average_precision_patterns(const EvalSet& eval, const QueryEmbedFn& embed_query,
                                          const PatternIndex& index);

// Mean over queries of (#relevant instances / database size); the expected
// quality of a random ranking, reported next to mAP.
double mean_relevant_fraction(const EvalSet& eval, int database_size);

}  // namespace fos
