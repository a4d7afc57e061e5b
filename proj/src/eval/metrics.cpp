#include "fos/eval/metrics.hpp"

#include <stdexcept>

namespace fos {

double average_precision(const std::vector<int>& relevance_flags) {
  int hits = 0;
  double sum = 0.0;
  for (size_t r = 0; r < relevance_flags.size(); ++r) {
    if (relevance_flags[r]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  if (hits == 0) throw std::runtime_error("average_precision: no relevant item");
  return sum / static_cast<double>(hits);
}

double topk_accuracy(const std::vector<std::vector<std::string>>& ranked_predictions,
                     const std::vector<std::string>& truths, int k) {
  if (ranked_predictions.empty() || ranked_predictions.size() != truths.size())
    throw std::runtime_error("topk_accuracy: empty or mismatched inputs");
  if (k < 1) throw std::runtime_error("topk_accuracy: k must be >= 1");
  int hit = 0;
  for (size_t i = 0; i < truths.size(); ++i) {
    const auto& ranked = ranked_predictions[i];
    const size_t upto = std::min(ranked.size(), static_cast<size_t>(k));
    for (size_t j = 0; j < upto; ++j)
      if (ranked[j] == truths[i]) {
        ++hit;
        break;
      }
  }
  return static_cast<double>(hit) / static_cast<double>(truths.size());
}

namespace {

MapResult map_over_ranked(const EvalSet& eval, const QueryEmbedFn& embed_query,
                          const std::function<std::vector<SearchResult>(const Embedding&)>& rank,
                          const std::function<bool(const std::string&, const std::set<std::string>&)>&
                              is_relevant) {
  if (eval.queries.empty()) throw std::runtime_error("mean_average_precision: empty eval set");
  MapResult out;
  double sum = 0.0;
  for (const auto& q : eval.queries) {
    const auto rel = eval.relevance.find(q.id);
    if (rel == eval.relevance.end() || rel->second.empty()) {
      ++out.excluded_queries;
      continue;
    }
    const Embedding emb = embed_query(q);
    const auto ranked = rank(emb);
    std::vector<int> flags;
    flags.reserve(ranked.size());
    bool any = false;
    for (const auto& r : ranked) {
      const bool f = is_relevant(r.id, rel->second);
      flags.push_back(f ? 1 : 0);
      any = any || f;
    }
    if (!any) {
      ++out.excluded_queries;
      continue;
    }
    const double ap = average_precision(flags);
    out.per_query_ap.emplace_back(q.id, ap);
    sum += ap;
    ++out.scored_queries;
  }
  if (out.scored_queries == 0)
    throw std::runtime_error("mean_average_precision: no scorable queries");
  out.map = sum / static_cast<double>(out.scored_queries);
  return out;
}

}  // namespace

MapResult mean_average_precision(const EvalSet& eval, const QueryEmbedFn& embed_query,
                                 const EmbeddingStore& store) {
  std::map<std::string, std::string> pattern_of;
  for (int i = 0; i < store.size(); ++i)
    pattern_of[store.ids()[static_cast<size_t>(i)]] = store.pattern_ids()[static_cast<size_t>(i)];
  return map_over_ranked(
      eval, embed_query,
      [&](const Embedding& e) { return store.search(e, store.size()); },
      [&](const std::string& id, const std::set<std::string>& rel) {
        auto it = pattern_of.find(id);
        return it != pattern_of.end() && rel.count(it->second) > 0;
      });
}

MapResult mean_average_precision_patterns(const EvalSet& eval, const QueryEmbedFn& embed_query,
                                          const PatternIndex& index) {
  return map_over_ranked(
      eval, embed_query,
      [&](const Embedding& e) {
        return search_patterns(index, e, static_cast<int>(index.pattern_ids.size()));
      },
      [&](const std::string& id, const std::set<std::string>& rel) { return rel.count(id) > 0; });
}

double mean_relevant_fraction(const EvalSet& eval, int database_size) {
  if (database_size <= 0 || eval.queries.empty()) return 0.0;
  std::map<std::string, int> pattern_count;
  for (const auto& pid : eval.db_pattern_ids) ++pattern_count[pid];
  double sum = 0.0;
  int counted = 0;
  for (const auto& q : eval.queries) {
    auto rel = eval.relevance.find(q.id);
    if (rel == eval.relevance.end()) continue;
    int relevant = 0;
    for (const auto& pid : rel->second) {
      auto it = pattern_count.find(pid);
      if (it != pattern_count.end()) relevant += it->second;
    }
    sum += static_cast<double>(relevant) / static_cast<double>(database_size);
    ++counted;
  }
  return counted > 0 ? sum / counted : 0.0;
}

}  // namespace fos
