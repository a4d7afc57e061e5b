#include "fos/eval/eval_set.hpp"

#include <algorithm>
#include <stdexcept>

#include "fos/rng.hpp"

namespace fos {

EvalSet build_eval_set(const DatasetCorpus& corpus, int min_pattern_size, int per_pattern,
                       int n_queries, uint64_t seed) {
  if (per_pattern < 1 || n_queries < 1)
    throw std::runtime_error("build_eval_set: per_pattern and n_queries must be >= 1");
  const auto patterns = group_patterns(corpus.instances);
  const Rng root(seed);

  EvalSet eval;
  std::set<std::string> selected_patterns;
  int pattern_stream = 0;
  for (const auto& pat : patterns) {
    if (static_cast<int>(pat.member_ids.size()) < min_pattern_size) continue;
    std::vector<std::string> members = pat.member_ids;
    Rng rng = root.fork(0x40 + static_cast<uint64_t>(pattern_stream++));
    rng.shuffle(members);
    members.resize(static_cast<size_t>(std::min<size_t>(members.size(), static_cast<size_t>(per_pattern))));
    std::sort(members.begin(), members.end());
    for (const auto& id : members) {
      eval.db_instance_ids.push_back(id);
      eval.db_pattern_ids.push_back(pat.pattern_id);
    }
    selected_patterns.insert(pat.pattern_id);
  }
  if (selected_patterns.empty())
    throw std::runtime_error("build_eval_set: no pattern meets the size threshold");

  for (const auto& q : corpus.queries) {
    if (q.split != QuerySplit::kTest) continue;
    if (static_cast<int>(eval.queries.size()) >= n_queries) break;
    std::set<std::string> rel;
    auto it = corpus.compatibility.find(q.id);
    if (it != corpus.compatibility.end())
      for (const auto& pid : it->second)
        if (selected_patterns.count(pid)) rel.insert(pid);
    if (rel.empty()) {
      ++eval.excluded_queries;
      continue;
    }
    eval.relevance[q.id] = std::move(rel);
    eval.queries.push_back(q);
  }
  if (eval.queries.empty())
    throw std::runtime_error("build_eval_set: no test query has a relevant pattern");
  return eval;
}

EmbeddingStore build_eval_store(const EvalSet& eval, const DatasetCorpus& corpus,
                                const ForegroundEncoder& encoder) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(eval.db_instance_ids.size()),
                       encoder.feature_dim());
  for (size_t i = 0; i < eval.db_instance_ids.size(); ++i) {
    const ForegroundInstance* inst = corpus.find_instance(eval.db_instance_ids[i]);
    if (!inst) throw std::runtime_error("build_eval_store: missing instance " + eval.db_instance_ids[i]);
    rows.row(static_cast<Eigen::Index>(i)) = encoder.embed(inst->image).transpose();
  }
  return EmbeddingStore::build(rows, eval.db_instance_ids, eval.db_pattern_ids);
}

}  // namespace fos
