#include "fos/dataset/triplets.hpp"

#include <algorithm>
#include <stdexcept>

namespace fos {

TripletSampler::TripletSampler(const DatasetCorpus& corpus, std::vector<int> query_indices)
    : corpus_(corpus), queries_(std::move(query_indices)) {
  if (queries_.empty()) throw std::runtime_error("TripletSampler: no queries");

  for (size_t i = 0; i < corpus.instances.size(); ++i) {
    const auto& inst = corpus.instances[i];
    if (inst.pattern_id.has_value())
      pattern_members_[*inst.pattern_id].push_back(static_cast<int>(i));
  }
  if (pattern_members_.size() < 2)
    throw std::runtime_error("TripletSampler: corpus needs at least 2 patterns");

  std::vector<std::string> all_patterns;
  for (const auto& [pid, members] : pattern_members_) all_patterns.push_back(pid);

  for (int qi : queries_) {
    const auto& q = corpus.queries[static_cast<size_t>(qi)];
    auto it = corpus.compatibility.find(q.id);
    std::vector<std::string> compat;
    if (it != corpus.compatibility.end()) {
      for (const auto& pid : it->second)
        if (pattern_members_.count(pid)) compat.push_back(pid);
    }
    std::sort(compat.begin(), compat.end());
    if (compat.empty())
      throw std::runtime_error("TripletSampler: query " + q.id + " has no compatible pattern");
    std::vector<std::string> incompat;
    for (const auto& pid : all_patterns)
      if (!std::binary_search(compat.begin(), compat.end(), pid)) incompat.push_back(pid);
    if (incompat.empty())
      throw std::runtime_error("TripletSampler: query " + q.id + " has no incompatible pattern");
    compat_[q.id] = std::move(compat);
    incompat_[q.id] = std::move(incompat);
  }
}

TripletIdx TripletSampler::sample(Rng& rng) const {
  const int qi = queries_[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(queries_.size()) - 1))];
  return sample_for(qi, rng);
}

TripletIdx TripletSampler::sample_for(int query_index, Rng& rng) const {
  const auto& q = corpus_.queries[static_cast<size_t>(query_index)];
  const auto& compat = compat_.at(q.id);
  const auto& incompat = incompat_.at(q.id);

  auto pick_member = [&](const std::vector<std::string>& patterns) {
    const auto& pid =
        patterns[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(patterns.size()) - 1))];
    const auto& members = pattern_members_.at(pid);
    return members[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(members.size()) - 1))];
  };

  TripletIdx t;
  t.query = query_index;
  t.positive = pick_member(compat);
  t.negative = pick_member(incompat);
  return t;
}

std::vector<std::string> TripletSampler::instance_positives(const std::string& query_id) const {
  std::vector<std::string> out;
  auto it = compat_.find(query_id);
  if (it == compat_.end()) return out;
  for (const auto& pid : it->second)
    for (int idx : pattern_members_.at(pid)) out.push_back(corpus_.instances[static_cast<size_t>(idx)].id);
  return out;
}

TripletIdx sample_triplet(const DatasetCorpus& corpus, const std::string& anchor_query_id,
                          uint64_t rng_seed) {
  int qi = -1;
  for (size_t i = 0; i < corpus.queries.size(); ++i)
    if (corpus.queries[i].id == anchor_query_id) {
      qi = static_cast<int>(i);
      break;
    }
  if (qi < 0) throw std::runtime_error("sample_triplet: unknown query " + anchor_query_id);
  std::vector<int> all;
  for (size_t i = 0; i < corpus.queries.size(); ++i) all.push_back(static_cast<int>(i));
  TripletSampler sampler(corpus, all);
  Rng rng(rng_seed);
  return sampler.sample_for(qi, rng);
}

}  // namespace fos
