#include "fos/retrieval/store.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "fos/encoder/checkpoint.hpp"  // CorruptArtifactError
#include "fos/hash.hpp"
#include "fos/vecmath.hpp"
#include "json.hpp"

namespace fos {

EmbeddingStore EmbeddingStore::build(const Eigen::MatrixXd& embeddings,
                                     std::vector<std::string> ids,
                                     std::vector<std::string> pattern_ids) {
  if (static_cast<size_t>(embeddings.rows()) != ids.size() || ids.size() != pattern_ids.size())
    throw std::runtime_error("EmbeddingStore: length mismatch");
  std::set<std::string> seen;
  for (const auto& id : ids)
    if (!seen.insert(id).second) throw std::runtime_error("EmbeddingStore: duplicate id " + id);

  EmbeddingStore store;
  store.matrix_ = embeddings;
  for (Eigen::Index i = 0; i < store.matrix_.rows(); ++i) {
    const double n = store.matrix_.row(i).norm();
    if (n <= 0.0 || !std::isfinite(n))
      throw std::runtime_error("EmbeddingStore: zero or non-finite row for id " + ids[static_cast<size_t>(i)]);
    store.matrix_.row(i) /= n;
  }
  store.ids_ = std::move(ids);
  store.pattern_ids_ = std::move(pattern_ids);
  return store;
}

namespace {

std::vector<SearchResult> rank_rows(const Eigen::MatrixXd& rows,
                                    const std::vector<std::string>& ids, const Embedding& query,
                                    int k) {
  if (k < 1) throw std::runtime_error("search: k must be >= 1");
  if (rows.rows() == 0) return {};
  if (query.size() != rows.cols()) throw std::runtime_error("search: dimension mismatch");

  Eigen::VectorXd scores = rows * query;
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    scores(i) = std::clamp(scores(i), -1.0, 1.0);

  std::vector<int> order(static_cast<size_t>(rows.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return ids[static_cast<size_t>(a)] < ids[static_cast<size_t>(b)];
  });
  const size_t take = std::min(static_cast<size_t>(k), order.size());
  std::vector<SearchResult> out;
  out.reserve(take);
  for (size_t i = 0; i < take; ++i)
    out.push_back({ids[static_cast<size_t>(order[i])], scores(order[i])});
  return out;
}

}  // namespace

std::vector<SearchResult> EmbeddingStore::search(const Embedding& query, int k) const {
  return rank_rows(matrix_, ids_, query, k);
}

void EmbeddingStore::save(const std::string& base_path) const {
  // Row-major float32 payload.
  std::vector<float> payload;
  payload.reserve(static_cast<size_t>(matrix_.size()));
  for (Eigen::Index i = 0; i < matrix_.rows(); ++i)
    for (Eigen::Index j = 0; j < matrix_.cols(); ++j)
      payload.push_back(static_cast<float>(matrix_(i, j)));
  {
    std::ofstream bin(base_path + ".f32", std::ios::binary);
    if (!bin) throw std::runtime_error("cannot write embedding store: " + base_path + ".f32");
    bin.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(float)));
  }
  nlohmann::json j;
  j["format_version"] = 1;
  j["d"] = matrix_.cols();
  j["n"] = matrix_.rows();
  j["ids"] = ids_;
  j["pattern_ids"] = pattern_ids_;
  j["data_file"] = base_path.substr(base_path.find_last_of('/') + 1) + ".f32";
  j["checksum"] = hash_hex(fnv1a64(payload.data(), payload.size() * sizeof(float)));
  std::ofstream out(base_path + ".json");
  if (!out) throw std::runtime_error("cannot write embedding store manifest: " + base_path + ".json");
  out << j.dump(2) << "\n";
}

EmbeddingStore EmbeddingStore::load(const std::string& base_path) {
  std::ifstream in(base_path + ".json");
  if (!in) throw std::runtime_error("cannot open embedding store manifest: " + base_path + ".json");
  nlohmann::json j = nlohmann::json::parse(in);
  const Eigen::Index d = j.at("d").get<Eigen::Index>();
  const Eigen::Index n = j.at("n").get<Eigen::Index>();

  std::ifstream bin(base_path + ".f32", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open embedding store data: " + base_path + ".f32");
  std::vector<char> bytes((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
  if (bytes.size() != static_cast<size_t>(n) * static_cast<size_t>(d) * sizeof(float))
    throw CorruptArtifactError("embedding store payload size mismatch: " + base_path);
  if (hash_hex(fnv1a64(bytes.data(), bytes.size())) != j.at("checksum").get<std::string>())
    throw CorruptArtifactError("embedding store checksum mismatch: " + base_path);

  std::vector<float> payload(static_cast<size_t>(n) * static_cast<size_t>(d));
  std::memcpy(payload.data(), bytes.data(), bytes.size());

  EmbeddingStore store;
  store.matrix_.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < d; ++c)
      store.matrix_(i, c) = static_cast<double>(payload[static_cast<size_t>(i) * d + c]);
  store.ids_ = j.at("ids").get<std::vector<std::string>>();
  store.pattern_ids_ = j.at("pattern_ids").get<std::vector<std::string>>();
  if (store.ids_.size() != static_cast<size_t>(n) || store.pattern_ids_.size() != static_cast<size_t>(n))
    throw CorruptArtifactError("embedding store id list mismatch: " + base_path);
  return store;
}

PatternIndex pattern_centroids(const EmbeddingStore& store) {
  std::map<std::string, std::vector<int>> members;
  for (int i = 0; i < store.size(); ++i) {
    const std::string& pid = store.pattern_ids()[static_cast<size_t>(i)];
    if (pid.empty())
      throw std::runtime_error("pattern_centroids: instance " + store.ids()[static_cast<size_t>(i)] +
                               " has no pattern id");
    members[pid].push_back(i);
  }
  PatternIndex index;
  index.centroids.resize(static_cast<Eigen::Index>(members.size()), store.dim());
  Eigen::Index row = 0;
  for (const auto& [pid, idxs] : members) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(store.dim());
    for (int i : idxs) mean += store.matrix().row(i).transpose();
    mean /= static_cast<double>(idxs.size());
    if (mean.norm() <= 0.0)
      throw std::runtime_error("pattern_centroids: degenerate zero centroid for pattern " + pid);
    index.centroids.row(row++) = l2_normalize(mean).transpose();
    index.pattern_ids.push_back(pid);
  }
  return index;
}

std::vector<SearchResult> search_patterns(const PatternIndex& index, const Embedding& query,
                                          int k) {
  return rank_rows(index.centroids, index.pattern_ids, query, k);
}

}  // namespace fos
