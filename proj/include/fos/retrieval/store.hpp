#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "fos/types.hpp"

namespace fos {

struct SearchResult {
  std::string id;
  double score;  // cosine similarity in [-1,1]
};

// Immutable brute-force cosine index over unit-norm rows.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  // Normalizes rows; throws on duplicate ids, zero rows or length mismatch.
  static EmbeddingStore build(const Eigen::MatrixXd& embeddings, std::vector<std::string> ids,
                              std::vector<std::string> pattern_ids);

  int size() const { return static_cast<int>(ids_.size()); }
  int dim() const { return static_cast<int>(matrix_.cols()); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<std::string>& pattern_ids() const { return pattern_ids_; }

  // Top-k by cosine descending, ties by ascending id; k > N returns all N.
  std::vector<SearchResult> search(const Embedding& query, int k) const;

  // Manifest (<base>.json) + raw little-endian float32 row-major matrix
  // (<base>.f32). Bit-exact round trip; the manifest records a checksum of
  // the binary file.
  void save(const std::string& base_path) const;
  static EmbeddingStore load(const std::string& base_path);

 private:
  Eigen::MatrixXd matrix_;  // N × d, unit rows
  std::vector<std::string> ids_;
  std::vector<std::string> pattern_ids_;
};

// Pattern centroids: per-pattern mean of member rows, then normalized
// (mean-then-normalize is the fixed contract). Throws if any instance lacks
// a pattern id or a centroid degenerates to zero.
struct PatternIndex {
  Eigen::MatrixXd centroids;  // P × d, unit rows, sorted by pattern id
  std::vector<std::string> pattern_ids;
};
PatternIndex pattern_centroids(const EmbeddingStore& store);

std::vector<SearchResult> search_patterns(const PatternIndex& index, const Embedding& query,
                                          int k);

}  // namespace fos
