#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fos/dataset/augment.hpp"
#include "fos/dataset/corpus.hpp"
#include "fos/nn/losses.hpp"
#include "fos/nn/net.hpp"
#include "fos/types.hpp"

namespace fos {

struct FgTrainConfig {
  double lambda = 0.005;     // center-loss weight
  double lr = 0.02;          // learning rate for the classification loss
  double lr_center = 0.5;    // center update rate
  double momentum = 0.9;
  double weight_decay = 1e-4;
  double lr_decay = 0.5;
  int lr_decay_every = 10;   // epochs
  int batch = 32;
  int epochs = 12;
  int feature_dim = 32;      // d (full-scale preset: 2048)
  int input_size = 32;       // training resolution (full-scale preset: 256)
  int augment_multiplicity = 8;  // offline augmented views per training instance
  double val_fraction = 0.2;     // held-out instances per pattern
  double early_stop_top1 = 0.0;  // stop once validation top-1 reaches this (0 = never)
  FgAugmentConfig augment;       // out_size is overridden with input_size
};

// Teacher network: feature extractor + pattern classifier + per-pattern
// centers. Class index order is the sorted pattern id list.
class ForegroundEncoder {
 public:
  ForegroundEncoder() = default;
  ForegroundEncoder(nn::ConvNetConfig net_cfg, int input_size,
                    std::vector<std::string> pattern_ids, std::string schema_hash);

  void init(Rng& rng);

  // Unit-norm embedding of a square foreground image.
  Embedding embed(const Image& fg) const;
  // Raw (pre-normalization) features for a batch of same-size images.
  Eigen::MatrixXd features(const std::vector<const Image*>& batch, nn::ConvFeatureNet::Ctx* ctx = nullptr) const;
  // Top-k pattern ids by classifier logits; ties by ascending pattern id.
  std::vector<std::string> classify(const Image& fg, int k) const;
  std::vector<int> topk_classes(const Eigen::VectorXd& logits, int k) const;

  int feature_dim() const { return extractor.feature_dim(); }
  int num_patterns() const { return static_cast<int>(labels.size()); }
  std::vector<nn::ParamRef> all_params();
  std::string params_hash();

  nn::ConvFeatureNet extractor;
  nn::Dense classifier;      // feature_dim -> #patterns, fed the raw feature
  Eigen::MatrixXd centers;   // #patterns × feature_dim, zero-initialized
  std::vector<std::string> labels;  // sorted pattern ids = class index order
  int input_size = 32;
  std::string schema_hash;
};

struct FgEpochStats {
  int epoch = 0;
  double softmax_loss = 0.0;
  double center_loss = 0.0;
  double total_loss = 0.0;
  double val_top1 = 0.0;
};

struct FgTrainResult {
  ForegroundEncoder encoder;
  std::vector<FgEpochStats> history;
  std::vector<std::string> val_instance_ids;  // held-out instances per pattern
};

// Trains on the corpus's labelled instances with an offline augmentation
// pool; deterministic per seed. Writes one metrics line per epoch to `log`
// when provided.
FgTrainResult train_foreground_encoder(const DatasetCorpus& corpus, const FgTrainConfig& cfg,
                                       uint64_t seed, std::ostream* log = nullptr);

// Assigns top-1 pattern ids to instances lacking one. An assignment is kept
// only when the top-1/top-2 logit margin reaches min_margin (0 accepts all).
// Returns the number of instances labelled.
int auto_label_instances(const ForegroundEncoder& encoder,
                         std::vector<ForegroundInstance>& instances, double min_margin = 0.0);

}  // namespace fos
