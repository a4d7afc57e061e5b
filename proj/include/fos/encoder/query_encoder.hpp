#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fos/dataset/augment.hpp"
#include "fos/dataset/corpus.hpp"
#include "fos/encoder/fg_encoder.hpp"
#include "fos/nn/net.hpp"
#include "fos/types.hpp"

namespace fos {

// Square crop of a background around the query rectangle: the crop side is
// min(W,H), positioned so the rectangle center is as close to the crop center
// as bounds allow (preserving maximal context). If the rectangle does not fit
// in that window the crop grows to the rectangle's bounding square and the
// out-of-image area is filled with the per-channel image mean.
struct SquareCrop {
  Image image;
  Rectangle rect;  // remapped into crop coordinates
};
SquareCrop square_crop(const Image& background, const Rectangle& rect);

// Truncation toward zero to two decimal digits (0.125 -> 0.12), bit-exact
// across platforms.
double truncate_two_decimals(double v);

// (cx, cy, w, h) of the rectangle, each truncated to two decimals.
Eigen::Vector4d layout_embedding(const Rectangle& rect);

// Early-fusion variant: the (truncated) rectangle region of the square
// background is replaced by the per-channel image mean.
Image early_fuse(const Image& square_background, const Rectangle& rect);

enum class AblationMode {
  kFull,          // late fusion, frozen teacher + background encoder
  kEarlyFusion,   // single-stream early-fused input
  kNoAug,         // late fusion without random-zoom augmentation
  kNoBgFreeze,    // background encoder trained along with the head
  kMultiTask,     // teacher fine-tuned jointly (classification + triplet)
  kBaselineProxy  // early fusion + jointly trained, unpretrained foreground net
};
std::string ablation_mode_name(AblationMode mode);
AblationMode ablation_mode_from_name(const std::string& name);

struct QueryTrainConfig {
  double margin = 0.1;
  double lr = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.99;
  double eps = 1e-9;
  int batch = 16;
  AblationMode mode = AblationMode::kFull;

  int hidden = 64;          // projection head hidden width (full-scale: 2048)
  int bg_feature_dim = 32;  // background feature width (full-scale: 2048)
  int input_size = 32;      // background input resolution (full-scale: 256)

  int triplets_per_epoch = 4000;
  int epochs = 10;
  double val_fraction = 0.1;     // of the train queries, for early stopping
  int val_triplets = 256;
  double early_stop_loss = 0.0;  // stop once val loss <= this (0 = never)

  int query_views = 6;  // offline geometric views per query
  int fg_views = 4;     // offline augmented views per foreground
  double max_zoom = 1.8;
  FgAugmentConfig fg_augment;  // out_size is overridden with teacher input size

  int bg_pretrain_epochs = 6;  // background-context classification warmup
  double bg_pretrain_lr = 0.05;

  double mt_teacher_lr = 0.005;  // teacher SGD rate in multi-task mode
  double mt_lambda = 0.005;      // center-loss weight in multi-task mode
  double mt_center_lr = 0.5;     // center update rate in multi-task mode
  double joint_fg_lr = 1e-3;     // foreground Adam rate in baseline-proxy mode
};

// Student network: frozen background extractor, bilinear fusion with the
// layout embedding and a two-layer projection head into the teacher's space.
class QueryEncoder {
 public:
  QueryEncoder() = default;
  QueryEncoder(nn::ConvNetConfig bg_cfg, int input_size, int hidden, int out_dim,
               AblationMode mode);

  void init(Rng& rng);

  bool early_input() const {
    return mode == AblationMode::kEarlyFusion || mode == AblationMode::kBaselineProxy;
  }
  int fused_dim() const { return early_input() ? background_net.feature_dim() : 4 * background_net.feature_dim(); }

  // Prepared (input image, truncated layout) for a query under this mode.
  std::pair<Image, Eigen::Vector4d> prepare(const QueryInput& query) const;

  Eigen::VectorXd embed_raw(const QueryInput& query) const;  // head output
  Embedding embed(const QueryInput& query) const;            // unit-norm

  std::vector<nn::ParamRef> head_params();
  std::vector<nn::ParamRef> all_params();

  nn::ConvFeatureNet background_net;
  nn::Dense head1, head2;
  AblationMode mode = AblationMode::kFull;
  int input_size = 32;
};

struct QueryEpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double active_fraction = 0.0;  // triplets with nonzero hinge
  double val_loss = 0.0;
};

struct QueryTrainResult {
  QueryEncoder encoder;
  // Foreground encoder to index the database with: identical to the input
  // teacher in frozen modes, fine-tuned/jointly-trained otherwise.
  ForegroundEncoder fg_encoder;
  std::vector<QueryEpochStats> history;
  std::string teacher_hash_before;
  std::string teacher_hash_after;
};

// Knowledge-distillation training of the student against the (frozen, unless
// the mode says otherwise) teacher. Deterministic per seed. Writes one line
// per step and per epoch to `log` when provided.
QueryTrainResult train_query_encoder(const ForegroundEncoder& teacher, const DatasetCorpus& corpus,
                                     const QueryTrainConfig& cfg, uint64_t seed,
                                     std::ostream* log = nullptr);

}  // namespace fos
