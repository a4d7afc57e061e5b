#include "fos/encoder/fg_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "fos/nn/optim.hpp"
#include "fos/vecmath.hpp"

namespace fos {

ForegroundEncoder::ForegroundEncoder(nn::ConvNetConfig net_cfg, int input_size_,
                                     std::vector<std::string> pattern_ids,
                                     std::string schema_hash_)
    : extractor(std::move(net_cfg)),
      classifier(extractor.feature_dim(), static_cast<int>(pattern_ids.size())),
      centers(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pattern_ids.size()),
                                    extractor.feature_dim())),
      labels(std::move(pattern_ids)),
      input_size(input_size_),
      schema_hash(std::move(schema_hash_)) {
  if (!std::is_sorted(labels.begin(), labels.end()))
    throw std::runtime_error("ForegroundEncoder: pattern ids must be sorted");
}

void ForegroundEncoder::init(Rng& rng) {
  extractor.init(rng);
  classifier.init(rng);
  centers.setZero();
}

Eigen::MatrixXd ForegroundEncoder::features(const std::vector<const Image*>& batch,
                                            nn::ConvFeatureNet::Ctx* ctx) const {
  std::vector<Image> resized;
  resized.reserve(batch.size());  // keep pointers stable
  std::vector<const Image*> ptrs;
  ptrs.reserve(batch.size());
  for (const Image* img : batch) {
    if (img->empty() || img->h != img->w)
      throw std::runtime_error("foreground encoder expects square non-empty images");
    if (img->h != input_size) {
      resized.push_back(resize_bilinear(*img, input_size, input_size));
      ptrs.push_back(&resized.back());
    } else {
      ptrs.push_back(img);
    }
  }
  return extractor.forward(nn::images_to_tensor(ptrs), ctx);
}

Embedding ForegroundEncoder::embed(const Image& fg) const {
  Eigen::MatrixXd f = features({&fg});
  return l2_normalize(f.row(0).transpose());
}

std::vector<int> ForegroundEncoder::topk_classes(const Eigen::VectorXd& logits, int k) const {
  if (k < 1 || k > static_cast<int>(labels.size()))
    throw std::runtime_error("topk_classes: k out of range");
  std::vector<int> idx(labels.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (logits(a) != logits(b)) return logits(a) > logits(b);
    return labels[static_cast<size_t>(a)] < labels[static_cast<size_t>(b)];
  });
  idx.resize(static_cast<size_t>(k));
  return idx;
}

std::vector<std::string> ForegroundEncoder::classify(const Image& fg, int k) const {
  Eigen::MatrixXd f = features({&fg});
  Eigen::VectorXd logits = classifier.forward(f, nullptr).row(0).transpose();
  std::vector<std::string> out;
  for (int c : topk_classes(logits, k)) out.push_back(labels[static_cast<size_t>(c)]);
  return out;
}

std::vector<nn::ParamRef> ForegroundEncoder::all_params() {
  auto params = extractor.params();
  for (auto p : classifier.params()) params.push_back(p);
  return params;
}

std::string ForegroundEncoder::params_hash() {
  auto params = all_params();
  params.push_back({&centers, &centers});  // centers are state too
  return nn::params_checksum(params);
}

namespace {

struct PreparedSample {
  Image image;
  int label;
};

double validation_top1(const ForegroundEncoder& enc, const std::vector<PreparedSample>& val,
                       int batch) {
  if (val.empty()) return 0.0;
  int hit = 0;
  for (size_t start = 0; start < val.size(); start += static_cast<size_t>(batch)) {
    const size_t end = std::min(val.size(), start + static_cast<size_t>(batch));
    std::vector<const Image*> ptrs;
    for (size_t i = start; i < end; ++i) ptrs.push_back(&val[i].image);
    Eigen::MatrixXd feats = enc.features(ptrs);
    Eigen::MatrixXd logits = enc.classifier.forward(feats, nullptr);
    for (size_t i = start; i < end; ++i) {
      Eigen::Index best;
      logits.row(static_cast<Eigen::Index>(i - start)).maxCoeff(&best);
      if (static_cast<int>(best) == val[i].label) ++hit;
    }
  }
  return static_cast<double>(hit) / static_cast<double>(val.size());
}

}  // namespace

FgTrainResult train_foreground_encoder(const DatasetCorpus& corpus, const FgTrainConfig& cfg,
                                       uint64_t seed, std::ostream* log) {
  const auto patterns = group_patterns(corpus.instances);
  if (patterns.size() < 2)
    throw std::runtime_error("train_foreground_encoder: need at least 2 patterns");
  for (const auto& p : patterns)
    if (p.member_ids.size() < 2)
      throw std::runtime_error("train_foreground_encoder: pattern " + p.pattern_id +
                               " has fewer than 2 instances");

  std::vector<std::string> label_ids;
  for (const auto& p : patterns) label_ids.push_back(p.pattern_id);
  std::sort(label_ids.begin(), label_ids.end());
  std::map<std::string, int> label_of;
  for (size_t i = 0; i < label_ids.size(); ++i) label_of[label_ids[i]] = static_cast<int>(i);

  std::map<std::string, const ForegroundInstance*> by_id;
  for (const auto& inst : corpus.instances) by_id[inst.id] = &inst;

  const Rng root(seed);
  FgTrainResult result;
  result.encoder = ForegroundEncoder(nn::ConvNetConfig{{8, 16, 32}, cfg.feature_dim},
                                     cfg.input_size, label_ids, corpus.schema.hash());
  {
    Rng init_rng = root.fork(1);
    result.encoder.init(init_rng);
  }
  ForegroundEncoder& enc = result.encoder;

  // Per-pattern split, then an offline augmentation pool for the train part.
  FgAugmentConfig aug = cfg.augment;
  aug.out_size = cfg.input_size;
  std::vector<PreparedSample> train_pool, val_pool;
  uint64_t aug_stream = 0x5000000;
  for (const auto& pat : patterns) {
    std::vector<std::string> members = pat.member_ids;  // already sorted
    Rng split_rng = root.fork(0x200 + static_cast<uint64_t>(label_of[pat.pattern_id]));
    split_rng.shuffle(members);
    size_t val_count = static_cast<size_t>(std::lround(cfg.val_fraction * members.size()));
    val_count = std::min(val_count, members.size() - 1);
    const int label = label_of[pat.pattern_id];
    for (size_t i = 0; i < members.size(); ++i) {
      const ForegroundInstance* inst = by_id.at(members[i]);
      if (i < val_count) {
        val_pool.push_back({resize_bilinear(inst->image, cfg.input_size, cfg.input_size), label});
        result.val_instance_ids.push_back(inst->id);
      } else {
        for (int a = 0; a < cfg.augment_multiplicity; ++a) {
          Rng arng = root.fork(aug_stream + static_cast<uint64_t>(a));
          train_pool.push_back({augment_foreground(*inst, arng, aug).image, label});
        }
        aug_stream += static_cast<uint64_t>(cfg.augment_multiplicity);
      }
    }
  }
  if (train_pool.empty()) throw std::runtime_error("train_foreground_encoder: empty train pool");
  std::sort(result.val_instance_ids.begin(), result.val_instance_ids.end());

  nn::SgdMomentum opt(cfg.lr, cfg.momentum, cfg.weight_decay);
  auto params = enc.all_params();

  std::vector<size_t> order(train_pool.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng = root.fork(2);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    opt.set_lr(cfg.lr * std::pow(cfg.lr_decay, epoch / std::max(cfg.lr_decay_every, 1)));
    shuffle_rng.shuffle(order);

    double sum_ls = 0.0, sum_lc = 0.0, sum_total = 0.0;
    int batches = 0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch)) {
      const size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch));
      std::vector<const Image*> ptrs;
      std::vector<int> batch_labels;
      for (size_t i = start; i < end; ++i) {
        ptrs.push_back(&train_pool[order[i]].image);
        batch_labels.push_back(train_pool[order[i]].label);
      }

      nn::ConvFeatureNet::Ctx ctx;
      Eigen::MatrixXd feats = enc.features(ptrs, &ctx);
      nn::Dense::Ctx cls_ctx;
      Eigen::MatrixXd logits = enc.classifier.forward(feats, &cls_ctx);

      Eigen::MatrixXd dlogits, dx;
      const double ls = nn::softmax_loss(logits, batch_labels, &dlogits);
      const double lc = nn::center_loss(feats, batch_labels, enc.centers, &dx);
      dx *= cfg.lambda;

      enc.extractor.zero_grad();
      enc.classifier.zero_grad();
      Eigen::MatrixXd dfeat = enc.classifier.backward(dlogits, cls_ctx) + dx;
      enc.extractor.backward(dfeat, ctx);
      opt.step(params);
      nn::update_centers(enc.centers, feats, batch_labels, cfg.lr_center);

      sum_ls += ls;
      sum_lc += lc;
      sum_total += ls + cfg.lambda * lc;
      ++batches;
    }

    FgEpochStats stats;
    stats.epoch = epoch;
    stats.softmax_loss = sum_ls / batches;
    stats.center_loss = sum_lc / batches;
    stats.total_loss = sum_total / batches;
    stats.val_top1 = validation_top1(enc, val_pool, cfg.batch);
    result.history.push_back(stats);
    if (log)
      (*log) << "epoch " << epoch << " softmax_loss " << stats.softmax_loss << " center_loss "
             << stats.center_loss << " total_loss " << stats.total_loss << " val_top1 "
             << stats.val_top1 << "\n";
    if (cfg.early_stop_top1 > 0.0 && stats.val_top1 >= cfg.early_stop_top1) break;
  }
  return result;
}

int auto_label_instances(const ForegroundEncoder& encoder,
                         std::vector<ForegroundInstance>& instances, double min_margin) {
  int labelled = 0;
  for (auto& inst : instances) {
    if (inst.pattern_id.has_value()) continue;
    Eigen::MatrixXd f = encoder.features({&inst.image});
    Eigen::VectorXd logits = encoder.classifier.forward(f, nullptr).row(0).transpose();
    auto top = encoder.topk_classes(logits, std::min(2, encoder.num_patterns()));
    if (top.size() > 1 && min_margin > 0.0 &&
        logits(top[0]) - logits(top[1]) < min_margin)
      continue;
    inst.pattern_id = encoder.labels[static_cast<size_t>(top[0])];
    ++labelled;
  }
  return labelled;
}

}  // namespace fos
