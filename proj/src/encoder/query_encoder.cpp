#include "fos/encoder/query_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include "fos/dataset/triplets.hpp"
#include "fos/nn/losses.hpp"
#include "fos/nn/optim.hpp"
#include "fos/vecmath.hpp"

namespace fos {

SquareCrop square_crop(const Image& background, const Rectangle& rect) {
  const int W = background.w, H = background.h;
  if (W <= 0 || H <= 0) throw std::runtime_error("square_crop: empty background");

  const double rcx = rect.cx * W, rcy = rect.cy * H;
  const double rw = rect.w * W, rh = rect.h * H;

  int side = std::min(W, H);
  if (std::max(rw, rh) > side) side = static_cast<int>(std::ceil(std::max(rw, rh)));

  int x0, y0;
  if (side <= W)
    x0 = std::clamp(static_cast<int>(std::lround(rcx - side / 2.0)), 0, W - side);
  else
    x0 = static_cast<int>(std::lround(rcx - side / 2.0));
  if (side <= H)
    y0 = std::clamp(static_cast<int>(std::lround(rcy - side / 2.0)), 0, H - side);
  else
    y0 = static_cast<int>(std::lround(rcy - side / 2.0));

  SquareCrop out;
  if (side == W && side == H && x0 == 0 && y0 == 0) {
    out.image = background;
    out.rect = rect;
    return out;
  }

  float mean[3];
  channel_mean(background, mean);
  out.image = Image(side, side);
  for (int y = 0; y < side; ++y) {
    const int sy = y0 + y;
    for (int x = 0; x < side; ++x) {
      const int sx = x0 + x;
      const bool inside = sy >= 0 && sy < H && sx >= 0 && sx < W;
      for (int c = 0; c < 3; ++c)
        out.image.at(y, x, c) = inside ? background.at(sy, sx, c) : mean[c];
    }
  }
  out.rect = Rectangle((rcx - x0) / side, (rcy - y0) / side, std::min(rw / side, 1.0),
                       std::min(rh / side, 1.0));
  return out;
}

double truncate_two_decimals(double v) {
  // The 1e-9 guard keeps values like 0.29 (stored just below the decimal
  // value) from truncating to 0.28; floor and the division are IEEE-exact,
  // so results are identical across platforms.
  double t = std::floor(v * 100.0 + 1e-9) / 100.0;
  return std::clamp(t, 0.0, 1.0);
}

Eigen::Vector4d layout_embedding(const Rectangle& rect) {
  return Eigen::Vector4d(truncate_two_decimals(rect.cx), truncate_two_decimals(rect.cy),
                         truncate_two_decimals(rect.w), truncate_two_decimals(rect.h));
}

Image early_fuse(const Image& square_background, const Rectangle& rect) {
  const int S = square_background.w;
  if (square_background.h != S) throw std::runtime_error("early_fuse: background must be square");
  const Eigen::Vector4d l = layout_embedding(rect);
  const int x0 = std::clamp(static_cast<int>(std::lround((l(0) - l(2) / 2.0) * S)), 0, S);
  const int x1 = std::clamp(static_cast<int>(std::lround((l(0) + l(2) / 2.0) * S)), 0, S);
  const int y0 = std::clamp(static_cast<int>(std::lround((l(1) - l(3) / 2.0) * S)), 0, S);
  const int y1 = std::clamp(static_cast<int>(std::lround((l(1) + l(3) / 2.0) * S)), 0, S);
  Image out = square_background;
  if (x0 >= x1 || y0 >= y1) return out;  // zero-area rectangle after truncation
  float mean[3];
  channel_mean(square_background, mean);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x)
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = mean[c];
  return out;
}

std::string ablation_mode_name(AblationMode mode) {
  switch (mode) {
    case AblationMode::kFull: return "full";
    case AblationMode::kEarlyFusion: return "early-fusion";
    case AblationMode::kNoAug: return "no-aug";
    case AblationMode::kNoBgFreeze: return "no-bg-freeze";
    case AblationMode::kMultiTask: return "multi-task";
    case AblationMode::kBaselineProxy: return "baseline-proxy";
  }
  throw std::runtime_error("unknown ablation mode");
}

AblationMode ablation_mode_from_name(const std::string& name) {
  for (AblationMode m : {AblationMode::kFull, AblationMode::kEarlyFusion, AblationMode::kNoAug,
                         AblationMode::kNoBgFreeze, AblationMode::kMultiTask,
                         AblationMode::kBaselineProxy})
    if (ablation_mode_name(m) == name) return m;
  throw std::runtime_error("unknown ablation mode: " + name);
}

QueryEncoder::QueryEncoder(nn::ConvNetConfig bg_cfg, int input_size_, int hidden, int out_dim,
                           AblationMode mode_)
    : background_net(std::move(bg_cfg)), mode(mode_), input_size(input_size_) {
  head1 = nn::Dense(fused_dim(), hidden);
  head2 = nn::Dense(hidden, out_dim);
}

void QueryEncoder::init(Rng& rng) {
  background_net.init(rng);
  head1.init(rng);
  head2.init(rng);
}

std::pair<Image, Eigen::Vector4d> QueryEncoder::prepare(const QueryInput& query) const {
  SquareCrop crop = square_crop(query.background, query.rect);
  if (early_input()) {
    Image fused = early_fuse(crop.image, crop.rect);
    return {resize_bilinear(fused, input_size, input_size), Eigen::Vector4d::Zero()};
  }
  return {resize_bilinear(crop.image, input_size, input_size), layout_embedding(crop.rect)};
}

Eigen::VectorXd QueryEncoder::embed_raw(const QueryInput& query) const {
  auto [img, layout] = prepare(query);
  Eigen::MatrixXd feat = background_net.forward(nn::image_to_tensor(img));
  Eigen::VectorXd fused;
  if (early_input())
    fused = feat.row(0).transpose();
  else
    fused = outer_product_flatten(layout, feat.row(0).transpose());
  Eigen::MatrixXd h = head1.forward(fused.transpose(), nullptr).cwiseMax(0.0);
  return head2.forward(h, nullptr).row(0).transpose();
}

Embedding QueryEncoder::embed(const QueryInput& query) const { return l2_normalize(embed_raw(query)); }

std::vector<nn::ParamRef> QueryEncoder::head_params() {
  auto params = head1.params();
  for (auto p : head2.params()) params.push_back(p);
  return params;
}

std::vector<nn::ParamRef> QueryEncoder::all_params() {
  auto params = background_net.params();
  for (auto p : head_params()) params.push_back(p);
  return params;
}

namespace {

// Hue-class labels for background pretraining, derived from the motion value
// of each query's first compatible pattern (the synthetic rule stores the
// background color class there; for other corpora this is still a usable
// context label). Labels are densely re-indexed.
std::vector<int> background_class_labels(const DatasetCorpus& corpus,
                                         const std::vector<int>& query_indices, int* num_classes) {
  std::map<std::string, int> pattern_motion;
  for (const auto& inst : corpus.instances)
    if (inst.pattern_id && inst.attributes)
      pattern_motion[*inst.pattern_id] = inst.attributes->motion.value_or(kAttrCardinality[3]);

  std::vector<int> raw;
  raw.reserve(query_indices.size());
  for (int qi : query_indices) {
    const auto& q = corpus.queries[static_cast<size_t>(qi)];
    auto it = corpus.compatibility.find(q.id);
    int label = kAttrCardinality[3];
    if (it != corpus.compatibility.end() && !it->second.empty()) {
      auto pm = pattern_motion.find(it->second.front());
      if (pm != pattern_motion.end()) label = pm->second;
    }
    raw.push_back(label);
  }
  std::map<int, int> dense;
  for (int r : raw) dense.emplace(r, 0);
  int next = 0;
  for (auto& [k, v] : dense) v = next++;
  for (int& r : raw) r = dense[r];
  *num_classes = next;
  return raw;
}

struct QueryView {
  Eigen::VectorXd fused;   // cached fused input (frozen-background modes)
  Image image;             // prepared input image (trainable-background modes)
  Eigen::Vector4d layout;
};

struct FgView {
  Eigen::VectorXd embedding;  // cached teacher embedding (frozen-teacher modes)
  Image image;                // augmented view (trainable-teacher modes)
  int label = 0;
};

}  // namespace

QueryTrainResult train_query_encoder(const ForegroundEncoder& teacher, const DatasetCorpus& corpus,
                                     const QueryTrainConfig& cfg, uint64_t seed,
                                     std::ostream* log) {
  if (teacher.labels.empty())
    throw std::runtime_error("train_query_encoder: teacher has no trained pattern classes");
  const Rng root(seed);
  const AblationMode mode = cfg.mode;
  const bool bg_trainable =
      mode == AblationMode::kNoBgFreeze || mode == AblationMode::kBaselineProxy;
  const bool fg_trainable =
      mode == AblationMode::kMultiTask || mode == AblationMode::kBaselineProxy;
  const bool zoom_enabled = mode != AblationMode::kNoAug;

  QueryTrainResult result;
  result.fg_encoder = teacher;
  result.teacher_hash_before = result.fg_encoder.params_hash();
  if (mode == AblationMode::kBaselineProxy) {
    Rng reinit = root.fork(11);
    result.fg_encoder.init(reinit);  // no interchangeable-foreground pretraining
  }
  ForegroundEncoder& fg = result.fg_encoder;

  result.encoder = QueryEncoder(nn::ConvNetConfig{{8, 16, 32}, cfg.bg_feature_dim},
                                cfg.input_size, cfg.hidden, teacher.feature_dim(), mode);
  QueryEncoder& student = result.encoder;
  {
    Rng init_rng = root.fork(12);
    student.init(init_rng);
  }

  const std::vector<int> train_queries = corpus.query_indices(QuerySplit::kTrain);
  if (train_queries.empty()) throw std::runtime_error("train_query_encoder: no train queries");

  // --- Background-context pretraining (always from the same seed, so every
  // mode starts from the identical extractor). -------------------------------
  {
    int num_classes = 0;
    std::vector<int> labels = background_class_labels(corpus, train_queries, &num_classes);
    if (num_classes >= 2 && cfg.bg_pretrain_epochs > 0) {
      std::vector<Image> inputs;
      inputs.reserve(train_queries.size());
      for (int qi : train_queries) {
        SquareCrop crop = square_crop(corpus.queries[static_cast<size_t>(qi)].background,
                                      corpus.queries[static_cast<size_t>(qi)].rect);
        inputs.push_back(resize_bilinear(crop.image, cfg.input_size, cfg.input_size));
      }
      nn::Dense head(cfg.bg_feature_dim, num_classes);
      {
        Rng hrng = root.fork(13);
        head.init(hrng);
      }
      nn::SgdMomentum opt(cfg.bg_pretrain_lr, 0.9, 1e-4);
      auto params = student.background_net.params();
      for (auto p : head.params()) params.push_back(p);

      std::vector<size_t> order(inputs.size());
      std::iota(order.begin(), order.end(), 0);
      Rng shuf = root.fork(14);
      const int batch = 32;
      for (int epoch = 0; epoch < cfg.bg_pretrain_epochs; ++epoch) {
        shuf.shuffle(order);
        for (size_t start = 0; start < order.size(); start += batch) {
          const size_t end = std::min(order.size(), start + batch);
          std::vector<const Image*> ptrs;
          std::vector<int> batch_labels;
          for (size_t i = start; i < end; ++i) {
            ptrs.push_back(&inputs[order[i]]);
            batch_labels.push_back(labels[order[i]]);
          }
          nn::ConvFeatureNet::Ctx ctx;
          Eigen::MatrixXd feats = student.background_net.forward(nn::images_to_tensor(ptrs), &ctx);
          nn::Dense::Ctx hctx;
          Eigen::MatrixXd logits = head.forward(feats, &hctx);
          Eigen::MatrixXd dlogits;
          nn::softmax_loss(logits, batch_labels, &dlogits);
          student.background_net.zero_grad();
          head.zero_grad();
          Eigen::MatrixXd dfeat = head.backward(dlogits, hctx);
          student.background_net.backward(dfeat, ctx);
          opt.step(params);
        }
      }
    }
  }

  // --- Offline views. --------------------------------------------------------
  Rng split_rng = root.fork(15);
  std::vector<int> fit = train_queries;
  split_rng.shuffle(fit);
  size_t val_count = static_cast<size_t>(std::lround(cfg.val_fraction * fit.size()));
  val_count = std::min(val_count, fit.size() - 1);
  std::vector<int> val(fit.end() - static_cast<long>(val_count), fit.end());
  fit.resize(fit.size() - val_count);
  std::sort(fit.begin(), fit.end());
  std::sort(val.begin(), val.end());

  auto make_query_view = [&](const QueryInput& q, int view, Rng& rng) {
    QueryInput aug = q;
    if (view > 0) {
      aug.rect = augment_rectangle(aug.rect, rng);
      SquareCrop crop = square_crop(aug.background, aug.rect);
      QueryInput cropped;
      cropped.id = aug.id;
      cropped.background = std::move(crop.image);
      cropped.rect = crop.rect;
      if (zoom_enabled) cropped = augment_zoom(cropped, rng, cfg.max_zoom);
      aug = std::move(cropped);
    }
    auto [img, layout] = student.prepare(aug);
    QueryView qv;
    qv.layout = layout;
    if (bg_trainable) {
      qv.image = std::move(img);
    } else {
      Eigen::MatrixXd feat = student.background_net.forward(nn::image_to_tensor(img));
      qv.fused = student.early_input()
                     ? Eigen::VectorXd(feat.row(0).transpose())
                     : outer_product_flatten(layout, feat.row(0).transpose());
    }
    return qv;
  };

  std::map<int, std::vector<QueryView>> query_views;
  for (int qi : train_queries) {
    const auto& q = corpus.queries[static_cast<size_t>(qi)];
    auto& views = query_views[qi];
    for (int v = 0; v < std::max(cfg.query_views, 1); ++v) {
      Rng vrng = root.fork(0x20000000ull + static_cast<uint64_t>(qi) * 64 + v);
      views.push_back(make_query_view(q, v, vrng));
    }
  }

  std::map<std::string, int> fg_label_of;
  for (size_t i = 0; i < fg.labels.size(); ++i) fg_label_of[fg.labels[i]] = static_cast<int>(i);

  FgAugmentConfig fg_aug = cfg.fg_augment;
  fg_aug.out_size = fg.input_size;
  std::vector<std::vector<FgView>> fg_views(corpus.instances.size());
  for (size_t ii = 0; ii < corpus.instances.size(); ++ii) {
    const auto& inst = corpus.instances[ii];
    if (!inst.pattern_id) continue;
    auto lab = fg_label_of.find(*inst.pattern_id);
    if (lab == fg_label_of.end()) continue;
    auto& views = fg_views[ii];
    for (int v = 0; v < std::max(cfg.fg_views, 1); ++v) {
      Rng vrng = root.fork(0x30000000ull + ii * 64 + static_cast<uint64_t>(v));
      FgView fv;
      fv.label = lab->second;
      Image img = (v == 0) ? resize_bilinear(inst.image, fg.input_size, fg.input_size)
                           : augment_foreground(inst, vrng, fg_aug).image;
      if (fg_trainable) {
        fv.image = std::move(img);
      } else {
        fv.embedding = fg.embed(img);
      }
      views.push_back(std::move(fv));
    }
  }

  TripletSampler sampler(corpus, fit);
  TripletSampler val_sampler(corpus, val.empty() ? fit : val);

  // Fixed validation triplets (with fixed views).
  struct ValTriplet {
    TripletIdx t;
    int qv, pv, nv;
  };
  std::vector<ValTriplet> val_set;
  {
    Rng vrng = root.fork(16);
    for (int i = 0; i < cfg.val_triplets; ++i) {
      ValTriplet vt;
      vt.t = val_sampler.sample(vrng);
      vt.qv = static_cast<int>(vrng.uniform_int(0, std::max(cfg.query_views, 1) - 1));
      vt.pv = static_cast<int>(vrng.uniform_int(0, std::max(cfg.fg_views, 1) - 1));
      vt.nv = static_cast<int>(vrng.uniform_int(0, std::max(cfg.fg_views, 1) - 1));
      val_set.push_back(vt);
    }
  }

  // --- Optimizers. -----------------------------------------------------------
  nn::Adam student_opt(cfg.lr, cfg.beta1, cfg.beta2, cfg.eps);
  auto student_params = bg_trainable ? student.all_params() : student.head_params();
  nn::SgdMomentum teacher_opt(cfg.mt_teacher_lr, 0.9, 1e-4);
  nn::Adam joint_fg_opt(cfg.joint_fg_lr, cfg.beta1, cfg.beta2, cfg.eps);
  auto fg_params = fg.all_params();

  const int steps_per_epoch = std::max(1, cfg.triplets_per_epoch / std::max(cfg.batch, 1));
  Rng step_rng = root.fork(17);

  // Forward pass of the student head over a batch of fused inputs.
  struct HeadCtx {
    nn::Dense::Ctx h1;
    nn::ReluMat::Ctx relu;
    nn::Dense::Ctx h2;
  };
  auto head_forward = [&](const Eigen::MatrixXd& fused, HeadCtx* ctx) {
    Eigen::MatrixXd h = student.head1.forward(fused, ctx ? &ctx->h1 : nullptr);
    h = nn::ReluMat::forward(h, ctx ? &ctx->relu : nullptr);
    return student.head2.forward(h, ctx ? &ctx->h2 : nullptr);
  };

  auto eval_val_loss = [&]() {
    if (val_set.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& vt : val_set) {
      const QueryView& qv = query_views.at(vt.t.query)[static_cast<size_t>(vt.qv)];
      Eigen::VectorXd fused =
          bg_trainable
              ? (student.early_input()
                     ? Eigen::VectorXd(
                           student.background_net.forward(nn::image_to_tensor(qv.image)).row(0).transpose())
                     : outer_product_flatten(
                           qv.layout, student.background_net.forward(nn::image_to_tensor(qv.image))
                                          .row(0)
                                          .transpose()))
              : qv.fused;
      Eigen::MatrixXd q = head_forward(fused.transpose(), nullptr);
      const FgView& pv = fg_views[static_cast<size_t>(vt.t.positive)][static_cast<size_t>(vt.pv)];
      const FgView& nv = fg_views[static_cast<size_t>(vt.t.negative)][static_cast<size_t>(vt.nv)];
      Eigen::VectorXd p = fg_trainable ? fg.embed(pv.image) : pv.embedding;
      Eigen::VectorXd n = fg_trainable ? fg.embed(nv.image) : nv.embedding;
      sum += nn::triplet_loss(q.row(0).transpose(), p, n, cfg.margin);
    }
    return sum / static_cast<double>(val_set.size());
  };

  int step_id = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0, epoch_active = 0.0;
    for (int step = 0; step < steps_per_epoch; ++step, ++step_id) {
      const int B = cfg.batch;
      std::vector<TripletIdx> triplets;
      std::vector<int> qv_idx, pv_idx, nv_idx;
      for (int i = 0; i < B; ++i) {
        triplets.push_back(sampler.sample(step_rng));
        qv_idx.push_back(static_cast<int>(step_rng.uniform_int(0, std::max(cfg.query_views, 1) - 1)));
        pv_idx.push_back(static_cast<int>(step_rng.uniform_int(0, std::max(cfg.fg_views, 1) - 1)));
        nv_idx.push_back(static_cast<int>(step_rng.uniform_int(0, std::max(cfg.fg_views, 1) - 1)));
      }

      // Anchor forward.
      Eigen::MatrixXd fused(B, student.fused_dim());
      nn::ConvFeatureNet::Ctx bg_ctx;
      std::vector<Eigen::Vector4d> layouts(static_cast<size_t>(B));
      Eigen::MatrixXd bg_feats;
      if (bg_trainable) {
        std::vector<const Image*> imgs;
        for (int i = 0; i < B; ++i) {
          const QueryView& qv = query_views.at(triplets[static_cast<size_t>(i)].query)
                                    [static_cast<size_t>(qv_idx[static_cast<size_t>(i)])];
          imgs.push_back(&qv.image);
          layouts[static_cast<size_t>(i)] = qv.layout;
        }
        bg_feats = student.background_net.forward(nn::images_to_tensor(imgs), &bg_ctx);
        for (int i = 0; i < B; ++i)
          fused.row(i) = student.early_input()
                             ? bg_feats.row(i)
                             : outer_product_flatten(layouts[static_cast<size_t>(i)],
                                                     bg_feats.row(i).transpose())
                                   .transpose();
      } else {
        for (int i = 0; i < B; ++i)
          fused.row(i) = query_views.at(triplets[static_cast<size_t>(i)].query)
                             [static_cast<size_t>(qv_idx[static_cast<size_t>(i)])]
                                 .fused.transpose();
      }
      HeadCtx hctx;
      Eigen::MatrixXd q_out = head_forward(fused, &hctx);

      // Positive/negative teacher embeddings (raw features when trainable).
      Eigen::MatrixXd p_emb(B, fg.feature_dim()), n_emb(B, fg.feature_dim());
      nn::ConvFeatureNet::Ctx fg_ctx;
      std::vector<int> fg_labels;
      if (fg_trainable) {
        std::vector<const Image*> imgs;
        for (int i = 0; i < B; ++i) {
          const FgView& pv = fg_views[static_cast<size_t>(triplets[static_cast<size_t>(i)].positive)]
                                     [static_cast<size_t>(pv_idx[static_cast<size_t>(i)])];
          imgs.push_back(&pv.image);
          fg_labels.push_back(pv.label);
        }
        for (int i = 0; i < B; ++i) {
          const FgView& nv = fg_views[static_cast<size_t>(triplets[static_cast<size_t>(i)].negative)]
                                     [static_cast<size_t>(nv_idx[static_cast<size_t>(i)])];
          imgs.push_back(&nv.image);
          fg_labels.push_back(nv.label);
        }
        Eigen::MatrixXd feats = fg.features(imgs, &fg_ctx);
        p_emb = feats.topRows(B);
        n_emb = feats.bottomRows(B);
      } else {
        for (int i = 0; i < B; ++i) {
          p_emb.row(i) = fg_views[static_cast<size_t>(triplets[static_cast<size_t>(i)].positive)]
                                 [static_cast<size_t>(pv_idx[static_cast<size_t>(i)])]
                                     .embedding.transpose();
          n_emb.row(i) = fg_views[static_cast<size_t>(triplets[static_cast<size_t>(i)].negative)]
                                 [static_cast<size_t>(nv_idx[static_cast<size_t>(i)])]
                                     .embedding.transpose();
        }
      }

      // Triplet loss and gradients.
      Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(B, q_out.cols());
      Eigen::MatrixXd dp = Eigen::MatrixXd::Zero(B, fg.feature_dim());
      Eigen::MatrixXd dn = Eigen::MatrixXd::Zero(B, fg.feature_dim());
      double loss_sum = 0.0;
      int active = 0;
      for (int i = 0; i < B; ++i) {
        Eigen::VectorXd gq, gp, gn;
        const double li =
            nn::triplet_loss(q_out.row(i).transpose(), p_emb.row(i).transpose(),
                             n_emb.row(i).transpose(), cfg.margin, &gq, &gp, &gn);
        loss_sum += li;
        if (li > 0.0) ++active;
        dq.row(i) = gq.transpose() / B;
        dp.row(i) = gp.transpose() / B;
        dn.row(i) = gn.transpose() / B;
      }
      const double loss = loss_sum / B;
      const double active_frac = static_cast<double>(active) / B;

      // Student backward + step.
      student.head1.zero_grad();
      student.head2.zero_grad();
      if (bg_trainable) student.background_net.zero_grad();
      Eigen::MatrixXd dh = student.head2.backward(dq, hctx.h2);
      dh = nn::ReluMat::backward(dh, hctx.relu);
      Eigen::MatrixXd dfused = student.head1.backward(dh, hctx.h1);
      if (bg_trainable) {
        Eigen::MatrixXd dfeat(B, student.background_net.feature_dim());
        if (student.early_input()) {
          dfeat = dfused;
        } else {
          const int d = student.background_net.feature_dim();
          for (int i = 0; i < B; ++i)
            for (int j = 0; j < d; ++j) {
              double acc = 0.0;
              for (int k = 0; k < 4; ++k)
                acc += layouts[static_cast<size_t>(i)](k) * dfused(i, k * d + j);
              dfeat(i, j) = acc;
            }
        }
        student.background_net.backward(dfeat, bg_ctx);
      }
      student_opt.step(student_params);

      // Teacher updates (mode-dependent).
      if (fg_trainable) {
        Eigen::MatrixXd dfeats(2 * B, fg.feature_dim());
        dfeats.topRows(B) = dp;
        dfeats.bottomRows(B) = dn;
        fg.extractor.zero_grad();
        fg.classifier.zero_grad();
        if (mode == AblationMode::kMultiTask) {
          // Joint loss: triplet gradient plus the classification objective on
          // the same foreground batch.
          Eigen::MatrixXd feats(2 * B, fg.feature_dim());
          feats.topRows(B) = p_emb;
          feats.bottomRows(B) = n_emb;
          nn::Dense::Ctx cctx;
          Eigen::MatrixXd logits = fg.classifier.forward(feats, &cctx);
          Eigen::MatrixXd dlogits, dx;
          nn::softmax_loss(logits, fg_labels, &dlogits);
          nn::center_loss(feats, fg_labels, fg.centers, &dx);
          dfeats += fg.classifier.backward(dlogits, cctx) + cfg.mt_lambda * dx;
          fg.extractor.backward(dfeats, fg_ctx);
          teacher_opt.step(fg_params);
          nn::update_centers(fg.centers, feats, fg_labels, cfg.mt_center_lr);
        } else {  // baseline-proxy: metric learning only
          fg.extractor.backward(dfeats, fg_ctx);
          joint_fg_opt.step(fg_params);
        }
      }

      epoch_loss += loss;
      epoch_active += active_frac;
      if (log)
        (*log) << "step " << step_id << " loss " << loss << " active " << active_frac << "\n";
    }

    QueryEpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / steps_per_epoch;
    stats.active_fraction = epoch_active / steps_per_epoch;
    stats.val_loss = eval_val_loss();
    result.history.push_back(stats);
    if (log)
      (*log) << "epoch " << epoch << " train_loss " << stats.train_loss << " active "
             << stats.active_fraction << " val_loss " << stats.val_loss << "\n";
    if (cfg.early_stop_loss > 0.0 && stats.val_loss <= cfg.early_stop_loss) break;
  }

  result.teacher_hash_after = fg.params_hash();
  return result;
}

}  // namespace fos
