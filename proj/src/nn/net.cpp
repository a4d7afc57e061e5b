#include "fos/nn/net.hpp"

#include <stdexcept>

#include "fos/hash.hpp"

namespace fos::nn {

ConvFeatureNet::ConvFeatureNet(ConvNetConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.channels.empty()) throw std::runtime_error("ConvFeatureNet: no channels");
  int in_c = 3;
  for (int c : cfg_.channels) {
    convs_.emplace_back(in_c, c);
    in_c = c;
  }
  fc_ = Dense(in_c, cfg_.feature_dim);
}

void ConvFeatureNet::init(Rng& rng) {
  for (auto& c : convs_) c.init(rng);
  fc_.init(rng);
}

Eigen::MatrixXd ConvFeatureNet::forward(const Tensor& x, Ctx* ctx) const {
  if (ctx) {
    ctx->conv.resize(convs_.size());
    ctx->relu.resize(convs_.size());
    ctx->pool.resize(convs_.size());
  }
  Tensor t = x;
  for (size_t i = 0; i < convs_.size(); ++i) {
    t = convs_[i].forward(t, ctx ? &ctx->conv[i] : nullptr);
    t = Relu::forward(t, ctx ? &ctx->relu[i] : nullptr);
    t = MaxPool2::forward(t, ctx ? &ctx->pool[i] : nullptr);
  }
  Eigen::MatrixXd pooled = GlobalAvgPool::forward(t, ctx ? &ctx->gap : nullptr);
  return fc_.forward(pooled, ctx ? &ctx->fc : nullptr);
}

void ConvFeatureNet::backward(const Eigen::MatrixXd& dfeat, const Ctx& ctx) {
  Eigen::MatrixXd dpool = fc_.backward(dfeat, ctx.fc);
  Tensor dt = GlobalAvgPool::backward(dpool, ctx.gap);
  for (size_t i = convs_.size(); i-- > 0;) {
    dt = MaxPool2::backward(dt, ctx.pool[i]);
    dt = Relu::backward(dt, ctx.relu[i]);
    dt = convs_[i].backward(dt, ctx.conv[i], i > 0);
  }
}

void ConvFeatureNet::zero_grad() {
  for (auto& c : convs_) c.zero_grad();
  fc_.zero_grad();
}

std::vector<ParamRef> ConvFeatureNet::params() {
  std::vector<ParamRef> out;
  for (auto& c : convs_)
    for (auto p : c.params()) out.push_back(p);
  for (auto p : fc_.params()) out.push_back(p);
  return out;
}

std::vector<std::pair<std::string, Eigen::MatrixXd*>> ConvFeatureNet::named_arrays() {
  std::vector<std::pair<std::string, Eigen::MatrixXd*>> out;
  for (size_t i = 0; i < convs_.size(); ++i) {
    out.emplace_back("conv" + std::to_string(i) + ".w", &convs_[i].W);
    out.emplace_back("conv" + std::to_string(i) + ".b", &convs_[i].b);
  }
  out.emplace_back("fc.w", &fc_.W);
  out.emplace_back("fc.b", &fc_.b);
  return out;
}

Tensor images_to_tensor(const std::vector<const Image*>& batch) {
  if (batch.empty()) throw std::runtime_error("images_to_tensor: empty batch");
  const int h = batch[0]->h, w = batch[0]->w;
  Tensor t(static_cast<int>(batch.size()), 3, h, w);
  for (size_t i = 0; i < batch.size(); ++i) {
    const Image& img = *batch[i];
    if (img.h != h || img.w != w) throw std::runtime_error("images_to_tensor: mixed sizes");
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          t.at(static_cast<int>(i), c, y, x) = static_cast<double>(img.at(y, x, c));
  }
  return t;
}

Tensor image_to_tensor(const Image& img) { return images_to_tensor({&img}); }

std::string params_checksum(const std::vector<ParamRef>& params) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& p : params)
    h = fnv1a64(p.value->data(), sizeof(double) * static_cast<size_t>(p.value->size()), h);
  return hash_hex(h);
}

}  // namespace fos::nn
