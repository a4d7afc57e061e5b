#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "fos/image.hpp"
#include "fos/nn/layers.hpp"
#include "fos/nn/tensor.hpp"

namespace fos::nn {

// Small convolutional feature extractor: three conv/relu/maxpool blocks,
// global average pooling and a final projection to feature_dim. Input size
// is free (global pooling), so the same net runs at 32 px for tests and
// 256 px for the full-scale preset.
struct ConvNetConfig {
  std::vector<int> channels = {8, 16, 32};
  int feature_dim = 32;

  bool operator==(const ConvNetConfig&) const = default;
};

class ConvFeatureNet {
 public:
  ConvFeatureNet() = default;
  explicit ConvFeatureNet(ConvNetConfig cfg);

  void init(Rng& rng);

  struct Ctx {
    std::vector<Conv3x3::Ctx> conv;
    std::vector<Relu::Ctx> relu;
    std::vector<MaxPool2::Ctx> pool;
    GlobalAvgPool::Ctx gap;
    Dense::Ctx fc;
  };

  // images (n,3,h,w) -> features (n × feature_dim). Reentrant when ctx-free
  // callers hold the params frozen.
  Eigen::MatrixXd forward(const Tensor& x, Ctx* ctx = nullptr) const;

  // Accumulates parameter gradients from dfeat (n × feature_dim).
  void backward(const Eigen::MatrixXd& dfeat, const Ctx& ctx);

  void zero_grad();
  std::vector<ParamRef> params();

  const ConvNetConfig& config() const { return cfg_; }
  int feature_dim() const { return cfg_.feature_dim; }

  // Named weight matrices, in a stable order, for checkpointing.
  std::vector<std::pair<std::string, Eigen::MatrixXd*>> named_arrays();

 private:
  ConvNetConfig cfg_;
  std::vector<Conv3x3> convs_;
  Dense fc_;
};

// Packs float images into an NCHW double tensor.
Tensor images_to_tensor(const std::vector<const Image*>& batch);
Tensor image_to_tensor(const Image& img);

// Hash of all parameter bytes; used to assert frozen-weights contracts.
std::string params_checksum(const std::vector<ParamRef>& params);

}  // namespace fos::nn
