#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "fos/nn/tensor.hpp"
#include "fos/rng.hpp"

namespace fos::nn {

struct ParamRef {
  Eigen::MatrixXd* value;
  Eigen::MatrixXd* grad;
};

// 3x3 convolution, stride 1, zero padding 1 (spatial size preserved).
// Implemented as im2col + GEMM.
struct Conv3x3 {
  int in_c = 0, out_c = 0;
  Eigen::MatrixXd W;   // out_c × in_c*9
  Eigen::MatrixXd b;   // out_c × 1
  Eigen::MatrixXd gW;
  Eigen::MatrixXd gb;

  struct Ctx {
    std::vector<Eigen::MatrixXd> cols;  // per image: (in_c*9) × (h*w)
    int h = 0, w = 0;
  };

  Conv3x3() = default;
  Conv3x3(int in_channels, int out_channels);
  void init(Rng& rng);  // He-normal
  void zero_grad();
  Tensor forward(const Tensor& x, Ctx* ctx) const;
  // Accumulates gW/gb; returns dx when need_dx.
  Tensor backward(const Tensor& dy, const Ctx& ctx, bool need_dx);
  std::vector<ParamRef> params();
};

// ReLU; ctx keeps the activation mask.
struct Relu {
  struct Ctx {
    std::vector<uint8_t> mask;
  };
  static Tensor forward(const Tensor& x, Ctx* ctx);
  static Tensor backward(const Tensor& dy, const Ctx& ctx);
};

// 2x2 max pooling, stride 2; trailing odd row/col dropped.
struct MaxPool2 {
  struct Ctx {
    std::vector<int32_t> argmax;  // flat index into the input tensor
    int in_h = 0, in_w = 0, n = 0, c = 0;
  };
  static Tensor forward(const Tensor& x, Ctx* ctx);
  static Tensor backward(const Tensor& dy, const Ctx& ctx);
};

// Global average pooling to a (n × c) matrix.
struct GlobalAvgPool {
  struct Ctx {
    int h = 0, w = 0;
  };
  static Eigen::MatrixXd forward(const Tensor& x, Ctx* ctx);
  static Tensor backward(const Eigen::MatrixXd& dy, const Ctx& ctx);
};

// Fully connected layer on (batch × in) matrices.
struct Dense {
  int in = 0, out = 0;
  Eigen::MatrixXd W;  // out × in
  Eigen::MatrixXd b;  // out × 1
  Eigen::MatrixXd gW;
  Eigen::MatrixXd gb;

  struct Ctx {
    Eigen::MatrixXd x;  // batch × in
  };

  Dense() = default;
  Dense(int in_dim, int out_dim);
  void init(Rng& rng);  // Glorot-uniform
  void zero_grad();
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Ctx* ctx) const;
  Eigen::MatrixXd backward(const Eigen::MatrixXd& dy, const Ctx& ctx);
  std::vector<ParamRef> params();
};

// ReLU on feature matrices (used by the projection head).
struct ReluMat {
  struct Ctx {
    Eigen::MatrixXd mask;
  };
  static Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Ctx* ctx);
  static Eigen::MatrixXd backward(const Eigen::MatrixXd& dy, const Ctx& ctx);
};

}  // namespace fos::nn
