#pragma once

#include <Eigen/Core>
#include <vector>

#include "fos/nn/layers.hpp"

namespace fos::nn {

// SGD with momentum and decoupled-from-loss L2 weight decay:
//   v = momentum*v - lr*(g + weight_decay*w);  w += v
class SgdMomentum {
 public:
  SgdMomentum(double lr, double momentum, double weight_decay)
      : lr_(lr), momentum_(momentum), weight_decay_(weight_decay) {}

  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }

  void step(const std::vector<ParamRef>& params);

 private:
  double lr_, momentum_, weight_decay_;
  std::vector<Eigen::MatrixXd> vel_;
};

class Adam {
 public:
  Adam(double lr, double beta1, double beta2, double eps)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const std::vector<ParamRef>& params);

 private:
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  std::vector<Eigen::MatrixXd> m_, v_;
};

}  // namespace fos::nn
