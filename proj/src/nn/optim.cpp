#include "fos/nn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace fos::nn {

void SgdMomentum::step(const std::vector<ParamRef>& params) {
  if (vel_.empty()) {
    vel_.reserve(params.size());
    for (const auto& p : params) vel_.push_back(Eigen::MatrixXd::Zero(p.value->rows(), p.value->cols()));
  }
  if (vel_.size() != params.size()) throw std::runtime_error("SgdMomentum: param set changed");
  for (size_t i = 0; i < params.size(); ++i) {
    Eigen::MatrixXd g = *params[i].grad + weight_decay_ * (*params[i].value);
    vel_[i] = momentum_ * vel_[i] - lr_ * g;
    *params[i].value += vel_[i];
  }
}

void Adam::step(const std::vector<ParamRef>& params) {
  if (m_.empty()) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const auto& p : params) {
      m_.push_back(Eigen::MatrixXd::Zero(p.value->rows(), p.value->cols()));
      v_.push_back(Eigen::MatrixXd::Zero(p.value->rows(), p.value->cols()));
    }
  }
  if (m_.size() != params.size()) throw std::runtime_error("Adam: param set changed");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  for (size_t i = 0; i < params.size(); ++i) {
    const Eigen::MatrixXd& g = *params[i].grad;
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
    Eigen::MatrixXd mhat = m_[i] / bc1;
    Eigen::MatrixXd vhat = v_[i] / bc2;
    params[i].value->array() -= lr_ * mhat.array() / (vhat.array().sqrt() + eps_);
  }
}

}  // namespace fos::nn
