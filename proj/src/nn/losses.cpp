#include "fos/nn/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace fos::nn {

double softmax_loss(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
                    Eigen::MatrixXd* dlogits) {
  const Eigen::Index m = logits.rows();
  const Eigen::Index k = logits.cols();
  if (m == 0) throw std::runtime_error("softmax_loss: empty batch");
  if (static_cast<Eigen::Index>(labels.size()) != m)
    throw std::runtime_error("softmax_loss: label count mismatch");
  if (!logits.allFinite()) throw std::runtime_error("softmax_loss: non-finite logits");

  double loss = 0.0;
  if (dlogits) dlogits->setZero(m, k);
  for (Eigen::Index i = 0; i < m; ++i) {
    const int y = labels[static_cast<size_t>(i)];
    if (y < 0 || y >= k) throw std::runtime_error("softmax_loss: label out of range");
    const double mx = logits.row(i).maxCoeff();
    Eigen::ArrayXd e = (logits.row(i).array() - mx).exp();
    const double z = e.sum();
    loss += -(logits(i, y) - mx - std::log(z));
    if (dlogits) {
      dlogits->row(i) = (e / z).matrix().transpose() / static_cast<double>(m);
      (*dlogits)(i, y) -= 1.0 / static_cast<double>(m);
    }
  }
  return loss / static_cast<double>(m);
}

double center_loss(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                   const Eigen::MatrixXd& centers, Eigen::MatrixXd* dx) {
  const Eigen::Index m = x.rows();
  if (static_cast<Eigen::Index>(labels.size()) != m)
    throw std::runtime_error("center_loss: label count mismatch");
  if (centers.cols() != x.cols()) throw std::runtime_error("center_loss: dimension mismatch");

  double loss = 0.0;
  if (dx) dx->setZero(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    const int y = labels[static_cast<size_t>(i)];
    if (y < 0 || y >= centers.rows()) throw std::runtime_error("center_loss: label out of range");
    Eigen::VectorXd diff = x.row(i).transpose() - centers.row(y).transpose();
    loss += 0.5 * diff.squaredNorm();
    if (dx) dx->row(i) = diff.transpose();
  }
  return loss;
}

double total_fg_loss(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& x,
                     const std::vector<int>& labels, const Eigen::MatrixXd& centers,
                     double lambda, Eigen::MatrixXd* dlogits, Eigen::MatrixXd* dx) {
  const double ls = softmax_loss(logits, labels, dlogits);
  const double lc = center_loss(x, labels, centers, dx);
  if (dx) *dx *= lambda;
  return ls + lambda * lc;
}

void update_centers(Eigen::MatrixXd& centers, const Eigen::MatrixXd& x,
                    const std::vector<int>& labels, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::runtime_error("update_centers: alpha not in (0,1]");
  const Eigen::Index m = x.rows();
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(centers.rows(), centers.cols());
  Eigen::VectorXd count = Eigen::VectorXd::Zero(centers.rows());
  for (Eigen::Index i = 0; i < m; ++i) {
    const int y = labels[static_cast<size_t>(i)];
    if (y < 0 || y >= centers.rows())
      throw std::runtime_error("update_centers: label out of range");
    delta.row(y) += centers.row(y) - x.row(i);
    count(y) += 1.0;
  }
  for (Eigen::Index j = 0; j < centers.rows(); ++j) {
    if (count(j) > 0.0) centers.row(j) -= alpha * delta.row(j) / (1.0 + count(j));
  }
}

double cosine_with_grad(const Eigen::VectorXd& a, const Eigen::VectorXd& b, Eigen::VectorXd* da,
                        Eigen::VectorXd* db) {
  if (a.size() != b.size()) throw std::runtime_error("cosine_with_grad: dimension mismatch");
  const double na = a.norm(), nb = b.norm();
  if (na <= 0.0 || nb <= 0.0) throw std::runtime_error("cosine_with_grad: zero vector");
  const double s = a.dot(b) / (na * nb);
  if (da) *da = b / (na * nb) - s * a / (na * na);
  if (db) *db = a / (na * nb) - s * b / (nb * nb);
  return s;
}

double triplet_loss(const Eigen::VectorXd& q, const Eigen::VectorXd& p, const Eigen::VectorXd& n,
                    double margin, Eigen::VectorXd* dq, Eigen::VectorXd* dp, Eigen::VectorXd* dn) {
  Eigen::VectorXd dq_p, dp_p, dq_n, dn_n;
  const bool want = dq || dp || dn;
  const double sp = cosine_with_grad(q, p, want ? &dq_p : nullptr, want ? &dp_p : nullptr);
  const double sn = cosine_with_grad(q, n, want ? &dq_n : nullptr, want ? &dn_n : nullptr);
  const double raw = sn - sp + margin;
  if (dq) dq->setZero(q.size());
  if (dp) dp->setZero(p.size());
  if (dn) dn->setZero(n.size());
  if (raw <= 0.0) return 0.0;
  if (dq) *dq = dq_n - dq_p;
  if (dp) *dp = -dp_p;
  if (dn) *dn = dn_n;
  return raw;
}

}  // namespace fos::nn
