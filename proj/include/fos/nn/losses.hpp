#pragma once

#include <Eigen/Core>
#include <vector>

namespace fos::nn {

// Mean cross-entropy of softmax over classes. logits: batch × K.
// Throws on non-finite logits or out-of-range labels.
double softmax_loss(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
                    Eigen::MatrixXd* dlogits = nullptr);

// (1/2) * sum_i ||x_i - c_{y_i}||^2, summed over the batch (not averaged).
double center_loss(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                   const Eigen::MatrixXd& centers, Eigen::MatrixXd* dx = nullptr);

// softmax + lambda * center.
double total_fg_loss(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& x,
                     const std::vector<int>& labels, const Eigen::MatrixXd& centers,
                     double lambda, Eigen::MatrixXd* dlogits = nullptr,
                     Eigen::MatrixXd* dx = nullptr);

// Per-class center update, moving each present class center toward the batch
// mean of its samples: c_j <- c_j - alpha * sum_{y_i=j}(c_j - x_i) / (1 + n_j).
// Centers of classes absent from the batch are untouched.
void update_centers(Eigen::MatrixXd& centers, const Eigen::MatrixXd& x,
                    const std::vector<int>& labels, double alpha);

// Cosine similarity with the normalization inside, plus gradients w.r.t. the
// raw (not necessarily unit) inputs. Throws on zero vectors.
double cosine_with_grad(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                        Eigen::VectorXd* da = nullptr, Eigen::VectorXd* db = nullptr);

// Hinge on cosine similarities: max(0, cos(q,n) - cos(q,p) + margin).
// Inputs may be unnormalized; cosine normalizes internally, so gradients are
// exact for raw encoder outputs.
double triplet_loss(const Eigen::VectorXd& q, const Eigen::VectorXd& p, const Eigen::VectorXd& n,
                    double margin, Eigen::VectorXd* dq = nullptr, Eigen::VectorXd* dp = nullptr,
                    Eigen::VectorXd* dn = nullptr);

}  // namespace fos::nn
