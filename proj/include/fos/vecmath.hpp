#pragma once

#include <Eigen/Core>

namespace fos {

// Returns v / ||v||. Throws on a zero vector (degenerate embedding).
Eigen::VectorXd l2_normalize(const Eigen::VectorXd& v);

// Dot product of unit vectors, clamped into [-1,1] to absorb float drift
// before ranking. Throws on dimension mismatch.
double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Bilinear fusion of a 4-d layout vector with a d-dim feature:
// out[i*d + j] = l[i] * v[j] (layout-major flattening, fixed contract).
Eigen::VectorXd outer_product_flatten(const Eigen::VectorXd& layout, const Eigen::VectorXd& v);

}  // namespace fos
