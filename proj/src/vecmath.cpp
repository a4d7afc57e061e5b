#include "fos/vecmath.hpp"

#include <stdexcept>

namespace fos {

Eigen::VectorXd l2_normalize(const Eigen::VectorXd& v) {
  double n = v.norm();
  if (n <= 0.0 || !std::isfinite(n))
    throw std::runtime_error("l2_normalize: zero or non-finite vector");
  return v / n;
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size())
    throw std::runtime_error("cosine_similarity: dimension mismatch");
  double s = a.dot(b);
  if (s > 1.0) s = 1.0;
  if (s < -1.0) s = -1.0;
  return s;
}

Eigen::VectorXd outer_product_flatten(const Eigen::VectorXd& layout, const Eigen::VectorXd& v) {
  if (layout.size() != 4) throw std::runtime_error("outer_product_flatten: layout must be 4-d");
  const Eigen::Index d = v.size();
  Eigen::VectorXd out(4 * d);
  for (Eigen::Index i = 0; i < 4; ++i) out.segment(i * d, d) = layout(i) * v;
  return out;
}

}  // namespace fos
