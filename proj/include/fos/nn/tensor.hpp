#pragma once

#include <cstddef>
#include <vector>

namespace fos::nn {

// Batched feature maps, NCHW layout, double precision.
struct Tensor {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_), v(static_cast<size_t>(n_) * c_ * h_ * w_, 0.0) {}

  size_t plane() const { return static_cast<size_t>(h) * w; }
  size_t per_image() const { return static_cast<size_t>(c) * h * w; }

  double* image(int i) { return v.data() + per_image() * i; }
  const double* image(int i) const { return v.data() + per_image() * i; }

  double& at(int i, int ci, int y, int x) {
    return v[((static_cast<size_t>(i) * c + ci) * h + y) * w + x];
  }
  double at(int i, int ci, int y, int x) const {
    return v[((static_cast<size_t>(i) * c + ci) * h + y) * w + x];
  }
};

}  // namespace fos::nn
