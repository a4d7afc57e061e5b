#include "fos/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace fos::nn {

namespace {

// im2col for 3x3/stride1/pad1: out (in_c*9) × (h*w).
void im2col_3x3(const double* img, int c, int h, int w, Eigen::MatrixXd& cols) {
  cols.setZero(c * 9, static_cast<Eigen::Index>(h) * w);
  for (int ci = 0; ci < c; ++ci) {
    const double* plane = img + static_cast<size_t>(ci) * h * w;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const int row = ci * 9 + ky * 3 + kx;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          for (int x = 0; x < w; ++x) {
            const int sx = x + kx - 1;
            if (sx < 0 || sx >= w) continue;
            cols(row, static_cast<Eigen::Index>(y) * w + x) = plane[static_cast<size_t>(sy) * w + sx];
          }
        }
      }
    }
  }
}

void col2im_3x3(const Eigen::MatrixXd& cols, int c, int h, int w, double* img) {
  for (int ci = 0; ci < c; ++ci) {
    double* plane = img + static_cast<size_t>(ci) * h * w;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const int row = ci * 9 + ky * 3 + kx;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          for (int x = 0; x < w; ++x) {
            const int sx = x + kx - 1;
            if (sx < 0 || sx >= w) continue;
            plane[static_cast<size_t>(sy) * w + sx] += cols(row, static_cast<Eigen::Index>(y) * w + x);
          }
        }
      }
    }
  }
}

}  // namespace

Conv3x3::Conv3x3(int in_channels, int out_channels) : in_c(in_channels), out_c(out_channels) {
  W.setZero(out_c, in_c * 9);
  b.setZero(out_c, 1);
  gW.setZero(out_c, in_c * 9);
  gb.setZero(out_c, 1);
}

void Conv3x3::init(Rng& rng) {
  const double std = std::sqrt(2.0 / (in_c * 9));
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = rng.normal() * std;
  b.setZero();
}

void Conv3x3::zero_grad() {
  gW.setZero();
  gb.setZero();
}

Tensor Conv3x3::forward(const Tensor& x, Ctx* ctx) const {
  if (x.c != in_c) throw std::runtime_error("Conv3x3: channel mismatch");
  Tensor y(x.n, out_c, x.h, x.w);
  Eigen::MatrixXd cols;
  if (ctx) {
    ctx->cols.resize(x.n);
    ctx->h = x.h;
    ctx->w = x.w;
  }
  for (int i = 0; i < x.n; ++i) {
    Eigen::MatrixXd& c = ctx ? ctx->cols[i] : cols;
    im2col_3x3(x.image(i), x.c, x.h, x.w, c);
    Eigen::Map<Eigen::MatrixXd> out(y.image(i), static_cast<Eigen::Index>(x.h) * x.w, out_c);
    // out is (h*w) × out_c column-major == out_c × (h*w) row-major planes
    out.noalias() = (W * c).transpose();
    for (int oc = 0; oc < out_c; ++oc) out.col(oc).array() += b(oc, 0);
  }
  return y;
}

Tensor Conv3x3::backward(const Tensor& dy, const Ctx& ctx, bool need_dx) {
  Tensor dx;
  if (need_dx) dx = Tensor(dy.n, in_c, ctx.h, ctx.w);
  for (int i = 0; i < dy.n; ++i) {
    Eigen::Map<const Eigen::MatrixXd> g(dy.image(i), static_cast<Eigen::Index>(dy.h) * dy.w,
                                        out_c);
    // g is (h*w) × out_c; per-plane row-major view of the NCHW gradient
    gW.noalias() += g.transpose() * ctx.cols[i].transpose();
    gb += g.colwise().sum().transpose();
    if (need_dx) {
      Eigen::MatrixXd dcols = W.transpose() * g.transpose();
      col2im_3x3(dcols, in_c, ctx.h, ctx.w, dx.image(i));
    }
  }
  return dx;
}

std::vector<ParamRef> Conv3x3::params() { return {{&W, &gW}, {&b, &gb}}; }

Tensor Relu::forward(const Tensor& x, Ctx* ctx) {
  Tensor y = x;
  if (ctx) ctx->mask.assign(x.v.size(), 0);
  for (size_t i = 0; i < y.v.size(); ++i) {
    if (y.v[i] > 0.0) {
      if (ctx) ctx->mask[i] = 1;
    } else {
      y.v[i] = 0.0;
    }
  }
  return y;
}

Tensor Relu::backward(const Tensor& dy, const Ctx& ctx) {
  Tensor dx = dy;
  for (size_t i = 0; i < dx.v.size(); ++i)
    if (!ctx.mask[i]) dx.v[i] = 0.0;
  return dx;
}

Tensor MaxPool2::forward(const Tensor& x, Ctx* ctx) {
  const int oh = x.h / 2, ow = x.w / 2;
  Tensor y(x.n, x.c, oh, ow);
  if (ctx) {
    ctx->argmax.assign(y.v.size(), 0);
    ctx->in_h = x.h;
    ctx->in_w = x.w;
    ctx->n = x.n;
    ctx->c = x.c;
  }
  size_t oi = 0;
  for (int i = 0; i < x.n; ++i)
    for (int c = 0; c < x.c; ++c)
      for (int y0 = 0; y0 < oh; ++y0)
        for (int x0 = 0; x0 < ow; ++x0, ++oi) {
          double best = -1e300;
          int32_t best_idx = 0;
          for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
              const int sy = y0 * 2 + dy, sx = x0 * 2 + dx;
              const size_t idx = ((static_cast<size_t>(i) * x.c + c) * x.h + sy) * x.w + sx;
              if (x.v[idx] > best) {
                best = x.v[idx];
                best_idx = static_cast<int32_t>(idx);
              }
            }
          y.v[oi] = best;
          if (ctx) ctx->argmax[oi] = best_idx;
        }
  return y;
}

Tensor MaxPool2::backward(const Tensor& dy, const Ctx& ctx) {
  Tensor dx(ctx.n, ctx.c, ctx.in_h, ctx.in_w);
  for (size_t i = 0; i < dy.v.size(); ++i) dx.v[static_cast<size_t>(ctx.argmax[i])] += dy.v[i];
  return dx;
}

Eigen::MatrixXd GlobalAvgPool::forward(const Tensor& x, Ctx* ctx) {
  if (ctx) {
    ctx->h = x.h;
    ctx->w = x.w;
  }
  Eigen::MatrixXd y(x.n, x.c);
  const double inv = 1.0 / (static_cast<double>(x.h) * x.w);
  for (int i = 0; i < x.n; ++i)
    for (int c = 0; c < x.c; ++c) {
      const double* plane = x.image(i) + static_cast<size_t>(c) * x.h * x.w;
      double s = 0.0;
      for (size_t k = 0; k < x.plane(); ++k) s += plane[k];
      y(i, c) = s * inv;
    }
  return y;
}

Tensor GlobalAvgPool::backward(const Eigen::MatrixXd& dy, const Ctx& ctx) {
  Tensor dx(static_cast<int>(dy.rows()), static_cast<int>(dy.cols()), ctx.h, ctx.w);
  const double inv = 1.0 / (static_cast<double>(ctx.h) * ctx.w);
  for (int i = 0; i < dx.n; ++i)
    for (int c = 0; c < dx.c; ++c) {
      double g = dy(i, c) * inv;
      double* plane = dx.image(i) + static_cast<size_t>(c) * ctx.h * ctx.w;
      for (size_t k = 0; k < dx.plane(); ++k) plane[k] = g;
    }
  return dx;
}

Dense::Dense(int in_dim, int out_dim) : in(in_dim), out(out_dim) {
  W.setZero(out, in);
  b.setZero(out, 1);
  gW.setZero(out, in);
  gb.setZero(out, 1);
}

void Dense::init(Rng& rng) {
  const double limit = std::sqrt(6.0 / (in + out));
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = rng.uniform(-limit, limit);
  b.setZero();
}

void Dense::zero_grad() {
  gW.setZero();
  gb.setZero();
}

Eigen::MatrixXd Dense::forward(const Eigen::MatrixXd& x, Ctx* ctx) const {
  if (x.cols() != in) throw std::runtime_error("Dense: input dimension mismatch");
  if (ctx) ctx->x = x;
  Eigen::MatrixXd y = x * W.transpose();
  y.rowwise() += b.col(0).transpose();
  return y;
}

Eigen::MatrixXd Dense::backward(const Eigen::MatrixXd& dy, const Ctx& ctx) {
  gW.noalias() += dy.transpose() * ctx.x;
  gb += dy.colwise().sum().transpose();
  return dy * W;
}

std::vector<ParamRef> Dense::params() { return {{&W, &gW}, {&b, &gb}}; }

Eigen::MatrixXd ReluMat::forward(const Eigen::MatrixXd& x, Ctx* ctx) {
  Eigen::MatrixXd y = x.cwiseMax(0.0);
  if (ctx) ctx->mask = (x.array() > 0.0).cast<double>();
  return y;
}

Eigen::MatrixXd ReluMat::backward(const Eigen::MatrixXd& dy, const Ctx& ctx) {
  return dy.cwiseProduct(ctx.mask);
}

}  // namespace fos::nn
