#include "fos/dataset/augment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fos {

Rectangle augment_rectangle(const Rectangle& rect, Rng& rng) {
  const double grow_w = rng.uniform(0.0, rect.w / 2.0);
  const double grow_h = rng.uniform(0.0, rect.h / 2.0);
  return Rectangle(rect.cx, rect.cy, std::min(rect.w + grow_w, 1.0), std::min(rect.h + grow_h, 1.0));
}

QueryInput augment_zoom(const QueryInput& query, Rng& rng, double max_zoom) {
  const Image& bg = query.background;
  const int W = bg.w, H = bg.h;
  const int S = std::min(W, H);

  // Pixel extent of the rectangle (at least one pixel).
  const int rx0 = std::clamp(static_cast<int>(std::floor(query.rect.x0() * W)), 0, W - 1);
  const int ry0 = std::clamp(static_cast<int>(std::floor(query.rect.y0() * H)), 0, H - 1);
  const int rx1 = std::clamp(static_cast<int>(std::ceil(query.rect.x1() * W)), rx0 + 1, W);
  const int ry1 = std::clamp(static_cast<int>(std::ceil(query.rect.y1() * H)), ry0 + 1, H);

  const int min_side_rect = std::max(rx1 - rx0, ry1 - ry0);
  const int min_side_zoom = static_cast<int>(std::ceil(S / std::max(max_zoom, 1.0)));
  const int lo = std::min(S, std::max(min_side_rect, min_side_zoom));
  const int side = static_cast<int>(rng.uniform_int(lo, S));

  const int x_lo = std::max(0, rx1 - side), x_hi = std::min(rx0, W - side);
  const int y_lo = std::max(0, ry1 - side), y_hi = std::min(ry0, H - side);
  const int x0 = x_lo >= x_hi ? x_lo : static_cast<int>(rng.uniform_int(x_lo, x_hi));
  const int y0 = y_lo >= y_hi ? y_lo : static_cast<int>(rng.uniform_int(y_lo, y_hi));

  Image window(side, side);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      for (int c = 0; c < 3; ++c) window.at(y, x, c) = bg.at(y0 + y, x0 + x, c);

  QueryInput out;
  out.id = query.id;
  out.split = query.split;
  out.background = (side == S) ? std::move(window) : resize_bilinear(window, S, S);
  out.rect = Rectangle((query.rect.cx * W - x0) / side, (query.rect.cy * H - y0) / side,
                       std::min(1.0, query.rect.w * W / side),
                       std::min(1.0, query.rect.h * H / side));
  return out;
}

namespace {

bool is_background_white(const Image& img, int y, int x) {
  return img.at(y, x, 0) >= 0.999f && img.at(y, x, 1) >= 0.999f && img.at(y, x, 2) >= 0.999f;
}

void jitter_pixel(float& r, float& g, float& b, double fb, double fc, double fs, double dh) {
  if (fb != 1.0) {  // brightness
    r = clamp01(static_cast<float>(r * fb));
    g = clamp01(static_cast<float>(g * fb));
    b = clamp01(static_cast<float>(b * fb));
  }
  if (fc != 1.0) {  // contrast around mid-gray
    r = clamp01(static_cast<float>(0.5 + fc * (r - 0.5)));
    g = clamp01(static_cast<float>(0.5 + fc * (g - 0.5)));
    b = clamp01(static_cast<float>(0.5 + fc * (b - 0.5)));
  }
  if (fs != 1.0) {  // saturation toward luma
    const float luma = 0.299f * r + 0.587f * g + 0.114f * b;
    r = clamp01(static_cast<float>(luma + fs * (r - luma)));
    g = clamp01(static_cast<float>(luma + fs * (g - luma)));
    b = clamp01(static_cast<float>(luma + fs * (b - luma)));
  }
  if (dh != 0.0) {  // hue rotation
    float h, s, v;
    rgb_to_hsv(r, g, b, h, s, v);
    h += static_cast<float>(dh);
    h -= std::floor(h);
    hsv_to_rgb(h, s, v, r, g, b);
  }
}

}  // namespace

ForegroundInstance augment_foreground(const ForegroundInstance& fg, Rng& rng,
                                      const FgAugmentConfig& cfg) {
  const Image& src = fg.image;
  if (src.empty()) throw std::runtime_error("augment_foreground: empty image");

  // Random white padding per side, then re-square with white.
  const int side = std::max(src.h, src.w);
  auto pad_amount = [&]() {
    return static_cast<int>(std::lround(rng.uniform(0.0, cfg.max_pad_frac) * side));
  };
  const int pl = pad_amount(), pr = pad_amount(), pt = pad_amount(), pb = pad_amount();
  int ph = src.h + pt + pb, pw = src.w + pl + pr;
  const int canvas = std::max(ph, pw);
  Image padded = Image::solid(canvas, canvas, 1.0f, 1.0f, 1.0f);
  const int ox = pl + (canvas - pw) / 2, oy = pt + (canvas - ph) / 2;
  for (int y = 0; y < src.h; ++y)
    for (int x = 0; x < src.w; ++x)
      for (int c = 0; c < 3; ++c) padded.at(oy + y, ox + x, c) = src.at(y, x, c);

  // Jitter factors; forced to identity when the magnitudes are zero.
  const double fb = rng.uniform(std::max(0.0, 1.0 - cfg.brightness), 1.0 + cfg.brightness);
  const double fc = rng.uniform(std::max(0.0, 1.0 - cfg.contrast), 1.0 + cfg.contrast);
  const double fs = rng.uniform(std::max(0.0, 1.0 - cfg.saturation), 1.0 + cfg.saturation);
  const double dh = rng.uniform(-cfg.hue, cfg.hue);
  for (int y = 0; y < padded.h; ++y)
    for (int x = 0; x < padded.w; ++x) {
      if (is_background_white(padded, y, x)) continue;
      jitter_pixel(padded.at(y, x, 0), padded.at(y, x, 1), padded.at(y, x, 2), fb, fc, fs, dh);
    }

  ForegroundInstance out;
  out.id = fg.id;
  out.attributes = fg.attributes;
  out.pattern_id = fg.pattern_id;
  out.image = resize_bilinear(padded, cfg.out_size, cfg.out_size);
  return out;
}

}  // namespace fos
