#pragma once

#include <string>
#include <vector>

namespace fos {

// Planar-free RGB float image, values in [0,1], row-major (y, x, channel).
struct Image {
  int h = 0;
  int w = 0;
  static constexpr int kChannels = 3;
  std::vector<float> px;

  Image() = default;
  Image(int height, int width, float fill = 0.0f)
      : h(height), w(width), px(static_cast<size_t>(height) * width * kChannels, fill) {}

  float& at(int y, int x, int c) { return px[(static_cast<size_t>(y) * w + x) * kChannels + c]; }
  float at(int y, int x, int c) const { return px[(static_cast<size_t>(y) * w + x) * kChannels + c]; }

  bool empty() const { return px.empty(); }
  size_t size() const { return px.size(); }

  static Image solid(int h, int w, float r, float g, float b);
};

// 8-bit RGB PNG round-trip. Values are quantized to 8 bits on write.
Image read_png(const std::string& path);
void write_png(const Image& img, const std::string& path);

Image resize_bilinear(const Image& src, int out_h, int out_w);

// Per-channel mean over all pixels.
void channel_mean(const Image& img, float out[3]);

// hue in [0,1) turns, s/v in [0,1].
void hsv_to_rgb(float hue, float s, float v, float& r, float& g, float& b);
void rgb_to_hsv(float r, float g, float b, float& hue, float& s, float& v);

inline float clamp01(float v) { return v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v); }

}  // namespace fos
