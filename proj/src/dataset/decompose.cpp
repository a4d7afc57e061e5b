#include "fos/dataset/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fos {

Image mean_fill_inpaint(const Image& image, const std::vector<uint8_t>& mask) {
  if (mask.size() != static_cast<size_t>(image.h) * image.w)
    throw std::runtime_error("mean_fill_inpaint: mask size mismatch");
  double acc[3] = {0, 0, 0};
  size_t kept = 0;
  for (int y = 0; y < image.h; ++y)
    for (int x = 0; x < image.w; ++x) {
      if (mask[static_cast<size_t>(y) * image.w + x]) continue;
      for (int c = 0; c < 3; ++c) acc[c] += image.at(y, x, c);
      ++kept;
    }
  if (kept == 0) throw std::runtime_error("mean_fill_inpaint: mask covers entire image");
  float mean[3];
  for (int c = 0; c < 3; ++c) mean[c] = static_cast<float>(acc[c] / static_cast<double>(kept));

  Image out = image;
  for (int y = 0; y < image.h; ++y)
    for (int x = 0; x < image.w; ++x)
      if (mask[static_cast<size_t>(y) * image.w + x])
        for (int c = 0; c < 3; ++c) out.at(y, x, c) = mean[c];
  return out;
}

std::pair<QueryInput, ForegroundInstance> decompose(const AnnotatedComposite& comp,
                                                    const InpaintFn& inpainter,
                                                    const DecomposeConfig& cfg) {
  const Image& img = comp.image;
  if (comp.mask.size() != static_cast<size_t>(img.h) * img.w)
    throw std::runtime_error("decompose: mask size mismatch");

  // Half-open bounding box of the mask.
  int x0 = img.w, y0 = img.h, x1 = 0, y1 = 0;
  size_t area = 0;
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x < img.w; ++x)
      if (comp.mask_at(y, x)) {
        ++area;
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x + 1);
        y1 = std::max(y1, y + 1);
      }
  if (area == 0) throw std::runtime_error("decompose: empty mask");
  const double area_frac = static_cast<double>(area) / (static_cast<double>(img.h) * img.w);
  if (area_frac < cfg.min_mask_area_frac)
    throw std::runtime_error("decompose: mask area below minimum fraction");
  const int bw = x1 - x0, bh = y1 - y0;
  if (bw < cfg.min_bbox_side || bh < cfg.min_bbox_side)
    throw std::runtime_error("decompose: bounding box side below minimum");

  QueryInput query;
  query.id = comp.id;
  query.background = inpainter(img, comp.mask);
  query.rect = Rectangle((x0 + x1) / 2.0 / img.w, (y0 + y1) / 2.0 / img.h,
                         static_cast<double>(bw) / img.w, static_cast<double>(bh) / img.h);

  const int side = std::max(bw, bh);
  const int pad = static_cast<int>(std::lround(cfg.pad_frac * side));
  const int canvas = side + 2 * pad;
  Image fg = Image::solid(canvas, canvas, 1.0f, 1.0f, 1.0f);
  const int ox = (canvas - bw) / 2, oy = (canvas - bh) / 2;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x)
      if (comp.mask_at(y, x))
        for (int c = 0; c < 3; ++c) fg.at(oy + (y - y0), ox + (x - x0), c) = img.at(y, x, c);

  ForegroundInstance inst;
  inst.id = comp.id;
  inst.image = std::move(fg);
  return {std::move(query), std::move(inst)};
}

}  // namespace fos
