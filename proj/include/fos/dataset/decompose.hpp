#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fos/image.hpp"
#include "fos/types.hpp"

namespace fos {

// Segmentation-style source sample: one image, one binary foreground mask.
struct AnnotatedComposite {
  std::string id;
  Image image;
  std::vector<uint8_t> mask;  // h*w, nonzero = foreground
  std::string category;

  bool mask_at(int y, int x) const { return mask[static_cast<size_t>(y) * image.w + x] != 0; }
};

// Pluggable hole filler; the default is mean fill. A learned inpainter can be
// dropped in behind the same signature.
using InpaintFn = std::function<Image(const Image&, const std::vector<uint8_t>&)>;

// Replaces masked pixels with the per-channel mean of the unmasked ones.
// Throws if the mask covers the entire image.
Image mean_fill_inpaint(const Image& image, const std::vector<uint8_t>& mask);

struct DecomposeConfig {
  double min_mask_area_frac = 0.005;  // exclude tiny foregrounds
  int min_bbox_side = 32;             // exclude small/incomplete crops
  double pad_frac = 0.10;             // white margin around the foreground square
};

// Splits a composite into (query, foreground): the query background is the
// inpainted image with the mask's bounding box as rectangle; the foreground
// is the masked content pasted centered on a white square.
std::pair<QueryInput, ForegroundInstance> decompose(const AnnotatedComposite& comp,
                                                    const InpaintFn& inpainter,
                                                    const DecomposeConfig& cfg = {});

}  // namespace fos
