#pragma once

#include "fos/rng.hpp"
#include "fos/types.hpp"

namespace fos {

// Grows each side by a uniform amount in [0, side/2], keeping the centroid;
// the result is re-clamped into the unit square by Rectangle's constructor.
Rectangle augment_rectangle(const Rectangle& rect, Rng& rng);

// Random zoom: samples a square sub-window that still contains the whole
// rectangle, rescales it to min(W,H) square and remaps the rectangle.
// The effective zoom factor is in [1, max_zoom], further limited by the
// rectangle size.
QueryInput augment_zoom(const QueryInput& query, Rng& rng, double max_zoom = 2.0);

struct FgAugmentConfig {
  double max_pad_frac = 0.15;  // white padding per side, fraction of the side
  double brightness = 0.4;
  double saturation = 0.4;
  double contrast = 0.4;
  double hue = 0.2;  // in turns
  int out_size = 256;
};

// White padding + color jitter + resize. Jitter is applied to content pixels
// only so the white-background convention survives augmentation.
ForegroundInstance augment_foreground(const ForegroundInstance& fg, Rng& rng,
                                      const FgAugmentConfig& cfg = {});

}  // namespace fos
