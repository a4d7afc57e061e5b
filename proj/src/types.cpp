#include "fos/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace fos {

Rectangle::Rectangle(double cx_, double cy_, double w_, double h_) {
  if (!(w_ > 0.0) || !(h_ > 0.0)) throw std::runtime_error("Rectangle: sides must be positive");
  w = std::min(w_, 1.0);
  h = std::min(h_, 1.0);
  cx = std::clamp(cx_, w / 2.0, 1.0 - w / 2.0);
  cy = std::clamp(cy_, h / 2.0, 1.0 - h / 2.0);
}

}  // namespace fos
