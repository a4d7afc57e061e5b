#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "fos/image.hpp"
#include "fos/schema.hpp"

namespace fos {

using Embedding = Eigen::VectorXd;

// Axis-aligned box in normalized image coordinates. Sides are clamped into
// (0,1] and the centroid is then shifted so the box lies inside the unit
// square.
struct Rectangle {
  double cx = 0.5;
  double cy = 0.5;
  double w = 1.0;
  double h = 1.0;

  Rectangle() = default;
  Rectangle(double cx_, double cy_, double w_, double h_);

  double x0() const { return cx - w / 2.0; }
  double y0() const { return cy - h / 2.0; }
  double x1() const { return cx + w / 2.0; }
  double y1() const { return cy + h / 2.0; }
  double area() const { return w * h; }
};

// A foreground standardized on a white square canvas.
struct ForegroundInstance {
  std::string id;
  Image image;  // square, white background
  std::optional<AttributeVector> attributes;
  std::optional<std::string> pattern_id;
};

enum class QuerySplit { kTrain, kTest };

// A background with the foreground removed, plus the desired placement.
struct QueryInput {
  std::string id;
  Image background;
  Rectangle rect;  // normalized w.r.t. the background frame
  QuerySplit split = QuerySplit::kTrain;
};

// Equivalence class of interchangeable foregrounds (identical attributes).
struct Pattern {
  std::string pattern_id;
  AttributeVector attribute_key;
  std::vector<std::string> member_ids;
};

}  // namespace fos
