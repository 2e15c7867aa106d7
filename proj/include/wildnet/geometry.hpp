#pragma once

#include <algorithm>

namespace wildnet {

// Axis-aligned box, corner form. Used for detections (model-input pixel
// space) and for evaluation boxes alike.
struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool operator==(const BBox&) const = default;
};

inline double area(const BBox& b) {
  return std::max(0.0, b.x_max - b.x_min) * std::max(0.0, b.y_max - b.y_min);
}

inline bool well_formed(const BBox& b) {
  return b.x_min < b.x_max && b.y_min < b.y_max;
}

// Intersection over union. A zero-area box has IoU 0 against anything,
// including itself.
inline double iou(const BBox& a, const BBox& b) {
  const double ix =
      std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double iy =
      std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = ix * iy;
  const double uni = area(a) + area(b) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace wildnet
