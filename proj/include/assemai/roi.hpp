#pragma once

#include <map>
#include <vector>

#include "assemai/core.hpp"
#include "assemai/geometry.hpp"
#include "assemai/preprocess.hpp"

namespace assemai {

/// Scores at or above this count as a detection. Rocket placements score
/// above 0.9 at the generator's noise level; noise-only windows stay far below.
inline constexpr double kDefaultNccThreshold = 0.5;

struct RoiCrop {
  bool detected = false;    // false: fixed-window fallback was used
  double score = 0.0;       // best NCC score seen, even when below threshold
  BoundingBox object_box;   // detected template placement, or the nominal rocket extent
  BoundingBox window;       // region that was cropped
  ImageRaster image;
};

/// Detector-first ROI extraction for one frame size. Searches the state's
/// crop window (plus a small border) with the rocket templates; on a hit the
/// window is re-centred on the detected rocket, otherwise the fixed window is
/// used. States without templates always take the fixed window.
class RoiLocator {
 public:
  RoiLocator(int frame_width, int frame_height, const CropGeometryTable& geometry = CropGeometryTable::defaults(),
             double threshold = kDefaultNccThreshold);

  RoiCrop locate(const ImageRaster& frame, CycleState state) const;

  double threshold() const noexcept { return threshold_; }

 private:
  struct StateTemplates {
    std::vector<ImageRaster> images;
    std::vector<std::pair<int, int>> anchor_offsets;
    BoundingBox nominal_anchor;
  };

  int width_;
  int height_;
  CropGeometryTable geometry_;
  double threshold_;
  std::map<int, StateTemplates> templates_;
};

}  // namespace assemai
