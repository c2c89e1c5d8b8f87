#pragma once

// Frame -> model input conversion shared by the CLI and the gateway.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string_view>

#include "assemai/geometry.hpp"
#include "assemai/manifest.hpp"
#include "assemai/nnet.hpp"
#include "assemai/roi.hpp"

namespace assemai {

/// detect: template locator with fixed-crop fallback; fixed: the state's crop
/// window; none: the whole frame.
enum class RoiMode { Detect, Fixed, None };

std::string_view roi_mode_name(RoiMode m) noexcept;
std::optional<RoiMode> parse_roi_mode(std::string_view name) noexcept;

struct PreparedInput {
  ImageRaster image;    // resized to the model input size
  BoundingBox bbox;     // object box in frame coordinates
  BoundingBox window;   // region that was cropped (the whole frame for none)
  bool detected = false;
};

/// Not thread-safe: locators are built lazily per frame size.
class InputPreparer {
 public:
  InputPreparer(RoiMode mode, int out_width, int out_height,
                CropGeometryTable geometry = CropGeometryTable::defaults());

  PreparedInput prepare(const ImageRaster& frame, CycleState state) const;
  RoiMode mode() const noexcept { return mode_; }

 private:
  const RoiLocator& locator_for(int width, int height) const;

  RoiMode mode_;
  int out_width_;
  int out_height_;
  CropGeometryTable geometry_;
  mutable std::map<std::pair<int, int>, std::unique_ptr<RoiLocator>> locators_;
};

/// Maps a frame-space box into model-input coordinates for an input cut
/// from `window` and resized to out_width x out_height. The box is clipped
/// to the window first; edges scale outward (floor/ceil). Returns nullopt
/// when the box misses the window.
std::optional<BoundingBox> map_box_to_input(const BoundingBox& box, const BoundingBox& window, int out_width,
                                            int out_height);

/// Reads every manifest image from disk and prepares it. Channel count
/// follows `channels` (1 converts to luma).
Dataset build_dataset(const DatasetManifest& manifest, const std::filesystem::path& image_root,
                      const InputPreparer& prep, int channels);

}  // namespace assemai
