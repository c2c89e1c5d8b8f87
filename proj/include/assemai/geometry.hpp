#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "assemai/core.hpp"

namespace assemai {

/// Axis-aligned crop rectangle in reference-frame pixels.
struct CropRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  friend bool operator==(const CropRect&, const CropRect&) = default;
};

/// Per-state crop rectangles defined on a reference frame and scaled
/// proportionally to whatever frame size is being cropped.
///
/// The default table uses a 1080x720 (width x height) reference frame with a
/// 70x200 window for state 4 and a 205x400 window for state 9 (width x height).
class CropGeometryTable {
 public:
  static CropGeometryTable defaults();

  CropGeometryTable(int reference_width, int reference_height, std::map<int, CropRect> rects);

  int reference_width() const noexcept { return reference_width_; }
  int reference_height() const noexcept { return reference_height_; }
  const std::map<int, CropRect>& rects() const noexcept { return rects_; }
  bool contains(CycleState s) const noexcept { return rects_.contains(s.value()); }

  /// Rectangle for `state` scaled onto an image_width x image_height frame.
  /// Edges round to the nearest pixel. Throws InputError for unknown states.
  BoundingBox box_for(CycleState state, int image_width, int image_height) const;

  std::string to_json() const;
  static CropGeometryTable from_json(const std::string& text);
  static CropGeometryTable load(const std::filesystem::path& path);

 private:
  int reference_width_;
  int reference_height_;
  std::map<int, CropRect> rects_;
};

}  // namespace assemai
