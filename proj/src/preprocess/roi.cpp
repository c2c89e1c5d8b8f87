#include "assemai/roi.hpp"

#include <algorithm>

#include "assemai/synthgen.hpp"

namespace assemai {

namespace {

constexpr int kSearchBorder = 2;

BoundingBox shift_inside(BoundingBox b, int dx, int dy, int width, int height) {
  dx = std::clamp(dx, -b.x_min, width - b.x_max);
  dy = std::clamp(dy, -b.y_min, height - b.y_max);
  return {b.x_min + dx, b.y_min + dy, b.x_max + dx, b.y_max + dy};
}

}  // namespace

RoiLocator::RoiLocator(int frame_width, int frame_height, const CropGeometryTable& geometry, double threshold)
    : width_(frame_width), height_(frame_height), geometry_(geometry), threshold_(threshold) {
  if (frame_width < 1 || frame_height < 1) throw InputError("frame size must be positive");
  RenderOptions opts;
  opts.width = frame_width;
  opts.height = frame_height;
  opts.geometry = geometry;
  for (int s : {4, 9}) {
    if (!geometry.contains(CycleState{s})) continue;
    StateTemplates st;
    for (auto& t : rocket_templates(CycleState{s}, opts)) {
      st.images.push_back(std::move(t.image));
      st.anchor_offsets.emplace_back(t.anchor_dx, t.anchor_dy);
    }
    st.nominal_anchor = rocket_layout(CycleState{s}, opts).anchor;
    templates_.emplace(s, std::move(st));
  }
}

RoiCrop RoiLocator::locate(const ImageRaster& frame, CycleState state) const {
  if (frame.width() != width_ || frame.height() != height_) {
    throw InputError("frame is " + std::to_string(frame.width()) + "x" + std::to_string(frame.height()) +
                     ", locator was built for " + std::to_string(width_) + "x" + std::to_string(height_));
  }
  RoiCrop out;
  const BoundingBox fixed = geometry_.box_for(state, width_, height_);
  out.window = fixed;
  out.object_box = fixed;
  const auto it = templates_.find(state.value());
  if (it != templates_.end()) {
    const StateTemplates& st = it->second;
    out.object_box = st.nominal_anchor;
    const BoundingBox search{std::max(0, fixed.x_min - kSearchBorder), std::max(0, fixed.y_min - kSearchBorder),
                             std::min(width_, fixed.x_max + kSearchBorder),
                             std::min(height_, fixed.y_max + kSearchBorder)};
    const RoiDetection d = detect_roi_template(crop(frame, search), st.images, threshold_);
    out.score = d.score;
    if (d.found) {
      out.detected = true;
      out.object_box = {d.box.x_min + search.x_min, d.box.y_min + search.y_min, d.box.x_max + search.x_min,
                        d.box.y_max + search.y_min};
      const auto [adx, ady] = st.anchor_offsets[static_cast<std::size_t>(d.template_index)];
      const int dx = out.object_box.x_min + adx - st.nominal_anchor.x_min;
      const int dy = out.object_box.y_min + ady - st.nominal_anchor.y_min;
      out.window = shift_inside(fixed, dx, dy, width_, height_);
    }
  }
  out.image = out.detected ? crop(frame, out.window) : fixed_crop_for_state(frame, state, geometry_);
  return out;
}

}  // namespace assemai
