#include "assemai/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "assemai/preprocess.hpp"
#include "assemai/raster_io.hpp"

namespace assemai {

std::string_view roi_mode_name(RoiMode m) noexcept {
  switch (m) {
    case RoiMode::Detect: return "detect";
    case RoiMode::Fixed: return "fixed";
    case RoiMode::None: return "none";
  }
  return "?";
}

std::optional<RoiMode> parse_roi_mode(std::string_view name) noexcept {
  if (name == "detect") return RoiMode::Detect;
  if (name == "fixed") return RoiMode::Fixed;
  if (name == "none") return RoiMode::None;
  return std::nullopt;
}

InputPreparer::InputPreparer(RoiMode mode, int out_width, int out_height, CropGeometryTable geometry)
    : mode_(mode), out_width_(out_width), out_height_(out_height), geometry_(std::move(geometry)) {
  if (out_width < 1 || out_height < 1) throw InputError("model input size must be positive");
}

const RoiLocator& InputPreparer::locator_for(int width, int height) const {
  auto& slot = locators_[{width, height}];
  if (!slot) slot = std::make_unique<RoiLocator>(width, height, geometry_);
  return *slot;
}

PreparedInput InputPreparer::prepare(const ImageRaster& frame, CycleState state) const {
  PreparedInput out;
  const BoundingBox whole{0, 0, frame.width(), frame.height()};
  switch (mode_) {
    case RoiMode::Detect: {
      RoiCrop c = locator_for(frame.width(), frame.height()).locate(frame, state);
      out.image = resize_bilinear(c.image, out_width_, out_height_);
      out.bbox = c.object_box;
      out.window = c.window;
      out.detected = c.detected;
      break;
    }
    case RoiMode::Fixed: {
      out.window = geometry_.box_for(state, frame.width(), frame.height());
      out.image = resize_bilinear(crop(frame, out.window), out_width_, out_height_);
      out.bbox = out.window;
      break;
    }
    case RoiMode::None:
      out.image = resize_bilinear(frame, out_width_, out_height_);
      out.bbox = whole;
      out.window = whole;
      break;
  }
  return out;
}

std::optional<BoundingBox> map_box_to_input(const BoundingBox& box, const BoundingBox& window, int out_width,
                                            int out_height) {
  if (window.width() < 1 || window.height() < 1) throw InputError("window must have positive size");
  const int x0 = std::max(box.x_min, window.x_min), y0 = std::max(box.y_min, window.y_min);
  const int x1 = std::min(box.x_max, window.x_max), y1 = std::min(box.y_max, window.y_max);
  if (x1 <= x0 || y1 <= y0) return std::nullopt;
  const double sx = static_cast<double>(out_width) / window.width();
  const double sy = static_cast<double>(out_height) / window.height();
  BoundingBox out;
  out.x_min = std::clamp(static_cast<int>(std::floor((x0 - window.x_min) * sx)), 0, out_width - 1);
  out.y_min = std::clamp(static_cast<int>(std::floor((y0 - window.y_min) * sy)), 0, out_height - 1);
  out.x_max = std::clamp(static_cast<int>(std::ceil((x1 - window.x_min) * sx)), out.x_min + 1, out_width);
  out.y_max = std::clamp(static_cast<int>(std::ceil((y1 - window.y_min) * sy)), out.y_min + 1, out_height);
  return out;
}

Dataset build_dataset(const DatasetManifest& manifest, const std::filesystem::path& image_root,
                      const InputPreparer& prep, int channels) {
  if (channels != 1 && channels != 3) throw InputError("channels must be 1 or 3");
  Dataset d;
  d.channels = channels;
  bool sized = false;
  for (const Sample& s : manifest.samples) {
    const ImageRaster frame = read_raster(image_root / s.image_path);
    PreparedInput p = prep.prepare(frame, s.state);
    ImageRaster img = channels == 1 ? p.image.to_luma() : std::move(p.image);
    if (img.channels() != channels) {
      throw InputError("image " + s.image_path + " has " + std::to_string(img.channels()) +
                       " channels, expected " + std::to_string(channels));
    }
    if (!sized) {
      d.height = img.height();
      d.width = img.width();
      sized = true;
    }
    // Dataset stores channel-planar images.
    const std::size_t hw = static_cast<std::size_t>(img.width()) * img.height();
    std::vector<double> planar(hw * channels);
    for (std::size_t px = 0; px < hw; ++px)
      for (int c = 0; c < channels; ++c) planar[c * hw + px] = img.pixels()[px * channels + c];
    d.add(planar, to_index(s.label));
  }
  return d;
}

}  // namespace assemai
