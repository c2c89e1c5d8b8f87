#include "assemai/core.hpp"

#include <algorithm>
#include <cmath>

namespace assemai {

namespace {
constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "NoAnomaly", "NoNose", "NoNose+NoBody2", "NoNose+NoBody2+NoBody1", "NoBody1"};
}

AnomalyClass class_from_index(int index) {
  if (index < 0 || index >= kNumClasses) {
    throw InputError("anomaly class index " + std::to_string(index) + " outside [0, 5)");
  }
  return static_cast<AnomalyClass>(index);
}

std::string_view class_name(AnomalyClass c) noexcept { return kClassNames[to_index(c)]; }

std::optional<AnomalyClass> parse_class_name(std::string_view name) noexcept {
  for (int i = 0; i < kNumClasses; ++i) {
    if (kClassNames[i] == name) return static_cast<AnomalyClass>(i);
  }
  return std::nullopt;
}

bool missing_nose(AnomalyClass c) noexcept {
  return c == AnomalyClass::NoNose || c == AnomalyClass::NoNoseNoBody2 ||
         c == AnomalyClass::NoNoseNoBody2NoBody1;
}

bool missing_body2(AnomalyClass c) noexcept {
  return c == AnomalyClass::NoNoseNoBody2 || c == AnomalyClass::NoNoseNoBody2NoBody1;
}

bool missing_body1(AnomalyClass c) noexcept {
  return c == AnomalyClass::NoNoseNoBody2NoBody1 || c == AnomalyClass::NoBody1;
}

CycleState::CycleState(int value) : value_(value) {
  if (value < 1 || value > kNumCycleStates) {
    throw InputError("cycle state " + std::to_string(value) + " outside [1, 21]");
  }
}

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const int ix = std::max(0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const int iy = std::max(0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = static_cast<double>(ix) * iy;
  const double uni = static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

ImageRaster::ImageRaster(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  if (width <= 0 || height <= 0) throw InputError("raster dimensions must be positive");
  if (channels != 1 && channels != 3) throw InputError("raster channels must be 1 or 3");
  pixels_.assign(static_cast<std::size_t>(width) * height * channels, 0.0);
}

ImageRaster::ImageRaster(int width, int height, int channels, std::vector<double> pixels)
    : ImageRaster(width, height, channels) {
  if (pixels.size() != pixels_.size()) {
    throw InputError("raster pixel count " + std::to_string(pixels.size()) + " != " +
                     std::to_string(pixels_.size()));
  }
  for (double v : pixels) {
    if (!(v >= 0.0 && v <= 1.0)) throw InputError("raster value outside [0,1]");
  }
  pixels_ = std::move(pixels);
}

ImageRaster ImageRaster::to_luma() const {
  if (channels_ == 1) return *this;
  ImageRaster out(width_, height_, 1);
  const std::size_t n = static_cast<std::size_t>(width_) * height_;
  for (std::size_t i = 0; i < n; ++i) {
    out.pixels_[i] = (pixels_[3 * i] + pixels_[3 * i + 1] + pixels_[3 * i + 2]) / 3.0;
  }
  return out;
}

}  // namespace assemai
