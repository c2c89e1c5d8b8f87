#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace assemai {

// Error hierarchy. Every failure surfaced by the library is one of these.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller handed us something outside the operation's contract.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A file did not follow its documented layout. `offset()` is the byte
/// position where parsing gave up.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Anomaly classes

enum class AnomalyClass : int {
  NoAnomaly = 0,
  NoNose = 1,
  NoNoseNoBody2 = 2,
  NoNoseNoBody2NoBody1 = 3,
  NoBody1 = 4,
};

inline constexpr int kNumClasses = 5;

inline constexpr std::array<AnomalyClass, kNumClasses> kAllClasses = {
    AnomalyClass::NoAnomaly, AnomalyClass::NoNose, AnomalyClass::NoNoseNoBody2,
    AnomalyClass::NoNoseNoBody2NoBody1, AnomalyClass::NoBody1};

constexpr int to_index(AnomalyClass c) noexcept { return static_cast<int>(c); }

/// Throws InputError outside [0, 5).
AnomalyClass class_from_index(int index);

/// Canonical display names: "NoAnomaly", "NoNose", "NoNose+NoBody2", ...
std::string_view class_name(AnomalyClass c) noexcept;
std::optional<AnomalyClass> parse_class_name(std::string_view name) noexcept;

// Which rocket parts a class leaves out.
bool missing_nose(AnomalyClass c) noexcept;
bool missing_body2(AnomalyClass c) noexcept;
bool missing_body1(AnomalyClass c) noexcept;

// ---------------------------------------------------------------------------
// Cycle state

inline constexpr int kNumCycleStates = 21;

class CycleState {
 public:
  /// Throws InputError unless 1 <= value <= 21.
  explicit CycleState(int value);
  int value() const noexcept { return value_; }
  friend bool operator==(CycleState, CycleState) = default;
  friend auto operator<=>(CycleState, CycleState) = default;

 private:
  int value_;
};

// ---------------------------------------------------------------------------
// Bounding box: inclusive min, exclusive max.

struct BoundingBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  int width() const noexcept { return x_max - x_min; }
  int height() const noexcept { return y_max - y_min; }
  long long area() const noexcept {
    return static_cast<long long>(width()) * static_cast<long long>(height());
  }
  bool valid_for(int image_width, int image_height) const noexcept {
    return 0 <= x_min && x_min < x_max && x_max <= image_width && 0 <= y_min && y_min < y_max &&
           y_max <= image_height;
  }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

// ---------------------------------------------------------------------------
// Image raster: row-major, interleaved channels, values in [0,1].

class ImageRaster {
 public:
  ImageRaster() = default;
  /// Zero-filled raster. Throws InputError for non-positive sizes or channels not in {1,3}.
  ImageRaster(int width, int height, int channels);
  /// Takes ownership of `pixels`; validates size and range.
  ImageRaster(int width, int height, int channels, std::vector<double> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return pixels_.empty(); }

  double& at(int x, int y, int c = 0) noexcept {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  double at(int x, int y, int c = 0) const noexcept {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::vector<double>& pixels() noexcept { return pixels_; }
  const std::vector<double>& pixels() const noexcept { return pixels_; }

  /// Single-channel copy (channel mean for 3-channel rasters).
  ImageRaster to_luma() const;

  friend bool operator==(const ImageRaster&, const ImageRaster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> pixels_;
};

/// Round to the 8-bit grid used by the PGM/PPM writer.
inline std::uint8_t quantize_u8(double v) noexcept {
  if (!(v > 0.0)) return 0;
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(v * 255.0 + 0.5);
}

}  // namespace assemai
