#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "assemai/core.hpp"
#include "assemai/geometry.hpp"
#include "assemai/manifest.hpp"
#include "assemai/timing.hpp"

namespace assemai {

/// Class shares of the filtered dataset (train+test totals 10022/1110/1530/1620/1312
/// out of 15594), in canonical class order.
inline constexpr std::array<double, kNumClasses> kDefaultClassFractions = {
    10022.0 / 15594.0, 1110.0 / 15594.0, 1530.0 / 15594.0, 1620.0 / 15594.0, 1312.0 / 15594.0};

// Pixel levels of the synthetic scene.
inline constexpr double kBackgroundLevel = 0.25;
inline constexpr double kBody1Level = 0.55;
inline constexpr double kBody2Level = 0.75;
inline constexpr double kNoseLevel = 0.92;

struct RenderOptions {
  int width = 256;
  int height = 256;
  double noise_sigma = 0.03;
  int clutter_count = 6;
  CropGeometryTable geometry = CropGeometryTable::defaults();
};

/// Where the rocket's parts sit in a frame. `anchor` is the full rocket
/// extent; part boxes are the bounding boxes of each part's region.
struct RocketLayout {
  BoundingBox crop;    // the state's fixed crop window on this frame size
  BoundingBox anchor;  // rocket extent after jitter
  BoundingBox nose;
  BoundingBox body2;
  BoundingBox body1;
};

/// Layout for a state with an explicit jitter offset (0,0 = nominal position).
RocketLayout rocket_layout(CycleState state, const RenderOptions& opts, int jitter_x = 0, int jitter_y = 0);

/// Largest jitter magnitude used per axis for this state and frame size.
std::pair<int, int> max_jitter(CycleState state, const RenderOptions& opts);

struct RenderedFrame {
  ImageRaster image;
  BoundingBox truth_box;
  RocketLayout layout;
};

/// Deterministic synthetic frame. Only states 4 and 9 are renderable. The
/// label selects which parts are omitted; noise, clutter and jitter streams
/// depend only on (rng_seed, cycle_index, state), so two labels rendered with
/// the same arguments differ only inside the omitted parts.
RenderedFrame render_frame(std::int64_t cycle_index, CycleState state, AnomalyClass label,
                           std::uint64_t rng_seed, const RenderOptions& opts = {});

/// Noise-free rocket appearance for one label, cut out with a 1-pixel
/// background margin. `anchor_dx/dy` is the offset from the template's
/// top-left corner to the rocket anchor's top-left corner.
struct RocketTemplate {
  ImageRaster image;
  AnomalyClass label;
  int anchor_dx;
  int anchor_dy;
};

/// One template per label that leaves at least one part visible.
std::vector<RocketTemplate> rocket_templates(CycleState state, const RenderOptions& opts = {});

struct GenConfig {
  std::int64_t total_count = 1000;
  std::array<double, kNumClasses> class_fractions = kDefaultClassFractions;
  int width = 256;
  int height = 256;
  double noise_sigma = 0.03;
  int clutter_count = 6;
  std::uint64_t seed = 0;
  CycleTiming timing = CycleTiming::uniform(2100);

  /// Throws InputError describing the first violated constraint.
  void validate() const;
  RenderOptions render_options() const;
};

/// round(total * fraction) for classes 1..4; class 0 absorbs the remainder.
ClassCounts class_counts_for(std::int64_t total, const std::array<double, kNumClasses>& fractions);

std::string generator_version();

/// Sample list without touching the filesystem (images not rendered).
DatasetManifest plan_dataset(const GenConfig& cfg);

/// Renders every planned sample to <out_dir>/images/ and writes the manifest
/// beside them. Throws IoError if the directory is not writable.
DatasetManifest gen_dataset(const GenConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace assemai
