#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "assemai/core.hpp"
#include "assemai/geometry.hpp"
#include "assemai/manifest.hpp"
#include "assemai/timing.hpp"

namespace assemai {

// ---------------------------------------------------------------------------
// State filtering

struct FilterResult {
  DatasetManifest manifest;
  bool empty_warning = false;  // set when nothing survived the filter
};

/// Keeps samples whose timestamp maps into `keep`. Samples mapped to state 9
/// must also fall inside the timing's state-9 subwindow. Order is preserved,
/// class counts are recomputed and the filter parameters are recorded as
/// provenance on the manifest and on every retained sample.
FilterResult filter_states(const DatasetManifest& manifest, const std::set<int>& keep, const CycleTiming& timing);

// ---------------------------------------------------------------------------
// SSIM

struct SsimParams {
  int window = 7;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;

  void validate() const;
  double c1() const noexcept { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const noexcept { return (k2 * dynamic_range) * (k2 * dynamic_range); }
};

/// Mean local SSIM over every valid window placement (uniform window,
/// stride 1). Multichannel inputs are compared on their channel mean.
double ssim(const ImageRaster& a, const ImageRaster& b, const SsimParams& params = {});

// ---------------------------------------------------------------------------
// Cropping and resizing

/// Copies the pixels inside `box`. Throws InputError for an invalid box.
ImageRaster crop(const ImageRaster& image, const BoundingBox& box);

/// Crops the state's configured window. Throws InputError naming the edge
/// that leaves the image, or when the state has no geometry.
ImageRaster fixed_crop_for_state(const ImageRaster& image, CycleState state,
                                 const CropGeometryTable& geometry = CropGeometryTable::defaults());

/// Bilinear resampling with half-pixel centres and edge clamping.
ImageRaster resize_bilinear(const ImageRaster& image, int out_width, int out_height);

// ---------------------------------------------------------------------------
// Template-matching ROI detector

struct RoiDetection {
  bool found = false;
  BoundingBox box;
  double score = 0.0;
  int template_index = -1;
};

/// Exhaustive zero-mean normalised cross-correlation over all placements of
/// all templates. The best placement wins; exact ties go to the smallest
/// (y, x, template index). Zero-variance windows or templates score 0. When
/// the best score is below `threshold`, `found` is false but box/score still
/// describe the best candidate.
RoiDetection detect_roi_template(const ImageRaster& image, std::span<const ImageRaster> templates,
                                 double threshold);

/// Full NCC score surface for one template, (H-h+1) x (W-w+1), row-major.
std::vector<double> ncc_surface(const ImageRaster& image, const ImageRaster& templ);

}  // namespace assemai
