#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "assemai/core.hpp"
#include "assemai/nnet.hpp"

namespace assemai {

/// Per-pixel saliency at model input resolution, values in [0,1].
struct SaliencyMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;
  bool degenerate = false;  // every activation channel was constant

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Post-ReLU activations of one conv layer for a single image.
struct ActivationMaps {
  int count = 0;
  int width = 0;
  int height = 0;
  std::vector<double> data;  // count planes of height x width

  std::span<const double> plane(int k) const {
    return {data.data() + static_cast<std::size_t>(k) * width * height, static_cast<std::size_t>(width) * height};
  }
};

/// Image as a [1, C, H, W] batch for `model`. Single-channel models see the
/// luma of colour images. Throws InputError when the size does not match.
Tensor image_to_batch(const Model& model, const ImageRaster& image);

/// Layer ids: "conv1" or "conv2" (the default explanation layer).
ActivationMaps activation_maps(const Model& model, std::string_view layer, const ImageRaster& image);

/// Score-CAM. Each activation map is upsampled to the input size
/// (bilinear), min-max normalised and used to mask the input; its score is
/// the target logit on the masked input minus the target logit on an
/// all-zero input. Constant maps are skipped. The saliency is the ReLU of the
/// softmax(score)-weighted sum of the upsampled maps, min-max normalised.
SaliencyMap score_cam(const Model& model, std::string_view layer, const ImageRaster& image, int target_class);

/// Share of the total saliency that falls inside `box` (0 for an all-zero map).
double saliency_in_box_fraction(const SaliencyMap& map, const BoundingBox& box);

/// 256-entry blue-to-red ramp: entry i is (i/255, 0, 1 - i/255).
const std::array<std::array<double, 3>, 256>& heatmap_ramp();

/// RGB overlay: 0.5 * base luma + 0.5 * ramp[round(255 * saliency)].
ImageRaster render_heatmap(const SaliencyMap& map, const ImageRaster& base);

}  // namespace assemai
