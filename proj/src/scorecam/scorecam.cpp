#include "assemai/scorecam.hpp"

#include <algorithm>
#include <cmath>

#include "assemai/kernels.hpp"

namespace assemai {

namespace {

constexpr int kMaskedBatch = 16;

int layer_index(std::string_view layer) {
  for (std::size_t i = 0; i < kConvLayers.size(); ++i)
    if (kConvLayers[i] == layer) return static_cast<int>(i);
  throw InputError("unknown layer '" + std::string(layer) + "'; expected conv1 or conv2");
}

}  // namespace

Tensor image_to_batch(const Model& model, const ImageRaster& image) {
  const ModelSpec& s = model.spec();
  if (image.width() != s.in_width || image.height() != s.in_height) {
    throw InputError("image is " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                     ", model expects " + std::to_string(s.in_width) + "x" + std::to_string(s.in_height));
  }
  Tensor t({1, s.in_channels, s.in_height, s.in_width});
  const std::size_t hw = static_cast<std::size_t>(s.in_width) * s.in_height;
  if (s.in_channels == 1) {
    const ImageRaster luma = image.to_luma();
    std::copy(luma.pixels().begin(), luma.pixels().end(), t.data.begin());
  } else if (s.in_channels == image.channels()) {
    for (std::size_t p = 0; p < hw; ++p)
      for (int c = 0; c < s.in_channels; ++c) t.data[c * hw + p] = image.pixels()[p * s.in_channels + c];
  } else {
    throw InputError("image has " + std::to_string(image.channels()) + " channels, model expects " +
                     std::to_string(s.in_channels));
  }
  return t;
}

ActivationMaps activation_maps(const Model& model, std::string_view layer, const ImageRaster& image) {
  const int which = layer_index(layer);
  ForwardCache cache;
  forward(model, image_to_batch(model, image), &cache);
  const ModelSpec& s = model.spec();
  ActivationMaps m;
  if (which == 0) {
    m.count = s.conv1_filters;
    m.width = s.in_width;
    m.height = s.in_height;
    m.data = std::move(cache.conv1);
  } else {
    m.count = s.conv2_filters;
    m.width = s.pooled1_width();
    m.height = s.pooled1_height();
    m.data = std::move(cache.conv2);
  }
  return m;
}

SaliencyMap score_cam(const Model& model, std::string_view layer, const ImageRaster& image, int target_class) {
  const ModelSpec& s = model.spec();
  if (target_class < 0 || target_class >= s.classes) {
    throw InputError("target class " + std::to_string(target_class) + " out of range");
  }
  const Tensor input = image_to_batch(model, image);
  const ActivationMaps maps = activation_maps(model, layer, image);
  const int w = s.in_width, h = s.in_height;
  const std::size_t hw = static_cast<std::size_t>(w) * h;

  SaliencyMap out{w, h, std::vector<double>(hw, 0.0), false};

  // Upsampled raw maps and their normalised masks, retained channels only.
  std::vector<std::vector<double>> raw;
  std::vector<std::vector<double>> masks;
  for (int k = 0; k < maps.count; ++k) {
    std::vector<double> up(hw);
    kernels::resize_plane(maps.plane(k), maps.width, maps.height, up, w, h);
    const auto [lo, hi] = std::minmax_element(up.begin(), up.end());
    const double mn = *lo, mx = *hi;
    if (!(mx > mn)) continue;
    std::vector<double> mask(hw);
    for (std::size_t i = 0; i < hw; ++i) mask[i] = (up[i] - mn) / (mx - mn);
    raw.push_back(std::move(up));
    masks.push_back(std::move(mask));
  }
  if (raw.empty()) {
    out.degenerate = true;
    return out;
  }

  const Tensor zero({1, s.in_channels, h, w});
  const double baseline = forward(model, zero).data[static_cast<std::size_t>(target_class)];

  const std::size_t image_size = static_cast<std::size_t>(s.in_channels) * hw;
  std::vector<double> scores(raw.size());
  for (std::size_t start = 0; start < raw.size(); start += kMaskedBatch) {
    const std::size_t n = std::min<std::size_t>(kMaskedBatch, raw.size() - start);
    Tensor batch({static_cast<int>(n), s.in_channels, h, w});
    for (std::size_t j = 0; j < n; ++j) {
      const std::vector<double>& mask = masks[start + j];
      for (int c = 0; c < s.in_channels; ++c)
        for (std::size_t p = 0; p < hw; ++p)
          batch.data[j * image_size + c * hw + p] = input.data[c * hw + p] * mask[p];
    }
    const Tensor logits = forward(model, batch);
    for (std::size_t j = 0; j < n; ++j)
      scores[start + j] = logits.data[j * static_cast<std::size_t>(s.classes) + target_class] - baseline;
  }

  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> alpha(scores.size());
  double z = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) z += (alpha[k] = std::exp(scores[k] - top));
  for (double& a : alpha) a /= z;

  for (std::size_t k = 0; k < raw.size(); ++k)
    for (std::size_t p = 0; p < hw; ++p) out.values[p] += alpha[k] * raw[k][p];
  for (double& v : out.values) v = std::max(v, 0.0);

  const auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
  const double mn = *lo, mx = *hi;
  if (mx > mn) {
    for (double& v : out.values) v = (v - mn) / (mx - mn);
  } else if (mx > 0.0) {
    std::fill(out.values.begin(), out.values.end(), 1.0);
  }
  return out;
}

double saliency_in_box_fraction(const SaliencyMap& map, const BoundingBox& box) {
  if (!box.valid_for(map.width, map.height)) throw InputError("box does not fit the saliency map");
  double total = 0.0, inside = 0.0;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const double v = map.at(x, y);
      total += v;
      if (x >= box.x_min && x < box.x_max && y >= box.y_min && y < box.y_max) inside += v;
    }
  }
  return total > 0.0 ? inside / total : 0.0;
}

const std::array<std::array<double, 3>, 256>& heatmap_ramp() {
  static const auto ramp = [] {
    std::array<std::array<double, 3>, 256> r{};
    for (int i = 0; i < 256; ++i) r[i] = {i / 255.0, 0.0, 1.0 - i / 255.0};
    return r;
  }();
  return ramp;
}

ImageRaster render_heatmap(const SaliencyMap& map, const ImageRaster& base) {
  if (map.width != base.width() || map.height != base.height()) {
    throw InputError("heatmap base is " + std::to_string(base.width()) + "x" + std::to_string(base.height()) +
                     ", saliency map is " + std::to_string(map.width) + "x" + std::to_string(map.height));
  }
  const ImageRaster luma = base.to_luma();
  const auto& ramp = heatmap_ramp();
  ImageRaster out(map.width, map.height, 3);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const int idx = std::clamp(static_cast<int>(std::lround(map.at(x, y) * 255.0)), 0, 255);
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = 0.5 * luma.at(x, y) + 0.5 * ramp[idx][c];
    }
  }
  return out;
}

}  // namespace assemai
