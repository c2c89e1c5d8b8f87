#include "assemai/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "assemai/kernels.hpp"

namespace assemai {

FilterResult filter_states(const DatasetManifest& manifest, const std::set<int>& keep, const CycleTiming& timing) {
  for (int s : keep) CycleState{s};
  const auto [sub_a, sub_b] = timing.state9_subwindow();
  nlohmann::ordered_json prov;
  prov["filter"] = "cycle_state";
  prov["keep"] = std::vector<int>(keep.begin(), keep.end());
  prov["cycle_period_ms"] = timing.cycle_period_ms();
  prov["state_window_boundaries_ms"] = timing.boundaries();
  prov["state9_subwindow"] = {sub_a, sub_b};
  const std::string prov_text = prov.dump();

  FilterResult r;
  r.manifest.seed = manifest.seed;
  r.manifest.generator_version = manifest.generator_version;
  r.manifest.provenance = prov_text;
  for (const auto& s : manifest.samples) {
    const StatePosition pos = map_timestamp_to_state(s.timestamp_ms, timing);
    if (!keep.contains(pos.state.value())) continue;
    if (pos.state.value() == 9 && !(pos.window_fraction >= sub_a && pos.window_fraction < sub_b)) continue;
    Sample kept = s;
    kept.provenance = prov_text;
    r.manifest.samples.push_back(std::move(kept));
  }
  r.manifest.recount();
  r.empty_warning = r.manifest.samples.empty();
  return r;
}

void SsimParams::validate() const {
  if (window < 3 || window % 2 == 0) throw InputError("SSIM window must be odd and >= 3");
  if (!(k1 > 0.0) || !(k2 > 0.0)) throw InputError("SSIM constants k1, k2 must be positive");
  if (!(dynamic_range > 0.0)) throw InputError("SSIM dynamic range must be positive");
}

double ssim(const ImageRaster& a, const ImageRaster& b, const SsimParams& params) {
  params.validate();
  if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels()) {
    throw InputError("SSIM inputs differ in size or channel count");
  }
  if (a.width() < params.window || a.height() < params.window) {
    throw InputError("SSIM input smaller than the " + std::to_string(params.window) + "-pixel window");
  }
  const ImageRaster la = a.to_luma();
  const ImageRaster lb = b.to_luma();
  return kernels::ssim_mean(la.pixels(), lb.pixels(), a.width(), a.height(), params.window, params.c1(),
                            params.c2());
}

ImageRaster crop(const ImageRaster& image, const BoundingBox& box) {
  if (!box.valid_for(image.width(), image.height())) {
    throw InputError("crop box (" + std::to_string(box.x_min) + "," + std::to_string(box.y_min) + ")-(" +
                     std::to_string(box.x_max) + "," + std::to_string(box.y_max) + ") invalid for " +
                     std::to_string(image.width()) + "x" + std::to_string(image.height()) + " image");
  }
  const int c = image.channels();
  ImageRaster out(box.width(), box.height(), c);
  for (int y = 0; y < box.height(); ++y) {
    const double* src = &image.pixels()[(static_cast<std::size_t>(y + box.y_min) * image.width() + box.x_min) * c];
    std::copy(src, src + static_cast<std::size_t>(box.width()) * c,
              &out.pixels()[static_cast<std::size_t>(y) * box.width() * c]);
  }
  return out;
}

ImageRaster fixed_crop_for_state(const ImageRaster& image, CycleState state, const CropGeometryTable& geometry) {
  const BoundingBox box = geometry.box_for(state, image.width(), image.height());
  auto edge_error = [&](const char* edge) {
    return InputError(std::string("crop window for state ") + std::to_string(state.value()) + " leaves the image at its " +
                      edge + " edge");
  };
  if (box.x_min < 0) throw edge_error("left");
  if (box.y_min < 0) throw edge_error("top");
  if (box.x_max > image.width()) throw edge_error("right");
  if (box.y_max > image.height()) throw edge_error("bottom");
  return crop(image, box);
}

ImageRaster resize_bilinear(const ImageRaster& image, int out_width, int out_height) {
  if (out_width < 1 || out_height < 1) throw InputError("resize target must be at least 1x1");
  const int c = image.channels();
  ImageRaster out(out_width, out_height, c);
  if (c == 1) {
    kernels::resize_plane(image.pixels(), image.width(), image.height(), out.pixels(), out_width, out_height);
    for (double& v : out.pixels()) v = std::clamp(v, 0.0, 1.0);
    return out;
  }
  std::vector<double> plane(static_cast<std::size_t>(image.width()) * image.height());
  std::vector<double> res(static_cast<std::size_t>(out_width) * out_height);
  for (int ch = 0; ch < c; ++ch) {
    for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = image.pixels()[i * c + ch];
    kernels::resize_plane(plane, image.width(), image.height(), res, out_width, out_height);
    for (std::size_t i = 0; i < res.size(); ++i) out.pixels()[i * c + ch] = std::clamp(res[i], 0.0, 1.0);
  }
  return out;
}

std::vector<double> ncc_surface(const ImageRaster& image, const ImageRaster& templ) {
  const ImageRaster li = image.to_luma();
  const ImageRaster lt = templ.to_luma();
  if (lt.width() > li.width() || lt.height() > li.height()) {
    throw InputError("template larger than image");
  }
  kernels::NccImage prepared(li.pixels(), li.width(), li.height());
  return prepared.surface(lt.pixels(), lt.width(), lt.height());
}

RoiDetection detect_roi_template(const ImageRaster& image, std::span<const ImageRaster> templates, double threshold) {
  if (templates.empty()) throw InputError("no templates supplied");
  const ImageRaster li = image.to_luma();
  std::vector<ImageRaster> luma;
  for (const auto& t : templates) {
    luma.push_back(t.to_luma());
    if (t.width() > li.width() || t.height() > li.height()) throw InputError("template larger than image");
  }
  kernels::NccImage prepared(li.pixels(), li.width(), li.height());
  std::vector<std::vector<double>> surfaces(luma.size());
  for (std::size_t t = 0; t < luma.size(); ++t) {
    surfaces[t] = prepared.surface(luma[t].pixels(), luma[t].width(), luma[t].height());
  }

  RoiDetection best;
  best.score = -2.0;
  const int max_h = li.height();
  for (int y = 0; y < max_h; ++y) {
    for (int x = 0; x < li.width(); ++x) {
      for (std::size_t t = 0; t < luma.size(); ++t) {
        const int ph = li.height() - luma[t].height() + 1;
        const int pw = li.width() - luma[t].width() + 1;
        if (y >= ph || x >= pw) continue;
        const double s = surfaces[t][static_cast<std::size_t>(y) * pw + x];
        if (s > best.score) {
          best.score = s;
          best.template_index = static_cast<int>(t);
          best.box = {x, y, x + luma[t].width(), y + luma[t].height()};
        }
      }
    }
  }
  best.found = best.score >= threshold && best.score > 0.0;
  return best;
}

}  // namespace assemai
