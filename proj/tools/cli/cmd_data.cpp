#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "assemai/geometry.hpp"
#include "assemai/manifest.hpp"
#include "assemai/pipeline.hpp"
#include "assemai/preprocess.hpp"
#include "assemai/raster_io.hpp"
#include "assemai/roi.hpp"
#include "assemai/synthgen.hpp"
#include "commands.hpp"

namespace assemai::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void announce(const fs::path& p) { std::cout << "wrote " << p.string() << "\n"; }

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw IoError("cannot create directory " + p.string());
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + p.string());
  f << text;
  if (!f.flush()) throw IoError("write failed for " + p.string());
}

std::string read_text(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_gen(const GenOptions& o) {
  GenConfig cfg;
  cfg.total_count = o.count;
  cfg.width = o.width;
  cfg.height = o.height;
  cfg.noise_sigma = o.noise;
  cfg.clutter_count = o.clutter;
  cfg.seed = o.seed;
  cfg.timing = CycleTiming::uniform(o.period_ms);
  cfg.validate();
  const fs::path out(o.out);
  ensure_dir(out);
  const DatasetManifest m = gen_dataset(cfg, out);
  std::cout << "rendered " << m.samples.size() << " frames; class counts";
  for (int c = 0; c < kNumClasses; ++c) std::cout << " " << class_name(class_from_index(c)) << "=" << m.class_counts[c];
  std::cout << "\n";
  announce(out / kManifestFile);
  announce(out / kManifestMetaFile);
  announce(out / "images");
  return 0;
}

namespace {

std::optional<BoundingBox> intersect(const BoundingBox& a, const BoundingBox& b) {
  BoundingBox r{std::max(a.x_min, b.x_min), std::max(a.y_min, b.y_min), std::min(a.x_max, b.x_max),
                std::min(a.y_max, b.y_max)};
  if (r.x_max <= r.x_min || r.y_max <= r.y_min) return std::nullopt;
  return r;
}

struct SsimAccumulator {
  double frame_sum = 0.0;
  double crop_sum = 0.0;
  std::int64_t n = 0;
};

}  // namespace

int run_preprocess(const PreprocessOptions& o) {
  if (o.state9_window.size() != 2) throw InputError("--state9-window takes two values");
  for (int s : o.states) {
    if (s < 1 || s > kNumCycleStates) throw InputError("--states entries must lie in 1..21");
  }
  const fs::path in(o.in);
  const fs::path out(o.out);
  if (fs::weakly_canonical(manifest_dir(in)) == fs::weakly_canonical(out)) {
    throw InputError("--out must differ from the input directory");
  }
  const DatasetManifest src = read_manifest(in);
  const fs::path root = manifest_dir(in);
  const CycleTiming timing(CycleTiming::uniform(o.period_ms).boundaries(), {o.state9_window[0], o.state9_window[1]});
  const std::set<int> keep(o.states.begin(), o.states.end());
  const CropGeometryTable geometry = o.geometry.empty() ? CropGeometryTable::defaults() : CropGeometryTable::load(o.geometry);
  const auto mode = parse_roi_mode(o.roi);
  SsimParams sp;
  sp.window = o.ssim_window;
  sp.validate();

  FilterResult filtered = filter_states(src, keep, timing);
  if (filtered.empty_warning) std::cerr << "warning: no samples left after filtering\n";

  ensure_dir(out / "images");
  std::map<std::pair<int, int>, std::unique_ptr<RoiLocator>> locators;
  DatasetManifest result = filtered.manifest;
  std::map<int, std::pair<ImageRaster, ImageRaster>> reference;  // state -> (frame, crop)
  std::map<std::pair<int, int>, SsimAccumulator> ssim_acc;          // (state, class)
  std::int64_t detected = 0;
  std::int64_t lost_boxes = 0;

  for (Sample& s : result.samples) {
    const ImageRaster frame = read_raster(root / s.image_path);
    BoundingBox window{0, 0, frame.width(), frame.height()};
    bool hit = false;
    double score = 0.0;
    if (*mode == RoiMode::Detect) {
      auto& loc = locators[{frame.width(), frame.height()}];
      if (!loc) loc = std::make_unique<RoiLocator>(frame.width(), frame.height(), geometry);
      const RoiCrop c = loc->locate(frame, s.state);
      window = c.window;
      hit = c.detected;
      score = c.score;
    } else if (*mode == RoiMode::Fixed) {
      window = geometry.box_for(s.state, frame.width(), frame.height());
    }
    const ImageRaster cut = crop(frame, window);
    detected += hit ? 1 : 0;

    const int st = s.state.value();
    if (!reference.contains(st) && s.label == AnomalyClass::NoAnomaly) reference[st] = {frame, cut};
    auto ref = reference.find(st);
    auto& acc = ssim_acc[{st, to_index(s.label)}];
    if (ref != reference.end() && acc.n < o.ssim_limit && ref->second.second.width() == cut.width() &&
        ref->second.second.height() == cut.height() && cut.width() >= sp.window && cut.height() >= sp.window) {
      acc.frame_sum += ssim(frame, ref->second.first, sp);
      acc.crop_sum += ssim(cut, ref->second.second, sp);
      ++acc.n;
    }

    write_raster(cut, out / s.image_path);
    if (auto b = intersect(s.truth_box, window)) {
      s.truth_box = {b->x_min - window.x_min, b->y_min - window.y_min, b->x_max - window.x_min,
                     b->y_max - window.y_min};
    } else {
      s.truth_box = {0, 0, 0, 0};
      ++lost_boxes;
    }
    ordered_json prov = s.provenance.empty() ? ordered_json::object() : ordered_json::parse(s.provenance);
    prov["roi"] = {{"mode", o.roi},
                   {"window", {window.x_min, window.y_min, window.x_max, window.y_max}},
                   {"detected", hit},
                   {"score", score}};
    s.provenance = prov.dump();
  }
  result.recount();
  write_manifest(result, out);

  ordered_json ssim_json = ordered_json::array();
  std::ostringstream ssim_txt;
  ssim_txt << "SSIM against the first NoAnomaly frame of each state (window " << sp.window << ")\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-6s %-26s %6s %10s %10s\n", "state", "class", "n", "frame", "crop");
  ssim_txt << line;
  for (const auto& [key, acc] : ssim_acc) {
    if (acc.n == 0) continue;
    const double f = acc.frame_sum / acc.n, c = acc.crop_sum / acc.n;
    const std::string cname(class_name(class_from_index(key.second)));
    ssim_json.push_back({{"state", key.first}, {"class", cname}, {"n", acc.n}, {"mean_ssim_frame", f},
                         {"mean_ssim_crop", c}});
    std::snprintf(line, sizeof line, "%-6d %-26s %6lld %10.4f %10.4f\n", key.first, cname.c_str(),
                  static_cast<long long>(acc.n), f, c);
    ssim_txt << line;
  }
  write_text(out / "ssim.json", ssim_json.dump(2) + "\n");
  write_text(out / "ssim.txt", ssim_txt.str());

  ordered_json summary;
  summary["input_samples"] = src.samples.size();
  summary["kept_samples"] = result.samples.size();
  summary["states"] = o.states;
  summary["state9_window"] = o.state9_window;
  summary["roi"] = o.roi;
  summary["detected"] = detected;
  summary["truth_boxes_outside_window"] = lost_boxes;
  summary["class_counts"] = result.class_counts;
  summary["empty_warning"] = filtered.empty_warning;
  write_text(out / "preprocess.json", summary.dump(2) + "\n");

  std::cout << "kept " << result.samples.size() << " of " << src.samples.size() << " samples";
  if (*mode == RoiMode::Detect) std::cout << "; detector hits " << detected;
  std::cout << "\n" << ssim_txt.str();
  announce(out / kManifestFile);
  announce(out / kManifestMetaFile);
  announce(out / "images");
  announce(out / "ssim.json");
  announce(out / "ssim.txt");
  announce(out / "preprocess.json");
  return 0;
}

}  // namespace assemai::cli
