#include "assemai/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>

#include "assemai/raster_io.hpp"
#include "assemai/rng.hpp"

namespace assemai {

namespace {

constexpr int kTemplateMargin = 1;

enum StreamTag : std::uint64_t { kJitterStream = 1, kClutterStream = 2, kNoiseStream = 3 };

int round_int(double v) { return static_cast<int>(std::floor(v + 0.5)); }

void check_renderable(CycleState state) {
  if (state.value() != 4 && state.value() != 9) {
    throw InputError("frames can only be rendered for cycle states 4 and 9, got " +
                     std::to_string(state.value()));
  }
}

bool inside_nose(const BoundingBox& nose, int x, int y) {
  const int rows = nose.height();
  const int r = y - nose.y_min;
  const double half = static_cast<double>(r + 1) / rows * nose.width() / 2.0;
  const double dx = (x - nose.x_min) + 0.5 - nose.width() / 2.0;
  return std::abs(dx) <= half;
}

/// Paints the parts `label` keeps into `base` and returns the tight box of painted pixels.
BoundingBox paint_rocket(std::vector<double>& base, int width, const RocketLayout& layout,
                         AnomalyClass label) {
  BoundingBox tight{1 << 30, 1 << 30, -1, -1};
  auto mark = [&](int x, int y, double level) {
    base[static_cast<std::size_t>(y) * width + x] = level;
    tight.x_min = std::min(tight.x_min, x);
    tight.y_min = std::min(tight.y_min, y);
    tight.x_max = std::max(tight.x_max, x + 1);
    tight.y_max = std::max(tight.y_max, y + 1);
  };
  auto fill = [&](const BoundingBox& b, double level) {
    for (int y = b.y_min; y < b.y_max; ++y)
      for (int x = b.x_min; x < b.x_max; ++x) mark(x, y, level);
  };
  if (!missing_body1(label)) fill(layout.body1, kBody1Level);
  if (!missing_body2(label)) fill(layout.body2, kBody2Level);
  if (!missing_nose(label)) {
    for (int y = layout.nose.y_min; y < layout.nose.y_max; ++y)
      for (int x = layout.nose.x_min; x < layout.nose.x_max; ++x)
        if (inside_nose(layout.nose, x, y)) mark(x, y, kNoseLevel);
  }
  if (tight.x_max < 0) return layout.anchor;
  return tight;
}

void paint_clutter(std::vector<double>& base, int width, int height, const BoundingBox& keep_out,
                   int count, Rng& rng) {
  const int smin = std::max(3, width / 40);
  const int smax = std::max(smin + 1, width / 6);
  const BoundingBox guard{keep_out.x_min - 2, keep_out.y_min - 2, keep_out.x_max + 2, keep_out.y_max + 2};
  for (int k = 0; k < count; ++k) {
    const bool ellipse = rng.below(2) == 1;
    const double level = rng.uniform(0.35, 0.95);
    for (int attempt = 0; attempt < 32; ++attempt) {
      const int w = rng.range(smin, std::min(smax, width));
      const int h = rng.range(smin, std::min(smax, height));
      const int x0 = rng.range(0, width - w);
      const int y0 = rng.range(0, height - h);
      const BoundingBox b{x0, y0, x0 + w, y0 + h};
      const bool overlaps = b.x_min < guard.x_max && guard.x_min < b.x_max && b.y_min < guard.y_max &&
                            guard.y_min < b.y_max;
      if (overlaps) continue;
      const double cx = x0 + w / 2.0, cy = y0 + h / 2.0;
      for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x) {
          if (ellipse) {
            const double ex = (x + 0.5 - cx) / (w / 2.0), ey = (y + 0.5 - cy) / (h / 2.0);
            if (ex * ex + ey * ey > 1.0) continue;
          }
          base[static_cast<std::size_t>(y) * width + x] = level;
        }
      }
      break;
    }
  }
}

}  // namespace

std::pair<int, int> max_jitter(CycleState state, const RenderOptions& opts) {
  const RocketLayout nominal = rocket_layout(state, opts, 0, 0);
  const int mx = nominal.anchor.x_min - nominal.crop.x_min;
  const int my = nominal.anchor.y_min - nominal.crop.y_min;
  return {std::min(mx, std::max(1, mx / 3)), std::min(my, std::max(1, my / 3))};
}

RocketLayout rocket_layout(CycleState state, const RenderOptions& opts, int jitter_x, int jitter_y) {
  check_renderable(state);
  RocketLayout l;
  l.crop = opts.geometry.box_for(state, opts.width, opts.height);
  if (!l.crop.valid_for(opts.width, opts.height)) {
    throw InputError("crop geometry for state " + std::to_string(state.value()) + " falls outside the frame");
  }
  const int rw = std::max(3, round_int(0.6 * l.crop.width()));
  const int rh = std::max(6, round_int(0.84 * l.crop.height()));
  const int x0 = l.crop.x_min + (l.crop.width() - rw) / 2 + jitter_x;
  const int y0 = l.crop.y_min + (l.crop.height() - rh) / 2 + jitter_y;
  l.anchor = {x0, y0, x0 + rw, y0 + rh};
  const int nose_rows = std::max(2, round_int(0.30 * rh));
  const int body2_end = std::max(nose_rows + 2, round_int(0.65 * rh));
  const int w2 = std::max(1, round_int(0.8 * rw));
  const int inset = (rw - w2) / 2;
  l.nose = {x0, y0, x0 + rw, y0 + nose_rows};
  l.body2 = {x0 + inset, y0 + nose_rows, x0 + inset + w2, y0 + body2_end};
  l.body1 = {x0, y0 + body2_end, x0 + rw, y0 + rh};
  return l;
}

RenderedFrame render_frame(std::int64_t cycle_index, CycleState state, AnomalyClass label,
                           std::uint64_t rng_seed, const RenderOptions& opts) {
  check_renderable(state);
  if (to_index(label) < 0 || to_index(label) >= kNumClasses) throw InputError("invalid anomaly class");
  if (opts.noise_sigma < 0.0) throw InputError("noise sigma must be >= 0");
  const auto key_a = static_cast<std::uint64_t>(cycle_index);
  const auto key_b = static_cast<std::uint64_t>(state.value());

  Rng jitter_rng(derive_seed(rng_seed, key_a, key_b, kJitterStream));
  const auto [jx, jy] = max_jitter(state, opts);
  const int dx = jitter_rng.range(-jx, jx);
  const int dy = jitter_rng.range(-jy, jy);
  const RocketLayout layout = rocket_layout(state, opts, dx, dy);

  std::vector<double> base(static_cast<std::size_t>(opts.width) * opts.height, kBackgroundLevel);
  Rng clutter_rng(derive_seed(rng_seed, key_a, key_b, kClutterStream));
  paint_clutter(base, opts.width, opts.height, layout.crop, opts.clutter_count, clutter_rng);
  const BoundingBox truth = paint_rocket(base, opts.width, layout, label);

  if (opts.noise_sigma > 0.0) {
    Rng noise_rng(derive_seed(rng_seed, key_a, key_b, kNoiseStream));
    for (double& v : base) v = std::clamp(v + opts.noise_sigma * noise_rng.normal(), 0.0, 1.0);
  }
  return {ImageRaster(opts.width, opts.height, 1, std::move(base)), truth, layout};
}

std::vector<RocketTemplate> rocket_templates(CycleState state, const RenderOptions& opts) {
  RenderOptions clean = opts;
  clean.noise_sigma = 0.0;
  clean.clutter_count = 0;
  const RocketLayout layout = rocket_layout(state, clean, 0, 0);
  std::vector<RocketTemplate> out;
  for (AnomalyClass label : kAllClasses) {
    if (missing_nose(label) && missing_body2(label) && missing_body1(label)) continue;
    std::vector<double> base(static_cast<std::size_t>(clean.width) * clean.height, kBackgroundLevel);
    const BoundingBox tight = paint_rocket(base, clean.width, layout, label);
    const BoundingBox cut{std::max(0, tight.x_min - kTemplateMargin), std::max(0, tight.y_min - kTemplateMargin),
                          std::min(clean.width, tight.x_max + kTemplateMargin), std::min(clean.height, tight.y_max + kTemplateMargin)};
    ImageRaster tpl(cut.width(), cut.height(), 1);
    for (int y = 0; y < cut.height(); ++y)
      for (int x = 0; x < cut.width(); ++x)
        tpl.at(x, y) = base[static_cast<std::size_t>(y + cut.y_min) * clean.width + x + cut.x_min];
    out.push_back({std::move(tpl), label, layout.anchor.x_min - cut.x_min, layout.anchor.y_min - cut.y_min});
  }
  return out;
}

void GenConfig::validate() const {
  if (total_count < 5) throw InputError("total_count must be >= 5");
  double sum = 0.0;
  for (double f : class_fractions) {
    if (!(f >= 0.0)) throw InputError("class fractions must be non-negative");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InputError("class fractions must sum to 1 (got " + std::to_string(sum) + ")");
  if (width < 16 || height < 16) throw InputError("image size must be at least 16x16");
  if (!(noise_sigma >= 0.0)) throw InputError("noise_sigma must be >= 0");
  if (clutter_count < 0) throw InputError("clutter_count must be >= 0");
}

RenderOptions GenConfig::render_options() const {
  RenderOptions o;
  o.width = width;
  o.height = height;
  o.noise_sigma = noise_sigma;
  o.clutter_count = clutter_count;
  return o;
}

ClassCounts class_counts_for(std::int64_t total, const std::array<double, kNumClasses>& fractions) {
  ClassCounts counts{};
  std::int64_t minority = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    counts[c] = std::llround(static_cast<double>(total) * fractions[c]);
    minority += counts[c];
  }
  // Rounding up several small classes can overshoot; trim the most over-rounded first.
  while (minority > total) {
    int worst = 1;
    double excess = -1e300;
    for (int c = 1; c < kNumClasses; ++c) {
      const double e = static_cast<double>(counts[c]) - static_cast<double>(total) * fractions[c];
      if (counts[c] > 0 && e > excess) excess = e, worst = c;
    }
    --counts[worst];
    --minority;
  }
  counts[0] = total - minority;
  return counts;
}

std::string generator_version() { return std::string("assemai-synthgen/1 ") + Rng::kAlgorithm; }

DatasetManifest plan_dataset(const GenConfig& cfg) {
  cfg.validate();
  DatasetManifest m;
  m.seed = cfg.seed;
  m.generator_version = generator_version();
  const ClassCounts counts = class_counts_for(cfg.total_count, cfg.class_fractions);

  std::vector<AnomalyClass> labels;
  labels.reserve(static_cast<std::size_t>(cfg.total_count));
  for (int c = 0; c < kNumClasses; ++c) labels.insert(labels.end(), counts[c], static_cast<AnomalyClass>(c));
  Rng order_rng(derive_seed(cfg.seed, 0x6f72646572ULL));
  order_rng.shuffle(labels.begin(), labels.end());

  Rng time_rng(derive_seed(cfg.seed, 0x74696d65ULL));
  const auto [sub_a, sub_b] = cfg.timing.state9_subwindow();
  const RenderOptions opts = cfg.render_options();
  m.samples.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Sample s;
    s.cycle_index = static_cast<std::int64_t>(i / 2) + 1;
    s.state = CycleState(i % 2 == 0 ? 4 : 9);
    s.label = labels[i];
    const double width = static_cast<double>(cfg.timing.window_end(s.state) - cfg.timing.window_begin(s.state));
    double frac = time_rng.uniform();
    if (s.state.value() == 9) frac = sub_a + frac * (sub_b - sub_a);
    s.timestamp_ms = (s.cycle_index - 1) * cfg.timing.cycle_period_ms() + cfg.timing.window_begin(s.state) +
                     static_cast<std::int64_t>(std::floor(frac * width));
    char name[48];
    std::snprintf(name, sizeof name, "images/frame_%06zu.pgm", i);
    s.image_path = name;
    m.samples.push_back(std::move(s));
  }
  m.recount();
  return m;
}

DatasetManifest gen_dataset(const GenConfig& cfg, const std::filesystem::path& out_dir) {
  DatasetManifest m = plan_dataset(cfg);
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "images", ec);
  if (ec) throw IoError("cannot create " + (out_dir / "images").string() + ": " + ec.message());
  const RenderOptions opts = cfg.render_options();

  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto n = static_cast<std::int64_t>(m.samples.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      Sample& s = m.samples[static_cast<std::size_t>(i)];
      RenderedFrame f = render_frame(s.cycle_index, s.state, s.label, cfg.seed, opts);
      s.truth_box = f.truth_box;
      write_raster(f.image, out_dir / s.image_path);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  write_manifest(m, out_dir);
  return m;
}

}  // namespace assemai
