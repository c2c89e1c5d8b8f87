#include <doctest.h>

#include "assemai/pipeline.hpp"
#include "assemai/preprocess.hpp"
#include "assemai/roi.hpp"
#include "assemai/synthgen.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace assemai;

namespace {

DatasetManifest alternating(int n) {
  DatasetManifest m;
  const CycleTiming t = CycleTiming::uniform(2100);
  for (int i = 0; i < n; ++i) {
    Sample s;
    s.image_path = "img" + std::to_string(i);
    s.state = CycleState(i % 2 ? 9 : 4);
    s.cycle_index = i / 2 + 1;
    s.timestamp_ms = (s.cycle_index - 1) * 2100 + t.window_begin(s.state) + 50;
    s.label = class_from_index(i % 5);
    m.samples.push_back(s);
  }
  m.recount();
  return m;
}

}  // namespace

TEST_SUITE("preprocess") {
  TEST_CASE("state filter") {
    const DatasetManifest m = alternating(1000);
    const CycleTiming t = CycleTiming::uniform(2100);
    const FilterResult only4 = filter_states(m, {4}, t);
    CHECK(only4.manifest.samples.size() == 500);
    const FilterResult both = filter_states(m, {4, 9}, t);
    CHECK(both.manifest.samples.size() == 1000);
    const FilterResult none = filter_states(m, {}, t);
    CHECK(none.manifest.samples.empty());
    CHECK(none.empty_warning);
    CHECK(none.manifest.class_counts == ClassCounts{});

    // idempotent and a stable sublist
    const FilterResult again = filter_states(only4.manifest, {4}, t);
    CHECK(again.manifest.samples.size() == only4.manifest.samples.size());
    for (std::size_t i = 0; i < again.manifest.samples.size(); ++i) {
      CHECK(again.manifest.samples[i].image_path == only4.manifest.samples[i].image_path);
      CHECK(only4.manifest.samples[i].image_path == m.samples[2 * i].image_path);
    }

    // state-9 subwindow: every sample sits at 0.5 of its window
    const CycleTiming early(t.boundaries(), {0.0, 0.5});
    CHECK(filter_states(m, {9}, early).manifest.samples.empty());
    const CycleTiming late(t.boundaries(), {0.5, 1.0});
    CHECK(filter_states(m, {9}, late).manifest.samples.size() == 500);
  }

  TEST_CASE("ssim closed forms") {
    Rng rng(4);
    const ImageRaster x = testutil::random_raster(rng, 16, 12);
    CHECK(ssim(x, x) == 1.0);
    const ImageRaster zeros(10, 10, 1);
    ImageRaster ones(10, 10, 1);
    for (double& v : ones.pixels()) v = 1.0;
    const SsimParams p;
    CHECK(ssim(zeros, ones) == doctest::Approx(p.c1() / (1.0 + p.c1())).epsilon(1e-12));
    CHECK(std::abs(ssim(zeros, ones) - 9.999e-5) < 1e-8);
    CHECK_THROWS_AS(ssim(zeros, ImageRaster(10, 9, 1)), InputError);
    CHECK_THROWS_AS(ssim(ImageRaster(5, 5, 1), ImageRaster(5, 5, 1)), InputError);
  }

  TEST_CASE("ssim matches the brute-force oracle and is symmetric") {
    Rng rng(6);
    const SsimParams p;
    for (int trial = 0; trial < 10; ++trial) {
      const ImageRaster a = testutil::random_raster(rng, 32, 32), b = testutil::random_raster(rng, 32, 32);
      const double got = ssim(a, b, p);
      CHECK(std::abs(got - oracle::ssim(a.pixels(), b.pixels(), 32, 32, p.window, p.c1(), p.c2())) < 1e-9);
      CHECK(std::abs(got - ssim(b, a, p)) < 1e-12);
      CHECK((got >= -1.0 && got <= 1.0));
    }
  }

  TEST_CASE("crop identities and composition") {
    Rng rng(8);
    const ImageRaster img = testutil::random_raster(rng, 20, 15, 3);
    CHECK(crop(img, {0, 0, 20, 15}) == img);
    const ImageRaster one = crop(img, {3, 4, 4, 5});
    CHECK(one.width() == 1);
    CHECK(one.at(0, 0, 2) == img.at(3, 4, 2));
    CHECK_THROWS_AS(crop(img, {0, 0, 21, 15}), InputError);
    CHECK_THROWS_AS(crop(img, {5, 5, 5, 9}), InputError);
    for (int trial = 0; trial < 100; ++trial) {
      const int ax = rng.range(0, 18), ay = rng.range(0, 13);
      const BoundingBox a{ax, ay, rng.range(ax + 1, 20), rng.range(ay + 1, 15)};
      const int bx = rng.range(0, a.width() - 1), by = rng.range(0, a.height() - 1);
      const BoundingBox b{bx, by, rng.range(bx + 1, a.width()), rng.range(by + 1, a.height())};
      const BoundingBox shifted{b.x_min + a.x_min, b.y_min + a.y_min, b.x_max + a.x_min, b.y_max + a.y_min};
      CHECK(crop(crop(img, a), b) == crop(img, shifted));
    }
  }

  TEST_CASE("fixed crop geometry on reference-sized frames") {
    const ImageRaster frame(1080, 720, 1);
    const ImageRaster c4 = fixed_crop_for_state(frame, CycleState(4));
    CHECK(c4.height() == 200);
    CHECK(c4.width() == 70);
    const ImageRaster c9 = fixed_crop_for_state(frame, CycleState(9));
    CHECK(c9.height() == 400);
    CHECK(c9.width() == 205);
    CHECK_THROWS_AS(fixed_crop_for_state(frame, CycleState(5)), InputError);

    const CropGeometryTable whole(10, 10, {{4, CropRect{0, 0, 10, 10}}});
    Rng rng(1);
    const ImageRaster img = testutil::random_raster(rng, 10, 10);
    CHECK(fixed_crop_for_state(img, CycleState(4), whole) == img);

    const CropGeometryTable off(10, 10, {{4, CropRect{5, 0, 8, 4}}});
    try {
      fixed_crop_for_state(img, CycleState(4), off);
      FAIL("expected InputError");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("right") != std::string::npos);
    }
    const CropGeometryTable round = CropGeometryTable::from_json(CropGeometryTable::defaults().to_json());
    CHECK(round.rects() == CropGeometryTable::defaults().rects());
  }

  TEST_CASE("bilinear resize") {
    Rng rng(10);
    const ImageRaster img = testutil::random_raster(rng, 9, 7);
    const ImageRaster same = resize_bilinear(img, 9, 7);
    for (std::size_t i = 0; i < img.pixels().size(); ++i) CHECK(std::abs(same.pixels()[i] - img.pixels()[i]) < 1e-12);
    const ImageRaster checker(2, 2, 1, {0.0, 1.0, 1.0, 0.0});
    CHECK(resize_bilinear(checker, 1, 1).at(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    for (int trial = 0; trial < 20; ++trial) {
      const int iw = rng.range(1, 12), ih = rng.range(1, 12), ow = rng.range(1, 12), oh = rng.range(1, 12);
      const ImageRaster in = testutil::random_raster(rng, iw, ih);
      const ImageRaster out = resize_bilinear(in, ow, oh);
      const auto want = oracle::resize(in.pixels(), iw, ih, ow, oh);
      for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(out.pixels()[i] - want[i]) < 1e-9);
    }
  }

  TEST_CASE("ncc template detection") {
    Rng rng(13);
    const ImageRaster templ = testutil::random_raster(rng, 6, 5);
    ImageRaster img(30, 25, 1);
    for (double& v : img.pixels()) v = 0.3;
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 6; ++x) img.at(11 + x, 7 + y) = templ.at(x, y);
    const std::vector<ImageRaster> ts = {templ};
    const RoiDetection d = detect_roi_template(img, ts, 0.5);
    CHECK(d.found);
    CHECK(d.box == BoundingBox{11, 7, 17, 12});
    CHECK(d.score == doctest::Approx(1.0).epsilon(1e-9));

    ImageRaster flat(30, 25, 1);
    for (double& v : flat.pixels()) v = 0.4;
    const RoiDetection none = detect_roi_template(flat, ts, 0.5);
    CHECK_FALSE(none.found);
    CHECK(none.score == 0.0);

    // NCC surface agrees with a direct per-placement computation
    const ImageRaster noisy = testutil::random_raster(rng, 14, 11);
    const auto surf = ncc_surface(noisy, templ);
    REQUIRE(surf.size() == 9u * 7u);
    for (int y0 = 0; y0 < 7; ++y0)
      for (int x0 = 0; x0 < 9; ++x0) {
        double mi = 0, mt = 0;
        for (int y = 0; y < 5; ++y)
          for (int x = 0; x < 6; ++x) {
            mi += noisy.at(x0 + x, y0 + y);
            mt += templ.at(x, y);
          }
        mi /= 30;
        mt /= 30;
        double num = 0, vi = 0, vt = 0;
        for (int y = 0; y < 5; ++y)
          for (int x = 0; x < 6; ++x) {
            const double a = noisy.at(x0 + x, y0 + y) - mi, b = templ.at(x, y) - mt;
            num += a * b;
            vi += a * a;
            vt += b * b;
          }
        CHECK(std::abs(surf[y0 * 9 + x0] - num / std::sqrt(vi * vt)) < 1e-9);
      }
  }

  TEST_CASE("detector recovers rocket boxes on synthetic frames") {
    RenderOptions ro;
    const RoiLocator loc(ro.width, ro.height);
    int visible = 0, good = 0, fallback_good = 0;
    const int n = 100;
    for (int i = 0; i < n; ++i) {
      const CycleState s(i % 2 ? 9 : 4);
      const AnomalyClass c = class_from_index(i % 5);
      const RenderedFrame f = render_frame(i + 1, s, c, 1234, ro);
      const RoiCrop r = loc.locate(f.image, s);
      CHECK(r.window.valid_for(ro.width, ro.height));
      if (c == AnomalyClass::NoNoseNoBody2NoBody1) {
        // Nothing is drawn, so the detector must fall back to the nominal extent.
        CHECK_FALSE(r.detected);
        fallback_good += iou(r.object_box, f.truth_box) >= 0.5;
        continue;
      }
      ++visible;
      good += r.detected && iou(r.object_box, f.truth_box) >= 0.5;
    }
    MESSAGE("IoU>=0.5 on " << good << "/" << visible << " frames with visible parts, fallback " << fallback_good << "/"
                           << n - visible);
    CHECK(good == visible);
    CHECK(fallback_good == n - visible);
  }

  TEST_CASE("input preparation and box mapping") {
    const BoundingBox window{10, 20, 50, 100};
    const auto b = map_box_to_input({10, 20, 50, 100}, window, 32, 32);
    REQUIRE(b);
    CHECK(*b == BoundingBox{0, 0, 32, 32});
    CHECK_FALSE(map_box_to_input({0, 0, 5, 5}, window, 32, 32).has_value());
    const auto half = map_box_to_input({10, 20, 30, 60}, window, 32, 32);
    REQUIRE(half);
    CHECK(*half == BoundingBox{0, 0, 16, 16});

    RenderOptions ro;
    ro.width = 128;
    ro.height = 128;
    const RenderedFrame f = render_frame(1, CycleState(4), AnomalyClass::NoAnomaly, 5, ro);
    InputPreparer none(RoiMode::None, 16, 16);
    const PreparedInput pn = none.prepare(f.image, CycleState(4));
    CHECK(pn.window == BoundingBox{0, 0, 128, 128});
    CHECK(pn.image.width() == 16);
    InputPreparer fixed(RoiMode::Fixed, 16, 16);
    CHECK(fixed.prepare(f.image, CycleState(4)).window ==
          CropGeometryTable::defaults().box_for(CycleState(4), 128, 128));
    CHECK(parse_roi_mode("detect") == RoiMode::Detect);
    CHECK_FALSE(parse_roi_mode("yolo").has_value());
  }
}
