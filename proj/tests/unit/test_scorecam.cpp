#include <doctest.h>

#include "assemai/raster_io.hpp"
#include "assemai/scorecam.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace assemai;

namespace {

ModelSpec small_spec(int size, int f1, int f2) {
  ModelSpec s;
  s.in_height = size;
  s.in_width = size;
  s.conv1_filters = f1;
  s.conv2_filters = f2;
  s.hidden = 6;
  return s;
}

}  // namespace

TEST_SUITE("scorecam") {
  TEST_CASE("activation maps") {
    ModelSpec s = small_spec(8, 3, 4);
    const Model zero(s);
    const ImageRaster black(8, 8, 1);
    const ActivationMaps a = activation_maps(zero, "conv1", black);
    CHECK(a.count == 3);
    for (double v : a.data) CHECK(v == 0.0);
    CHECK_THROWS_AS(activation_maps(zero, "dense1", black), InputError);

    CHECK(activation_maps(Model(ModelSpec{}), "conv2", ImageRaster(ModelSpec{}.in_width, ModelSpec{}.in_height, 1))
              .count == 64);

    Rng rng(3);
    const Model m = testutil::random_model(rng, s);
    const ImageRaster img = testutil::random_raster(rng, 8, 8);
    ForwardCache cache;
    forward(m, image_to_batch(m, img), &cache);
    std::vector<double> c1, c2;
    oracle::net_logits(m, img.pixels(), &c1, &c2);
    const ActivationMaps m2 = activation_maps(m, "conv2", img);
    CHECK(m2.width == 4);
    REQUIRE(m2.data.size() == c2.size());
    for (std::size_t i = 0; i < c2.size(); ++i) CHECK(std::abs(m2.data[i] - c2[i]) < 1e-12);
  }

  TEST_CASE("degenerate and singleton cases") {
    const ModelSpec s = small_spec(4, 2, 2);
    Rng rng(4);
    const ImageRaster img = testutil::random_raster(rng, 4, 4);
    const SaliencyMap z = score_cam(Model(s), "conv2", img, 0);
    CHECK(z.degenerate);
    for (double v : z.values) CHECK(v == 0.0);

    // One conv1 channel passing the image through: saliency is the normalised image.
    ModelSpec one = small_spec(4, 1, 1);
    Model m(one);
    m.param("conv1.weight").data[4] = 1.0;
    const SaliencyMap sal = score_cam(m, "conv1", img, 0);
    CHECK_FALSE(sal.degenerate);
    const auto [lo, hi] = std::minmax_element(img.pixels().begin(), img.pixels().end());
    for (int i = 0; i < 16; ++i) CHECK(sal.values[i] == doctest::Approx((img.pixels()[i] - *lo) / (*hi - *lo)));
    CHECK_THROWS_AS(score_cam(m, "conv1", img, 5), InputError);
  }

  TEST_CASE("score-cam matches an unrolled reference on tiny nets") {
    Rng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
      const Model m = testutil::random_model(rng, small_spec(4, 2, 2));
      const ImageRaster img = testutil::random_raster(rng, 4, 4);
      const int target = static_cast<int>(rng.below(5));
      for (bool second : {false, true}) {
        const SaliencyMap got = score_cam(m, second ? "conv2" : "conv1", img, target);
        const auto want = oracle::score_cam(m, second, img.pixels(), target);
        for (int i = 0; i < 16; ++i) CHECK(std::abs(got.values[i] - want[i]) < 1e-9);
      }
    }
  }

  TEST_CASE("saliency invariants") {
    Rng rng(22);
    for (int trial = 0; trial < 5; ++trial) {
      Model m = testutil::random_model(rng, small_spec(8, 3, 4));
      const ImageRaster img = testutil::random_raster(rng, 8, 8);
      const SaliencyMap a = score_cam(m, "conv2", img, 1);
      double mx = 0.0;
      for (double v : a.values) {
        CHECK((v >= 0.0 && v <= 1.0));
        mx = std::max(mx, v);
      }
      if (!a.degenerate && mx > 0) CHECK(mx == 1.0);
      CHECK(score_cam(m, "conv2", img, 1).values == a.values);
      // shifting every logit by the same constant leaves the map unchanged
      for (double& b : m.param("dense2.bias").data) b += 3.5;
      const SaliencyMap shifted = score_cam(m, "conv2", img, 1);
      for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(std::abs(shifted.values[i] - a.values[i]) < 1e-9);
    }
  }

  TEST_CASE("in-box fraction") {
    SaliencyMap uni{10, 8, std::vector<double>(80, 0.3), false};
    CHECK(saliency_in_box_fraction(uni, {2, 2, 7, 6}) == doctest::Approx(20.0 / 80.0).epsilon(1e-14));
    SaliencyMap inside{10, 8, std::vector<double>(80, 0.0), false};
    inside.values[3 * 10 + 4] = 1.0;
    CHECK(saliency_in_box_fraction(inside, {4, 3, 5, 4}) == 1.0);
    CHECK(saliency_in_box_fraction(SaliencyMap{10, 8, std::vector<double>(80, 0.0), true}, {0, 0, 1, 1}) == 0.0);
    CHECK_THROWS_AS(saliency_in_box_fraction(uni, {0, 0, 11, 8}), InputError);
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
      SaliencyMap m{13, 9, {}, false};
      for (int i = 0; i < 13 * 9; ++i) m.values.push_back(rng.uniform());
      const int x0 = rng.range(0, 12), y0 = rng.range(0, 8);
      const BoundingBox b{x0, y0, rng.range(x0 + 1, 13), rng.range(y0 + 1, 9)};
      CHECK(std::abs(saliency_in_box_fraction(m, b) - oracle::in_box_fraction(m.values, 13, 9, b)) < 1e-12);
    }
  }

  TEST_CASE("heatmap rendering") {
    const auto& ramp = heatmap_ramp();
    CHECK(ramp[0] == std::array<double, 3>{0.0, 0.0, 1.0});
    CHECK(ramp[255] == std::array<double, 3>{1.0, 0.0, 0.0});
    Rng rng(24);
    const ImageRaster base = testutil::random_raster(rng, 6, 5);
    SaliencyMap m{6, 5, std::vector<double>(30, 0.0), false};
    m.values[7] = 1.0;
    const ImageRaster h = render_heatmap(m, base);
    CHECK(h.channels() == 3);
    const double l0 = base.pixels()[0];
    CHECK(h.at(0, 0, 0) == doctest::Approx(0.5 * l0));
    CHECK(h.at(0, 0, 2) == doctest::Approx(0.5 * l0 + 0.5));
    const double l7 = base.pixels()[7];
    CHECK(h.at(1, 1, 0) == doctest::Approx(0.5 * l7 + 0.5));
    CHECK(h.at(1, 1, 2) == doctest::Approx(0.5 * l7));
    const ImageRaster q = decode_pnm(encode_pnm(h));
    CHECK(decode_pnm(encode_pnm(q)) == q);
    CHECK_THROWS_AS(render_heatmap(m, ImageRaster(5, 5, 1)), InputError);
  }
}
