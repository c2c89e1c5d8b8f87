#include <algorithm>
#include <cmath>
#include <vector>

#include "assemai/kernels.hpp"

namespace assemai::kernels {

double ssim_mean(std::span<const double> a, std::span<const double> b, int width, int height, int window,
                 double c1, double c2) {
  const int ow = width - window + 1;
  const int oh = height - window + 1;
  const double n = static_cast<double>(window) * window;

  // Horizontal window sums of a, b, a^2, b^2, ab for every row.
  const std::size_t hsize = static_cast<std::size_t>(height) * ow;
  std::vector<double> ha(hsize), hb(hsize), haa(hsize), hbb(hsize), hab(hsize);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    const double* ra = a.data() + static_cast<std::size_t>(y) * width;
    const double* rb = b.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < ow; ++x) {
      double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
      for (int k = 0; k < window; ++k) {
        const double va = ra[x + k], vb = rb[x + k];
        sa += va;
        sb += vb;
        saa += va * va;
        sbb += vb * vb;
        sab += va * vb;
      }
      const std::size_t i = static_cast<std::size_t>(y) * ow + x;
      ha[i] = sa, hb[i] = sb, haa[i] = saa, hbb[i] = sbb, hab[i] = sab;
    }
  }

  std::vector<double> row_total(static_cast<std::size_t>(oh));
#pragma omp parallel for schedule(static)
  for (int y = 0; y < oh; ++y) {
    double total = 0.0;
    for (int x = 0; x < ow; ++x) {
      double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
      for (int k = 0; k < window; ++k) {
        const std::size_t i = static_cast<std::size_t>(y + k) * ow + x;
        sa += ha[i];
        sb += hb[i];
        saa += haa[i];
        sbb += hbb[i];
        sab += hab[i];
      }
      const double mu_a = sa / n, mu_b = sb / n;
      const double var_a = saa / n - mu_a * mu_a;
      const double var_b = sbb / n - mu_b * mu_b;
      const double cov = sab / n - mu_a * mu_b;
      total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
    }
    row_total[static_cast<std::size_t>(y)] = total;
  }
  double sum = 0.0;
  for (double t : row_total) sum += t;
  return sum / (static_cast<double>(ow) * oh);
}

namespace {

struct Tap {
  int i0, i1;
  double frac;
};

std::vector<Tap> taps(int in, int out) {
  std::vector<Tap> t(static_cast<std::size_t>(out));
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    double src = (o + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const int i0 = static_cast<int>(std::floor(src));
    t[static_cast<std::size_t>(o)] = {i0, std::min(i0 + 1, in - 1), src - i0};
  }
  return t;
}

}  // namespace

void resize_plane(std::span<const double> in, int in_width, int in_height, std::span<double> out, int out_width,
                  int out_height) {
  const auto tx = taps(in_width, out_width);
  const auto ty = taps(in_height, out_height);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < out_height; ++y) {
    const Tap& v = ty[static_cast<std::size_t>(y)];
    const double* r0 = in.data() + static_cast<std::size_t>(v.i0) * in_width;
    const double* r1 = in.data() + static_cast<std::size_t>(v.i1) * in_width;
    double* dst = out.data() + static_cast<std::size_t>(y) * out_width;
    for (int x = 0; x < out_width; ++x) {
      const Tap& h = tx[static_cast<std::size_t>(x)];
      const double top = (1.0 - h.frac) * r0[h.i0] + h.frac * r0[h.i1];
      const double bottom = (1.0 - h.frac) * r1[h.i0] + h.frac * r1[h.i1];
      dst[x] = (1.0 - v.frac) * top + v.frac * bottom;
    }
  }
}

}  // namespace assemai::kernels
