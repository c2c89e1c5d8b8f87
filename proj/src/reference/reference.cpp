#include "assemai/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace assemai::reference {

void conv3x3_forward(int batch, int channels, int height, int width, int filters, std::span<const double> input,
                     std::span<const double> weight, std::span<const double> bias, std::span<double> output) {
  for (int b = 0; b < batch; ++b)
    for (int f = 0; f < filters; ++f)
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
          double acc = bias[f];
          for (int c = 0; c < channels; ++c)
            for (int ky = 0; ky < 3; ++ky)
              for (int kx = 0; kx < 3; ++kx) {
                const int sy = y + ky - 1, sx = x + kx - 1;
                if (sy < 0 || sy >= height || sx < 0 || sx >= width) continue;
                acc += weight[((f * channels + c) * 3 + ky) * 3 + kx] *
                       input[((static_cast<std::size_t>(b) * channels + c) * height + sy) * width + sx];
              }
          output[((static_cast<std::size_t>(b) * filters + f) * height + y) * width + x] = acc;
        }
}

void dense_forward(int batch, int in_features, int out_features, std::span<const double> input,
                   std::span<const double> weight, std::span<const double> bias, std::span<double> output) {
  for (int b = 0; b < batch; ++b)
    for (int o = 0; o < out_features; ++o) {
      double acc = bias[o];
      for (int i = 0; i < in_features; ++i)
        acc += weight[static_cast<std::size_t>(o) * in_features + i] *
               input[static_cast<std::size_t>(b) * in_features + i];
      output[static_cast<std::size_t>(b) * out_features + o] = acc;
    }
}

void maxpool2_forward(int planes, int height, int width, std::span<const double> input, std::span<double> output) {
  const int oh = height / 2, ow = width / 2;
  for (int p = 0; p < planes; ++p)
    for (int y = 0; y < oh; ++y)
      for (int x = 0; x < ow; ++x) {
        double m = -std::numeric_limits<double>::infinity();
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx)
            m = std::max(m, input[(static_cast<std::size_t>(p) * height + 2 * y + dy) * width + 2 * x + dx]);
        output[(static_cast<std::size_t>(p) * oh + y) * ow + x] = m;
      }
}

double ssim(std::span<const double> a, std::span<const double> b, int width, int height, int window, double c1,
            double c2) {
  const double n = static_cast<double>(window) * window;
  double total = 0.0;
  long count = 0;
  for (int y = 0; y + window <= height; ++y) {
    for (int x = 0; x + window <= width; ++x) {
      double mu_a = 0, mu_b = 0;
      for (int v = 0; v < window; ++v)
        for (int u = 0; u < window; ++u) {
          mu_a += a[static_cast<std::size_t>(y + v) * width + x + u];
          mu_b += b[static_cast<std::size_t>(y + v) * width + x + u];
        }
      mu_a /= n;
      mu_b /= n;
      double va = 0, vb = 0, cov = 0;
      for (int v = 0; v < window; ++v)
        for (int u = 0; u < window; ++u) {
          const double da = a[static_cast<std::size_t>(y + v) * width + x + u] - mu_a;
          const double db = b[static_cast<std::size_t>(y + v) * width + x + u] - mu_b;
          va += da * da;
          vb += db * db;
          cov += da * db;
        }
      va /= n;
      vb /= n;
      cov /= n;
      total += (2 * mu_a * mu_b + c1) * (2 * cov + c2) / ((mu_a * mu_a + mu_b * mu_b + c1) * (va + vb + c2));
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

std::vector<double> resize_bilinear(std::span<const double> in, int in_width, int in_height, int out_width,
                                    int out_height) {
  auto source = [](int o, int in_n, int out_n) {
    const double s = (o + 0.5) * in_n / out_n - 0.5;
    return std::min(std::max(s, 0.0), static_cast<double>(in_n - 1));
  };
  auto tent = [](double d) { return std::max(0.0, 1.0 - std::abs(d)); };
  std::vector<double> out(static_cast<std::size_t>(out_width) * out_height);
  for (int oy = 0; oy < out_height; ++oy) {
    const double sy = source(oy, in_height, out_height);
    for (int ox = 0; ox < out_width; ++ox) {
      const double sx = source(ox, in_width, out_width);
      double acc = 0.0;
      for (int iy = 0; iy < in_height; ++iy) {
        const double wy = tent(sy - iy);
        if (wy == 0.0) continue;
        for (int ix = 0; ix < in_width; ++ix) acc += wy * tent(sx - ix) * in[static_cast<std::size_t>(iy) * in_width + ix];
      }
      out[static_cast<std::size_t>(oy) * out_width + ox] = acc;
    }
  }
  return out;
}

std::vector<double> ncc_surface(std::span<const double> image, int width, int height, std::span<const double> templ,
                                int t_width, int t_height) {
  const int pw = width - t_width + 1, ph = height - t_height + 1;
  const double n = static_cast<double>(t_width) * t_height;
  double tm = 0.0;
  for (double v : templ) tm += v;
  tm /= n;
  double tss = 0.0;
  for (double v : templ) tss += (v - tm) * (v - tm);
  std::vector<double> out(static_cast<std::size_t>(pw) * ph, 0.0);
  if (tss <= 1e-10 * n) return out;
  for (int y = 0; y < ph; ++y)
    for (int x = 0; x < pw; ++x) {
      double im = 0.0;
      for (int v = 0; v < t_height; ++v)
        for (int u = 0; u < t_width; ++u) im += image[static_cast<std::size_t>(y + v) * width + x + u];
      im /= n;
      double iss = 0.0, cross = 0.0;
      for (int v = 0; v < t_height; ++v)
        for (int u = 0; u < t_width; ++u) {
          const double di = image[static_cast<std::size_t>(y + v) * width + x + u] - im;
          iss += di * di;
          cross += di * (templ[static_cast<std::size_t>(v) * t_width + u] - tm);
        }
      if (iss <= 1e-10 * n) continue;
      out[static_cast<std::size_t>(y) * pw + x] = std::clamp(cross / std::sqrt(tss * iss), -1.0, 1.0);
    }
  return out;
}

}  // namespace assemai::reference
