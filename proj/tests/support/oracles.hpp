#pragma once

// Brute-force reference computations written directly from the textbook
// definitions. They deliberately share nothing with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "assemai/core.hpp"
#include "assemai/nnet.hpp"

namespace oracle {

// Mean SSIM over all valid uniform windows, statistics from explicit sums.
inline double ssim(const std::vector<double>& a, const std::vector<double>& b, int w, int h, int win, double c1,
                   double c2) {
  double total = 0.0;
  int count = 0;
  const double n = static_cast<double>(win) * win;
  for (int y0 = 0; y0 + win <= h; ++y0) {
    for (int x0 = 0; x0 + win <= w; ++x0) {
      double ma = 0, mb = 0;
      for (int y = y0; y < y0 + win; ++y)
        for (int x = x0; x < x0 + win; ++x) {
          ma += a[y * w + x];
          mb += b[y * w + x];
        }
      ma /= n;
      mb /= n;
      double va = 0, vb = 0, cov = 0;
      for (int y = y0; y < y0 + win; ++y)
        for (int x = x0; x < x0 + win; ++x) {
          const double da = a[y * w + x] - ma, db = b[y * w + x] - mb;
          va += da * da;
          vb += db * db;
          cov += da * db;
        }
      va /= n;
      vb /= n;
      cov /= n;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  }
  return total / count;
}

// Bilinear sample at half-pixel-centre coordinates with edge clamping.
inline std::vector<double> resize(const std::vector<double>& in, int iw, int ih, int ow, int oh) {
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double sx = (x + 0.5) * iw / ow - 0.5;
      double sy = (y + 0.5) * ih / oh - 0.5;
      sx = std::min(std::max(sx, 0.0), iw - 1.0);
      sy = std::min(std::max(sy, 0.0), ih - 1.0);
      const int x0 = static_cast<int>(sx), y0 = static_cast<int>(sy);
      const int x1 = std::min(x0 + 1, iw - 1), y1 = std::min(y0 + 1, ih - 1);
      const double fx = sx - x0, fy = sy - y0;
      out[y * ow + x] = in[y0 * iw + x0] * (1 - fx) * (1 - fy) + in[y0 * iw + x1] * fx * (1 - fy) +
                        in[y1 * iw + x0] * (1 - fx) * fy + in[y1 * iw + x1] * fx * fy;
    }
  }
  return out;
}

inline double in_box_fraction(const std::vector<double>& map, int w, int h, const assemai::BoundingBox& b) {
  double inside = 0, total = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) total += map[y * w + x];
  for (int y = b.y_min; y < b.y_max; ++y)
    for (int x = b.x_min; x < b.x_max; ++x) inside += map[y * w + x];
  return total == 0 ? 0.0 : inside / total;
}

struct Metrics {
  std::vector<double> precision, recall, f1;
  std::vector<long long> support;
  double wp = 0, wr = 0, wf1 = 0, accuracy = 0;
};

// Counts each quantity by scanning the label lists, one class at a time.
inline Metrics metrics(const std::vector<int>& truth, const std::vector<int>& pred, int classes) {
  Metrics m;
  const double n = static_cast<double>(truth.size());
  long long correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == pred[i];
  m.accuracy = correct / n;
  for (int c = 0; c < classes; ++c) {
    long long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (pred[i] == c && truth[i] == c) ++tp;
      if (pred[i] == c && truth[i] != c) ++fp;
      if (pred[i] != c && truth[i] == c) ++fn;
    }
    const double p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
    const double r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
    const double f = p + r == 0 ? 0.0 : 2 * p * r / (p + r);
    m.precision.push_back(p);
    m.recall.push_back(r);
    m.f1.push_back(f);
    m.support.push_back(tp + fn);
    m.wp += (tp + fn) * p / n;
    m.wr += (tp + fn) * r / n;
    m.wf1 += (tp + fn) * f / n;
  }
  return m;
}

// Central finite differences of the weighted loss with respect to every
// parameter entry; returns the maximum relative error against `analytic`
// (denominators floored at 1e-8).
inline double max_grad_rel_error(assemai::Model& model, const assemai::Tensor& batch, const std::vector<int>& labels,
                                 const assemai::ClassWeights& w, const std::vector<assemai::Tensor>& analytic,
                                 double h = 1e-6) {
  double worst = 0.0;
  for (std::size_t p = 0; p < model.params().size(); ++p) {
    auto& data = model.params()[p].data;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double keep = data[i];
      data[i] = keep + h;
      const double up = assemai::weighted_ce(assemai::forward(model, batch), labels, w).loss;
      data[i] = keep - h;
      const double down = assemai::weighted_ce(assemai::forward(model, batch), labels, w).loss;
      data[i] = keep;
      const double numeric = (up - down) / (2 * h);
      const double a = analytic[p].data[i];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

// Direct-loop network evaluation for one single-channel-or-more image (CHW).
// `conv1_out`/`conv2_out` receive the post-ReLU activations when non-null.
inline std::vector<double> net_logits(const assemai::Model& m, const std::vector<double>& img,
                                      std::vector<double>* conv1_out = nullptr,
                                      std::vector<double>* conv2_out = nullptr) {
  const assemai::ModelSpec& s = m.spec();
  auto conv = [](const std::vector<double>& in, int c, int h, int w, const assemai::Tensor& wt,
                 const assemai::Tensor& b) {
    const int f = wt.shape[0];
    std::vector<double> out(static_cast<std::size_t>(f) * h * w);
    for (int o = 0; o < f; ++o)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          double acc = b.data[o];
          for (int k = 0; k < c; ++k)
            for (int dy = -1; dy <= 1; ++dy)
              for (int dx = -1; dx <= 1; ++dx) {
                const int yy = y + dy, xx = x + dx;
                if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                acc += wt.data[((o * c + k) * 3 + dy + 1) * 3 + dx + 1] * in[(k * h + yy) * w + xx];
              }
          out[(o * h + y) * w + x] = std::max(acc, 0.0);
        }
    return out;
  };
  auto pool = [](const std::vector<double>& in, int c, int h, int w) {
    std::vector<double> out(static_cast<std::size_t>(c) * (h / 2) * (w / 2));
    for (int k = 0; k < c; ++k)
      for (int y = 0; y < h / 2; ++y)
        for (int x = 0; x < w / 2; ++x)
          out[(k * (h / 2) + y) * (w / 2) + x] =
              std::max({in[(k * h + 2 * y) * w + 2 * x], in[(k * h + 2 * y) * w + 2 * x + 1],
                        in[(k * h + 2 * y + 1) * w + 2 * x], in[(k * h + 2 * y + 1) * w + 2 * x + 1]});
    return out;
  };
  auto dense = [](const std::vector<double>& in, const assemai::Tensor& wt, const assemai::Tensor& b, bool relu) {
    const int o = wt.shape[0], n = wt.shape[1];
    std::vector<double> out(o);
    for (int i = 0; i < o; ++i) {
      double acc = b.data[i];
      for (int j = 0; j < n; ++j) acc += wt.data[i * n + j] * in[j];
      out[i] = relu ? std::max(acc, 0.0) : acc;
    }
    return out;
  };
  const int h = s.in_height, w = s.in_width;
  const auto a1 = conv(img, s.in_channels, h, w, m.param("conv1.weight"), m.param("conv1.bias"));
  if (conv1_out) *conv1_out = a1;
  const auto p1 = pool(a1, s.conv1_filters, h, w);
  const auto a2 = conv(p1, s.conv1_filters, h / 2, w / 2, m.param("conv2.weight"), m.param("conv2.bias"));
  if (conv2_out) *conv2_out = a2;
  const auto p2 = pool(a2, s.conv2_filters, h / 2, w / 2);
  const auto hid = dense(p2, m.param("dense1.weight"), m.param("dense1.bias"), true);
  return dense(hid, m.param("dense2.weight"), m.param("dense2.bias"), false);
}

// Score-CAM unrolled step by step on top of net_logits.
inline std::vector<double> score_cam(const assemai::Model& m, bool second_layer, const std::vector<double>& img,
                                     int target) {
  const assemai::ModelSpec& s = m.spec();
  const int h = s.in_height, w = s.in_width, hw = h * w;
  std::vector<double> a1, a2;
  net_logits(m, img, &a1, &a2);
  const std::vector<double>& acts = second_layer ? a2 : a1;
  const int count = second_layer ? s.conv2_filters : s.conv1_filters;
  const int mh = second_layer ? h / 2 : h, mw = second_layer ? w / 2 : w;
  const double base = net_logits(m, std::vector<double>(img.size(), 0.0))[target];
  std::vector<std::vector<double>> ups;
  std::vector<double> scores;
  for (int k = 0; k < count; ++k) {
    const std::vector<double> plane(acts.begin() + k * mh * mw, acts.begin() + (k + 1) * mh * mw);
    const auto up = resize(plane, mw, mh, w, h);
    const double lo = *std::min_element(up.begin(), up.end()), hi = *std::max_element(up.begin(), up.end());
    if (!(hi > lo)) continue;
    std::vector<double> masked(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) masked[i] = img[i] * (up[i % hw] - lo) / (hi - lo);
    scores.push_back(net_logits(m, masked)[target] - base);
    ups.push_back(up);
  }
  std::vector<double> sal(hw, 0.0);
  if (ups.empty()) return sal;
  double z = 0.0;
  for (double v : scores) z += std::exp(v);
  for (std::size_t k = 0; k < ups.size(); ++k)
    for (int i = 0; i < hw; ++i) sal[i] += std::exp(scores[k]) / z * ups[k][i];
  for (double& v : sal) v = std::max(v, 0.0);
  const double lo = *std::min_element(sal.begin(), sal.end()), hi = *std::max_element(sal.begin(), sal.end());
  for (double& v : sal) v = hi > lo ? (v - lo) / (hi - lo) : (hi > 0 ? 1.0 : 0.0);
  return sal;
}

}  // namespace oracle
