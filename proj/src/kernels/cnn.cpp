#include <algorithm>
#include <vector>

#include "assemai/kernels.hpp"

namespace assemai::kernels {

namespace {

// col[(c*9 + ky*3 + kx), y*W + x] = in[c, y+ky-1, x+kx-1] (zero outside).
void im2col3x3(const double* in, int channels, int h, int w, double* col) {
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  for (int c = 0; c < channels; ++c) {
    const double* plane = in + c * hw;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        double* row = col + (static_cast<std::size_t>(c) * 9 + ky * 3 + kx) * hw;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          double* dst = row + static_cast<std::size_t>(y) * w;
          if (sy < 0 || sy >= h) {
            std::fill(dst, dst + w, 0.0);
            continue;
          }
          const double* src = plane + static_cast<std::size_t>(sy) * w;
          for (int x = 0; x < w; ++x) {
            const int sx = x + kx - 1;
            dst[x] = (sx < 0 || sx >= w) ? 0.0 : src[sx];
          }
        }
      }
    }
  }
}

// Inverse scatter of im2col3x3: accumulates col entries back onto the image.
void col2im3x3(const double* col, int channels, int h, int w, double* in) {
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  std::fill(in, in + channels * hw, 0.0);
  for (int c = 0; c < channels; ++c) {
    double* plane = in + c * hw;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const double* row = col + (static_cast<std::size_t>(c) * 9 + ky * 3 + kx) * hw;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          const double* src = row + static_cast<std::size_t>(y) * w;
          double* dst = plane + static_cast<std::size_t>(sy) * w;
          for (int x = 0; x < w; ++x) {
            const int sx = x + kx - 1;
            if (sx >= 0 && sx < w) dst[sx] += src[x];
          }
        }
      }
    }
  }
}

}  // namespace

void conv3x3_forward(const ConvShape& s, std::span<const double> input, std::span<const double> weight,
                     std::span<const double> bias, std::span<double> output) {
  const std::size_t hw = static_cast<std::size_t>(s.height) * s.width;
  const int kdim = s.in_channels * 9;
#pragma omp parallel
  {
    std::vector<double> col(static_cast<std::size_t>(kdim) * hw);
#pragma omp for schedule(static)
    for (int b = 0; b < s.batch; ++b) {
      im2col3x3(input.data() + static_cast<std::size_t>(b) * s.in_channels * hw, s.in_channels, s.height, s.width,
                col.data());
      double* out = output.data() + static_cast<std::size_t>(b) * s.filters * hw;
      for (int f = 0; f < s.filters; ++f) std::fill(out + f * hw, out + (f + 1) * hw, bias[f]);
      gemm_nn(s.filters, static_cast<int>(hw), kdim, weight.data(), col.data(), out);
    }
  }
}

void conv3x3_backward(const ConvShape& s, std::span<const double> input, std::span<const double> weight,
                      std::span<const double> doutput, std::span<double> dweight, std::span<double> dbias,
                      std::span<double> dinput) {
  const std::size_t hw = static_cast<std::size_t>(s.height) * s.width;
  const int kdim = s.in_channels * 9;
  std::fill(dweight.begin(), dweight.end(), 0.0);
  std::fill(dbias.begin(), dbias.end(), 0.0);

  // Bias and weight gradients sum over the batch in sample order.
  std::vector<double> col(static_cast<std::size_t>(kdim) * hw);
  for (int b = 0; b < s.batch; ++b) {
    const double* dout = doutput.data() + static_cast<std::size_t>(b) * s.filters * hw;
    for (int f = 0; f < s.filters; ++f) {
      const double* row = dout + f * hw;
      double acc = 0.0;
      for (std::size_t p = 0; p < hw; ++p) acc += row[p];
      dbias[f] += acc;
    }
    im2col3x3(input.data() + static_cast<std::size_t>(b) * s.in_channels * hw, s.in_channels, s.height, s.width,
              col.data());
    gemm_nt(s.filters, kdim, static_cast<int>(hw), dout, col.data(), dweight.data());
  }

  if (dinput.empty()) return;
#pragma omp parallel
  {
    std::vector<double> dcol(static_cast<std::size_t>(kdim) * hw);
#pragma omp for schedule(static)
    for (int b = 0; b < s.batch; ++b) {
      std::fill(dcol.begin(), dcol.end(), 0.0);
      gemm_tn(kdim, static_cast<int>(hw), s.filters, weight.data(),
              doutput.data() + static_cast<std::size_t>(b) * s.filters * hw, dcol.data());
      col2im3x3(dcol.data(), s.in_channels, s.height, s.width,
                dinput.data() + static_cast<std::size_t>(b) * s.in_channels * hw);
    }
  }
}

void maxpool2_forward(int planes, int height, int width, std::span<const double> input, std::span<double> output,
                      std::span<std::int32_t> argmax) {
  const int oh = height / 2, ow = width / 2;
#pragma omp parallel for schedule(static)
  for (int p = 0; p < planes; ++p) {
    const double* in = input.data() + static_cast<std::size_t>(p) * height * width;
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        int best = (2 * y) * width + 2 * x;
        for (int idx : {(2 * y) * width + 2 * x + 1, (2 * y + 1) * width + 2 * x, (2 * y + 1) * width + 2 * x + 1}) {
          if (in[idx] > in[best]) best = idx;
        }
        const std::size_t o = static_cast<std::size_t>(p) * oh * ow + static_cast<std::size_t>(y) * ow + x;
        output[o] = in[best];
        argmax[o] = best;
      }
    }
  }
}

void maxpool2_backward(int planes, int height, int width, std::span<const double> doutput,
                       std::span<const std::int32_t> argmax, std::span<double> dinput) {
  const int oh = height / 2, ow = width / 2;
  std::fill(dinput.begin(), dinput.end(), 0.0);
#pragma omp parallel for schedule(static)
  for (int p = 0; p < planes; ++p) {
    double* din = dinput.data() + static_cast<std::size_t>(p) * height * width;
    const std::size_t base = static_cast<std::size_t>(p) * oh * ow;
    for (std::size_t o = 0; o < static_cast<std::size_t>(oh) * ow; ++o) din[argmax[base + o]] += doutput[base + o];
  }
}

void dense_forward(int batch, int in_features, int out_features, std::span<const double> input,
                   std::span<const double> weight, std::span<const double> bias, std::span<double> output) {
  for (int b = 0; b < batch; ++b) {
    std::copy(bias.begin(), bias.end(), output.begin() + static_cast<std::ptrdiff_t>(b) * out_features);
  }
  gemm_nt(batch, out_features, in_features, input.data(), weight.data(), output.data());
}

void dense_backward(int batch, int in_features, int out_features, std::span<const double> input,
                    std::span<const double> weight, std::span<const double> doutput, std::span<double> dweight,
                    std::span<double> dbias, std::span<double> dinput) {
  std::fill(dweight.begin(), dweight.end(), 0.0);
  std::fill(dbias.begin(), dbias.end(), 0.0);
  for (int b = 0; b < batch; ++b) {
    for (int o = 0; o < out_features; ++o) dbias[o] += doutput[static_cast<std::size_t>(b) * out_features + o];
  }
  gemm_tn(out_features, in_features, batch, doutput.data(), input.data(), dweight.data());
  if (dinput.empty()) return;
  std::fill(dinput.begin(), dinput.end(), 0.0);
  gemm_nn(batch, in_features, out_features, doutput.data(), weight.data(), dinput.data());
}

void relu_inplace(std::span<double> x) {
#pragma omp simd
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(std::span<const double> activation, std::span<double> grad) {
#pragma omp simd
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = activation[i] > 0.0 ? grad[i] : 0.0;
}

}  // namespace assemai::kernels
