#pragma once

// Data-parallel inner loops. Every kernel here is OpenMP-parallel over
// independent outputs only: no cross-thread reductions, so results are
// bit-identical for any thread count. Naive serial counterparts live in
// assemai/reference.hpp and are used by the tests and the benchmark.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace assemai::kernels {

// ---------------------------------------------------------------------------
// Dense linear algebra. Row-major, all variants accumulate into C.

/// C[M,N] += A[M,K] * B[K,N]
void gemm_nn(int m, int n, int k, const double* a, const double* b, double* c);
/// C[M,N] += A[M,K] * B[N,K]^T
void gemm_nt(int m, int n, int k, const double* a, const double* b, double* c);
/// C[M,N] += A[K,M]^T * B[K,N]
void gemm_tn(int m, int n, int k, const double* a, const double* b, double* c);

// ---------------------------------------------------------------------------
// CNN layers. Activations are NCHW.

struct ConvShape {
  int batch, in_channels, height, width, filters;
};

/// 3x3 convolution, stride 1, zero padding 1. weight is [F, C, 3, 3].
void conv3x3_forward(const ConvShape& s, std::span<const double> input, std::span<const double> weight,
                     std::span<const double> bias, std::span<double> output);

/// Gradients for conv3x3_forward. dweight/dbias are overwritten; dinput is
/// overwritten when non-empty.
void conv3x3_backward(const ConvShape& s, std::span<const double> input, std::span<const double> weight,
                      std::span<const double> doutput, std::span<double> dweight, std::span<double> dbias,
                      std::span<double> dinput);

/// 2x2 max pooling, stride 2 (odd trailing row/column dropped). `argmax`
/// records the flat input index chosen for every output; ties go to the
/// first element in row-major order.
void maxpool2_forward(int planes, int height, int width, std::span<const double> input, std::span<double> output,
                      std::span<std::int32_t> argmax);
void maxpool2_backward(int planes, int height, int width, std::span<const double> doutput,
                       std::span<const std::int32_t> argmax, std::span<double> dinput);

/// out[B,O] = in[B,I] * W[O,I]^T + b
void dense_forward(int batch, int in_features, int out_features, std::span<const double> input,
                   std::span<const double> weight, std::span<const double> bias, std::span<double> output);
/// dweight/dbias overwritten; dinput overwritten when non-empty.
void dense_backward(int batch, int in_features, int out_features, std::span<const double> input,
                    std::span<const double> weight, std::span<const double> doutput, std::span<double> dweight,
                    std::span<double> dbias, std::span<double> dinput);

void relu_inplace(std::span<double> x);
/// grad[i] = 0 wherever activation[i] <= 0.
void relu_backward(std::span<const double> activation, std::span<double> grad);

// ---------------------------------------------------------------------------
// Image kernels

/// Mean SSIM over all valid window positions of two equally sized planes.
double ssim_mean(std::span<const double> a, std::span<const double> b, int width, int height, int window,
                 double c1, double c2);

/// Bilinear resize with half-pixel centres and clamped sampling positions.
void resize_plane(std::span<const double> in, int in_width, int in_height, std::span<double> out, int out_width,
                  int out_height);

/// Image prepared for repeated normalised cross-correlation: keeps its
/// spectrum and window-sum tables so each template costs one FFT product.
class NccImage {
 public:
  NccImage(std::span<const double> pixels, int width, int height);
  ~NccImage();
  NccImage(const NccImage&) = delete;
  NccImage& operator=(const NccImage&) = delete;

  /// NCC for every placement of the template: (H-h+1) x (W-w+1), row-major,
  /// clamped to [-1, 1]. Zero-variance windows and flat templates score 0.
  std::vector<double> surface(std::span<const double> templ, int t_width, int t_height) const;

 private:
  int width_;
  int height_;
  std::vector<long double> sum_;     // (H+1)x(W+1) integral image
  std::vector<long double> sum_sq_;  // integral of squares
  struct Spectrum;
  std::unique_ptr<Spectrum> spectrum_;
};

/// Variance floor per window pixel below which a window counts as flat.
inline constexpr double kNccFlatVariance = 1e-10;

}  // namespace assemai::kernels
