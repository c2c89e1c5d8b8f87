#pragma once

// Serial brute-force implementations. They share no code with the kernels
// in assemai/kernels.hpp and exist to check and benchmark them.

#include <cstdint>
#include <span>
#include <vector>

namespace assemai::reference {

/// Direct 3x3 / pad 1 convolution, NCHW.
void conv3x3_forward(int batch, int channels, int height, int width, int filters, std::span<const double> input,
                     std::span<const double> weight, std::span<const double> bias, std::span<double> output);

/// out[B,O] = in[B,I] * W[O,I]^T + b, triple loop.
void dense_forward(int batch, int in_features, int out_features, std::span<const double> input,
                   std::span<const double> weight, std::span<const double> bias, std::span<double> output);

void maxpool2_forward(int planes, int height, int width, std::span<const double> input, std::span<double> output);

/// Per-window two-pass mean/variance/covariance, uniform window, population statistics.
double ssim(std::span<const double> a, std::span<const double> b, int width, int height, int window, double c1,
            double c2);

/// Bilinear resize evaluated as a full tent-filter sum over every input pixel.
std::vector<double> resize_bilinear(std::span<const double> in, int in_width, int in_height, int out_width,
                                    int out_height);

/// Direct zero-mean NCC at every placement (two passes per window).
std::vector<double> ncc_surface(std::span<const double> image, int width, int height, std::span<const double> templ,
                                int t_width, int t_height);

}  // namespace assemai::reference
