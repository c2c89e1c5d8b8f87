#include <algorithm>

#include "assemai/kernels.hpp"

namespace assemai::kernels {

namespace {

constexpr int kRowBlock = 4;
constexpr int kDepthBlock = 256;

// Fixed-order dot product with eight independent lanes so the compiler can
// vectorise it without reassociating.
inline double dot(const double* a, const double* b, int n) {
  double lanes[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    for (int l = 0; l < 8; ++l) lanes[l] += a[i + l] * b[i + l];
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((lanes[0] + lanes[4]) + (lanes[1] + lanes[5])) + ((lanes[2] + lanes[6]) + (lanes[3] + lanes[7])) + tail;
}

}  // namespace

void gemm_nn(int m, int n, int k, const double* a, const double* b, double* c) {
  const int row_blocks = (m + kRowBlock - 1) / kRowBlock;
#pragma omp parallel for schedule(static)
  for (int rb = 0; rb < row_blocks; ++rb) {
    const int i0 = rb * kRowBlock;
    const int i1 = std::min(m, i0 + kRowBlock);
    for (int k0 = 0; k0 < k; k0 += kDepthBlock) {
      const int k1 = std::min(k, k0 + kDepthBlock);
      if (i1 - i0 == kRowBlock) {
        double* c0 = c + static_cast<std::size_t>(i0) * n;
        double* c1 = c0 + n;
        double* c2 = c1 + n;
        double* c3 = c2 + n;
        for (int kk = k0; kk < k1; ++kk) {
          const double a0 = a[static_cast<std::size_t>(i0) * k + kk];
          const double a1 = a[static_cast<std::size_t>(i0 + 1) * k + kk];
          const double a2 = a[static_cast<std::size_t>(i0 + 2) * k + kk];
          const double a3 = a[static_cast<std::size_t>(i0 + 3) * k + kk];
          const double* brow = b + static_cast<std::size_t>(kk) * n;
#pragma omp simd
          for (int j = 0; j < n; ++j) {
            const double bv = brow[j];
            c0[j] += a0 * bv;
            c1[j] += a1 * bv;
            c2[j] += a2 * bv;
            c3[j] += a3 * bv;
          }
        }
      } else {
        for (int i = i0; i < i1; ++i) {
          double* crow = c + static_cast<std::size_t>(i) * n;
          for (int kk = k0; kk < k1; ++kk) {
            const double av = a[static_cast<std::size_t>(i) * k + kk];
            const double* brow = b + static_cast<std::size_t>(kk) * n;
#pragma omp simd
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
          }
        }
      }
    }
  }
}

void gemm_nt(int m, int n, int k, const double* a, const double* b, double* c) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<std::size_t>(i) * k;
    double* crow = c + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) crow[j] += dot(arow, b + static_cast<std::size_t>(j) * k, k);
  }
}

void gemm_tn(int m, int n, int k, const double* a, const double* b, double* c) {
  const int row_blocks = (m + kRowBlock - 1) / kRowBlock;
#pragma omp parallel for schedule(static)
  for (int rb = 0; rb < row_blocks; ++rb) {
    const int i0 = rb * kRowBlock;
    const int i1 = std::min(m, i0 + kRowBlock);
    for (int kk = 0; kk < k; ++kk) {
      const double* arow = a + static_cast<std::size_t>(kk) * m;
      const double* brow = b + static_cast<std::size_t>(kk) * n;
      for (int i = i0; i < i1; ++i) {
        const double av = arow[i];
        if (av == 0.0) continue;
        double* crow = c + static_cast<std::size_t>(i) * n;
#pragma omp simd
        for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
  }
}

}  // namespace assemai::kernels
