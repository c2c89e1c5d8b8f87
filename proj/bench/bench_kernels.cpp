// OpenMP kernels against the serial reference on model-sized inputs.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "assemai/kernels.hpp"
#include "assemai/reference.hpp"
#include "assemai/rng.hpp"

using namespace assemai;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// Batch of 32 images, 1 channel, side from the argument, 32 filters.
struct ConvCase {
  explicit ConvCase(int side)
      : s{32, 1, side, side, 32},
        in(random_values(std::size_t(s.batch) * s.in_channels * side * side, 1)),
        w(random_values(std::size_t(s.filters) * s.in_channels * 9, 2)),
        b(random_values(s.filters, 3)),
        out(std::size_t(s.batch) * s.filters * side * side) {}
  kernels::ConvShape s;
  std::vector<double> in, w, b, out;
};

void BM_ConvForward_Kernel(benchmark::State& st) {
  ConvCase c(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    kernels::conv3x3_forward(c.s, c.in, c.w, c.b, c.out);
    benchmark::DoNotOptimize(c.out.data());
  }
}

void BM_ConvForward_Reference(benchmark::State& st) {
  ConvCase c(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    reference::conv3x3_forward(c.s.batch, c.s.in_channels, c.s.height, c.s.width, c.s.filters, c.in, c.w, c.b, c.out);
    benchmark::DoNotOptimize(c.out.data());
  }
}

struct DenseCase {
  DenseCase(int batch, int in_f, int out_f)
      : batch(batch), in_f(in_f), out_f(out_f),
        x(random_values(std::size_t(batch) * in_f, 4)),
        w(random_values(std::size_t(out_f) * in_f, 5)),
        b(random_values(out_f, 6)),
        y(std::size_t(batch) * out_f) {}
  int batch, in_f, out_f;
  std::vector<double> x, w, b, y;
};

void BM_Dense_Kernel(benchmark::State& st) {
  DenseCase c(32, static_cast<int>(st.range(0)), 128);
  for (auto _ : st) {
    kernels::dense_forward(c.batch, c.in_f, c.out_f, c.x, c.w, c.b, c.y);
    benchmark::DoNotOptimize(c.y.data());
  }
}

void BM_Dense_Reference(benchmark::State& st) {
  DenseCase c(32, static_cast<int>(st.range(0)), 128);
  for (auto _ : st) {
    reference::dense_forward(c.batch, c.in_f, c.out_f, c.x, c.w, c.b, c.y);
    benchmark::DoNotOptimize(c.y.data());
  }
}

void BM_Maxpool_Kernel(benchmark::State& st) {
  const int side = static_cast<int>(st.range(0)), planes = 32 * 32;
  const auto in = random_values(std::size_t(planes) * side * side, 7);
  std::vector<double> out(std::size_t(planes) * (side / 2) * (side / 2));
  std::vector<std::int32_t> arg(out.size());
  for (auto _ : st) {
    kernels::maxpool2_forward(planes, side, side, in, out, arg);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Maxpool_Reference(benchmark::State& st) {
  const int side = static_cast<int>(st.range(0)), planes = 32 * 32;
  const auto in = random_values(std::size_t(planes) * side * side, 7);
  std::vector<double> out(std::size_t(planes) * (side / 2) * (side / 2));
  for (auto _ : st) {
    reference::maxpool2_forward(planes, side, side, in, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Ssim_Kernel(benchmark::State& st) {
  const int side = static_cast<int>(st.range(0));
  const auto a = random_values(std::size_t(side) * side, 8), b = random_values(std::size_t(side) * side, 9);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::ssim_mean(a, b, side, side, 7, 1e-4, 9e-4));
}

void BM_Ssim_Reference(benchmark::State& st) {
  const int side = static_cast<int>(st.range(0));
  const auto a = random_values(std::size_t(side) * side, 8), b = random_values(std::size_t(side) * side, 9);
  for (auto _ : st) benchmark::DoNotOptimize(reference::ssim(a, b, side, side, 7, 1e-4, 9e-4));
}

void BM_Resize_Kernel(benchmark::State& st) {
  const int side = static_cast<int>(st.range(0));
  const auto in = random_values(std::size_t(side) * side, 10);
  std::vector<double> out(64 * 64);
  for (auto _ : st) {
    kernels::resize_plane(in, side, side, out, 64, 64);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Resize_Reference(benchmark::State& st) {
  const int side = static_cast<int>(st.range(0));
  const auto in = random_values(std::size_t(side) * side, 10);
  for (auto _ : st) benchmark::DoNotOptimize(reference::resize_bilinear(in, side, side, 64, 64));
}

// Template matching: FFT-backed surface against the direct sum.
void BM_Ncc_Kernel(benchmark::State& st) {
  const int side = static_cast<int>(st.range(0)), t = side / 4;
  const auto img = random_values(std::size_t(side) * side, 11), templ = random_values(std::size_t(t) * t, 12);
  for (auto _ : st) {
    const kernels::NccImage ncc(img, side, side);
    benchmark::DoNotOptimize(ncc.surface(templ, t, t));
  }
}

void BM_Ncc_Reference(benchmark::State& st) {
  const int side = static_cast<int>(st.range(0)), t = side / 4;
  const auto img = random_values(std::size_t(side) * side, 11), templ = random_values(std::size_t(t) * t, 12);
  for (auto _ : st) benchmark::DoNotOptimize(reference::ncc_surface(img, side, side, templ, t, t));
}

}  // namespace

BENCHMARK(BM_ConvForward_Kernel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvForward_Reference)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dense_Kernel)->Arg(2048)->Arg(16384)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dense_Reference)->Arg(2048)->Arg(16384)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Maxpool_Kernel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Maxpool_Reference)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ssim_Kernel)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ssim_Reference)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Resize_Kernel)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Resize_Reference)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Ncc_Kernel)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ncc_Reference)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
