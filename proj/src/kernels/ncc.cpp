#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>

#include "assemai/kernels.hpp"

namespace assemai::kernels {

namespace {

// The FFTW planner is not re-entrant; executing a finished plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* ptr;
};

}  // namespace

struct NccImage::Spectrum {
  int height;
  int width;
  int complex_width;
  std::vector<std::complex<double>> image_fft;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  Spectrum(int h, int w) : height(h), width(w), complex_width(w / 2 + 1) {
    FftwBuffer real(sizeof(double) * static_cast<std::size_t>(h) * w);
    FftwBuffer cplx(sizeof(fftw_complex) * static_cast<std::size_t>(h) * complex_width);
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_r2c_2d(h, w, static_cast<double*>(real.ptr), static_cast<fftw_complex*>(cplx.ptr),
                                   FFTW_ESTIMATE);
    inverse = fftw_plan_dft_c2r_2d(h, w, static_cast<fftw_complex*>(cplx.ptr), static_cast<double*>(real.ptr),
                                   FFTW_ESTIMATE);
  }
  ~Spectrum() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(inverse);
  }

  std::vector<std::complex<double>> transform(const std::vector<double>& real_in) const {
    FftwBuffer real(sizeof(double) * real_in.size());
    FftwBuffer cplx(sizeof(fftw_complex) * static_cast<std::size_t>(height) * complex_width);
    std::copy(real_in.begin(), real_in.end(), static_cast<double*>(real.ptr));
    fftw_execute_dft_r2c(forward, static_cast<double*>(real.ptr), static_cast<fftw_complex*>(cplx.ptr));
    const auto* c = reinterpret_cast<const std::complex<double>*>(cplx.ptr);
    return {c, c + static_cast<std::size_t>(height) * complex_width};
  }

  std::vector<double> inverse_transform(const std::vector<std::complex<double>>& spec) const {
    FftwBuffer real(sizeof(double) * static_cast<std::size_t>(height) * width);
    FftwBuffer cplx(sizeof(fftw_complex) * spec.size());
    std::copy(spec.begin(), spec.end(), static_cast<std::complex<double>*>(cplx.ptr));
    fftw_execute_dft_c2r(inverse, static_cast<fftw_complex*>(cplx.ptr), static_cast<double*>(real.ptr));
    const auto* r = static_cast<const double*>(real.ptr);
    return {r, r + static_cast<std::size_t>(height) * width};
  }
};

NccImage::NccImage(std::span<const double> pixels, int width, int height)
    : width_(width), height_(height), spectrum_(std::make_unique<Spectrum>(height, width)) {
  const std::size_t stride = static_cast<std::size_t>(width) + 1;
  sum_.assign(stride * (height + 1), 0.0L);
  sum_sq_.assign(stride * (height + 1), 0.0L);
  for (int y = 0; y < height; ++y) {
    long double row = 0.0L, row_sq = 0.0L;
    for (int x = 0; x < width; ++x) {
      const long double v = pixels[static_cast<std::size_t>(y) * width + x];
      row += v;
      row_sq += v * v;
      sum_[(y + 1) * stride + x + 1] = sum_[y * stride + x + 1] + row;
      sum_sq_[(y + 1) * stride + x + 1] = sum_sq_[y * stride + x + 1] + row_sq;
    }
  }
  spectrum_->image_fft = spectrum_->transform(std::vector<double>(pixels.begin(), pixels.end()));
}

NccImage::~NccImage() = default;

std::vector<double> NccImage::surface(std::span<const double> templ, int t_width, int t_height) const {
  const int pw = width_ - t_width + 1;
  const int ph = height_ - t_height + 1;
  std::vector<double> out(static_cast<std::size_t>(pw) * ph, 0.0);
  const double n = static_cast<double>(t_width) * t_height;

  double mean = 0.0;
  for (double v : templ) mean += v;
  mean /= n;
  double norm_sq = 0.0;
  for (double v : templ) norm_sq += (v - mean) * (v - mean);
  if (norm_sq <= kNccFlatVariance * n) return out;
  const double t_norm = std::sqrt(norm_sq);

  // Zero-mean template on an image-sized canvas; circular correlation equals
  // linear correlation at every valid placement because nothing wraps there.
  std::vector<double> canvas(static_cast<std::size_t>(width_) * height_, 0.0);
  for (int y = 0; y < t_height; ++y)
    for (int x = 0; x < t_width; ++x)
      canvas[static_cast<std::size_t>(y) * width_ + x] = templ[static_cast<std::size_t>(y) * t_width + x] - mean;
  auto tf = spectrum_->transform(canvas);
  for (std::size_t i = 0; i < tf.size(); ++i) tf[i] = spectrum_->image_fft[i] * std::conj(tf[i]);
  const std::vector<double> corr = spectrum_->inverse_transform(tf);
  const double fft_scale = 1.0 / (static_cast<double>(width_) * height_);

  const std::size_t stride = static_cast<std::size_t>(width_) + 1;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < ph; ++y) {
    for (int x = 0; x < pw; ++x) {
      auto window = [&](const std::vector<long double>& s) {
        return s[(y + t_height) * stride + x + t_width] - s[y * stride + x + t_width] -
               s[(y + t_height) * stride + x] + s[y * stride + x];
      };
      const long double s1 = window(sum_);
      const long double s2 = window(sum_sq_);
      const double var = static_cast<double>(s2 - s1 * s1 / n);
      if (var <= kNccFlatVariance * n) continue;
      const double cross = corr[static_cast<std::size_t>(y) * width_ + x] * fft_scale;
      out[static_cast<std::size_t>(y) * pw + x] = std::clamp(cross / (t_norm * std::sqrt(var)), -1.0, 1.0);
    }
  }
  return out;
}

}  // namespace assemai::kernels
