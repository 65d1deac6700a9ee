#include "lpsim/convolve.h"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstring>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "lpsim/error.h"

namespace lpsim {
namespace {

// FFTW's planner is not reentrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr long long kMaxTransformSamples = 1LL << 27;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

// r2c/c2r plan pair over fixed fftw_malloc'd buffers. Plans use
// FFTW_ESTIMATE, so the chosen algorithm (and therefore every output bit)
// depends only on the transform size.
class FftPair {
 public:
  FftPair(int nx, int ny)
      : nx_(nx),
        ny_(ny),
        real_(static_cast<double*>(
            fftw_malloc(sizeof(double) * static_cast<std::size_t>(nx) * ny))),
        spec_(static_cast<fftw_complex*>(fftw_malloc(
            sizeof(fftw_complex) * spectrum_size()))) {
    if (!real_ || !spec_) throw SizingError("FFT buffer allocation failed");
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_r2c_2d(ny, nx, real_.get(), spec_.get(),
                                    FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_2d(ny, nx, spec_.get(), real_.get(),
                                    FFTW_ESTIMATE);
  }

  ~FftPair() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }

  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;

  std::size_t real_size() const { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t spectrum_size() const {
    return static_cast<std::size_t>(ny_) * (nx_ / 2 + 1);
  }

  double* real() { return real_.get(); }
  fftw_complex* spectrum() { return spec_.get(); }

  void forward() { fftw_execute(forward_); }
  void inverse() { fftw_execute(inverse_); }

 private:
  int nx_;
  int ny_;
  FftwBuffer<double> real_;
  FftwBuffer<fftw_complex> spec_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

bool is_smooth(int n) {
  for (int p : {2, 3, 5, 7}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

}  // namespace

int next_fft_size(int min_size) {
  int n = std::max(1, min_size);
  while (!is_smooth(n)) ++n;
  return n;
}

Image fft_convolve(const Image& image, const Kernel& kernel) {
  const int width = image.width();
  const int height = image.height();
  const int s = kernel.size();
  const int r = kernel.radius();
  const long long padded_w = static_cast<long long>(width) + 2LL * r;
  const long long padded_h = static_cast<long long>(height) + 2LL * r;
  if (s > padded_w || s > padded_h) {
    throw SizingError("kernel of size " + std::to_string(s) +
                      " does not fit a padded frame of " +
                      std::to_string(padded_w) + "x" +
                      std::to_string(padded_h));
  }

  if (s == 1) {
    Image out = image;
    const double w = kernel.at(0, 0);
    for (double& v : out.data()) v *= w;
    return out;
  }

  const int nx = next_fft_size(static_cast<int>(padded_w));
  const int ny = next_fft_size(static_cast<int>(padded_h));
  if (static_cast<long long>(nx) * ny > kMaxTransformSamples) {
    throw SizingError("transform of " + std::to_string(nx) + "x" +
                      std::to_string(ny) + " exceeds the size limit");
  }

  FftPair fft(nx, ny);
  double* real = fft.real();
  fftw_complex* spec = fft.spectrum();

  std::fill_n(real, fft.real_size(), 0.0);
  for (int j = 0; j < s; ++j) {
    for (int i = 0; i < s; ++i) real[static_cast<std::size_t>(j) * nx + i] = kernel.at(i, j);
  }
  fft.forward();
  std::vector<std::complex<double>> kernel_spec(fft.spectrum_size());
  for (std::size_t k = 0; k < kernel_spec.size(); ++k) {
    kernel_spec[k] = {spec[k][0], spec[k][1]};
  }

  const bool non_negative =
      std::all_of(image.data().begin(), image.data().end(),
                  [](double v) { return v >= 0.0; });
  const double scale = 1.0 / (static_cast<double>(nx) * ny);

  Image out(width, height, image.channels());
  for (int c = 0; c < image.channels(); ++c) {
    std::fill_n(real, fft.real_size(), 0.0);
    auto in_plane = image.plane(c);
    for (int y = 0; y < height; ++y) {
      std::memcpy(real + static_cast<std::size_t>(y) * nx,
                  in_plane.data() + static_cast<std::size_t>(y) * width,
                  sizeof(double) * width);
    }
    fft.forward();
    for (std::size_t k = 0; k < kernel_spec.size(); ++k) {
      const std::complex<double> v =
          std::complex<double>(spec[k][0], spec[k][1]) * kernel_spec[k];
      spec[k][0] = v.real();
      spec[k][1] = v.imag();
    }
    fft.inverse();
    auto out_plane = out.plane(c);
    for (int y = 0; y < height; ++y) {
      const double* row = real + static_cast<std::size_t>(y + r) * nx + r;
      double* dst = out_plane.data() + static_cast<std::size_t>(y) * width;
      for (int x = 0; x < width; ++x) {
        double v = row[x] * scale;
        // Non-negative inputs convolve to non-negative outputs; anything
        // below zero is transform round-off.
        if (non_negative && v < 0.0) v = 0.0;
        dst[x] = v;
      }
    }
  }
  return out;
}

}  // namespace lpsim
