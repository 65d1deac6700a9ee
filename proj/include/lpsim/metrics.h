#ifndef LPSIM_METRICS_H_
#define LPSIM_METRICS_H_

#include <limits>
#include <vector>

#include "lpsim/image.h"

namespace lpsim {

// PSNR of identical images.
inline constexpr double kPsnrIdentical =
    std::numeric_limits<double>::infinity();

// -10 log10(MSE) for unit peak, MSE over every pixel and channel.
double psnr(const Image& a, const Image& b);

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

// Mean SSIM over all fully contained 11x11 Gaussian windows (sigma 1.5) of
// the Rec.601 luminance, dynamic range 1.
double ssim(const Image& a, const Image& b);

struct MetricReport {
  std::vector<double> psnr_db;
  std::vector<double> ssim;

  void add(double psnr_value, double ssim_value);
  std::size_t count() const { return ssim.size(); }
  // Arithmetic means in insertion order; +inf if any PSNR is infinite,
  // NaN when empty.
  double mean_psnr_db() const;
  double mean_ssim() const;
};

}  // namespace lpsim

#endif  // LPSIM_METRICS_H_
