#include "lpsim/metrics.h"

#include <cmath>
#include <string>

#include "lpsim/error.h"

namespace lpsim {
namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void require_same_shape(const Image& a, const Image& b) {
  if (!a.same_shape(b)) {
    throw DimensionMismatch(
        "images differ in shape: " + std::to_string(a.width()) + "x" +
        std::to_string(a.height()) + "x" + std::to_string(a.channels()) + " vs " +
        std::to_string(b.width()) + "x" + std::to_string(b.height()) + "x" +
        std::to_string(b.channels()));
  }
}

std::vector<double> gaussian_window() {
  std::vector<double> w(kSsimWindow);
  const int r = kSsimWindow / 2;
  double total = 0.0;
  for (int k = 0; k < kSsimWindow; ++k) {
    const double d = k - r;
    w[k] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
    total += w[k];
  }
  for (double& v : w) v /= total;
  return w;
}

// Separable Gaussian filter over fully contained windows only.
std::vector<double> filter_valid(const std::vector<double>& src, int width,
                                 int height, const std::vector<double>& w) {
  const int n = kSsimWindow;
  const int out_w = width - n + 1;
  const int out_h = height - n + 1;
  std::vector<double> rows(static_cast<std::size_t>(out_w) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += w[k] * src[static_cast<std::size_t>(y) * width + x + k];
      rows[static_cast<std::size_t>(y) * out_w + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(out_w) * out_h);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += w[k] * rows[static_cast<std::size_t>(y + k) * out_w + x];
      out[static_cast<std::size_t>(y) * out_w + x] = acc;
    }
  }
  return out;
}

}  // namespace

double psnr(const Image& a, const Image& b) {
  require_same_shape(a, b);
  if (a.empty()) throw SizingError("PSNR of empty images");
  CompensatedSum sq;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t k = 0; k < da.size(); ++k) {
    const double d = da[k] - db[k];
    sq.add(d * d);
  }
  const double mse = sq.value() / static_cast<double>(da.size());
  if (mse == 0.0) return kPsnrIdentical;
  return -10.0 * std::log10(mse);
}

double ssim(const Image& a, const Image& b) {
  require_same_shape(a, b);
  const int width = a.width();
  const int height = a.height();
  if (width < kSsimWindow || height < kSsimWindow) {
    throw SizingError("SSIM needs at least " + std::to_string(kSsimWindow) + "x" +
                      std::to_string(kSsimWindow) + " pixels, got " +
                      std::to_string(width) + "x" + std::to_string(height));
  }
  const Image la = luminance_image(a);
  const Image lb = luminance_image(b);
  const std::size_t n = la.pixel_count();
  std::vector<double> xa(n), xb(n), aa(n), bb(n), ab(n);
  for (std::size_t k = 0; k < n; ++k) {
    xa[k] = la.data()[k];
    xb[k] = lb.data()[k];
    aa[k] = xa[k] * xa[k];
    bb[k] = xb[k] * xb[k];
    ab[k] = xa[k] * xb[k];
  }
  const auto w = gaussian_window();
  const auto mu_a = filter_valid(xa, width, height, w);
  const auto mu_b = filter_valid(xb, width, height, w);
  const auto e_aa = filter_valid(aa, width, height, w);
  const auto e_bb = filter_valid(bb, width, height, w);
  const auto e_ab = filter_valid(ab, width, height, w);

  const double c1 = (kSsimK1 * 1.0) * (kSsimK1 * 1.0);
  const double c2 = (kSsimK2 * 1.0) * (kSsimK2 * 1.0);
  CompensatedSum total;
  for (std::size_t k = 0; k < mu_a.size(); ++k) {
    const double ma2 = mu_a[k] * mu_a[k];
    const double mb2 = mu_b[k] * mu_b[k];
    const double mab = mu_a[k] * mu_b[k];
    const double var_a = e_aa[k] - ma2;
    const double var_b = e_bb[k] - mb2;
    const double cov = e_ab[k] - mab;
    total.add(((2.0 * mab + c1) * (2.0 * cov + c2)) /
              ((ma2 + mb2 + c1) * (var_a + var_b + c2)));
  }
  return total.value() / static_cast<double>(mu_a.size());
}

void MetricReport::add(double psnr_value, double ssim_value) {
  psnr_db.push_back(psnr_value);
  ssim.push_back(ssim_value);
}

double MetricReport::mean_psnr_db() const {
  if (psnr_db.empty()) return std::nan("");
  double total = 0.0;
  for (double v : psnr_db) total += v;
  return total / static_cast<double>(psnr_db.size());
}

double MetricReport::mean_ssim() const {
  if (ssim.empty()) return std::nan("");
  double total = 0.0;
  for (double v : ssim) total += v;
  return total / static_cast<double>(ssim.size());
}

}  // namespace lpsim
