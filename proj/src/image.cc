#include "lpsim/image.h"

#include <cmath>
#include <string>

#include "lpsim/error.h"

namespace lpsim {

Image::Image(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 0 || height < 0) {
    throw ParameterError("dims", "negative image dimension");
  }
  if (channels != 1 && channels != 3) {
    throw ParameterError("channels", "must be 1 or 3, got " +
                                         std::to_string(channels));
  }
  if (!std::isfinite(fill)) throw ParameterError("fill", "not finite");
  data_.assign(pixel_count() * channels, fill);
}

Image Image::FromData(int width, int height, int channels,
                      std::vector<double> data) {
  Image image(width, height, channels);
  if (data.size() != image.data_.size()) {
    throw DimensionMismatch("image data has " + std::to_string(data.size()) +
                            " samples, expected " +
                            std::to_string(image.data_.size()));
  }
  image.data_ = std::move(data);
  image.check_finite();
  return image;
}

void Image::check_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) throw ParameterError("image", "non-finite sample");
  }
}

double Image::sum() const {
  double total = 0.0;
  for (double v : data_) total += v;
  return total;
}

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw ParameterError("dims", "negative mask dimension");
  }
  bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

BinaryMask BinaryMask::FromImage(const Image& image, double threshold) {
  BinaryMask mask(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      mask.set(x, y, luminance(image, x, y) >= threshold);
    }
  }
  return mask;
}

std::size_t BinaryMask::count() const {
  std::size_t n = 0;
  for (auto b : bits_) n += b;
  return n;
}

Kernel::Kernel(int size) : size_(size) {
  if (size < 1 || size % 2 == 0) {
    throw ParameterError("size", "kernel size must be odd and positive, got " +
                                     std::to_string(size));
  }
  weights_.assign(static_cast<std::size_t>(size) * size, 0.0);
}

Kernel Kernel::FromWeights(int size, std::vector<double> weights) {
  Kernel kernel(size);
  if (weights.size() != kernel.weights_.size()) {
    throw DimensionMismatch("kernel weights have wrong length");
  }
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ParameterError("weights", "kernel weights must be finite and >= 0");
    }
  }
  kernel.weights_ = std::move(weights);
  return kernel;
}

Kernel Kernel::Delta() {
  Kernel k(1);
  k.at(0, 0) = 1.0;
  return k;
}

double Kernel::sum() const {
  double total = 0.0;
  for (double w : weights_) total += w;
  return total;
}

void Kernel::normalize() {
  const double total = sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw ParameterError("kernel", "cannot normalize a kernel with sum " +
                                       std::to_string(total));
  }
  for (double& w : weights_) w /= total;
}

double luminance(const Image& image, int x, int y) {
  if (image.channels() == 1) return image.at(x, y, 0);
  return 0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) +
         0.114 * image.at(x, y, 2);
}

Image luminance_image(const Image& image) {
  Image out(image.width(), image.height(), 1);
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) out.at(x, y, 0) = luminance(image, x, y);
  }
  return out;
}

double sample_bilinear(const Kernel& kernel, double u, double v) {
  const double last = kernel.size() - 1;
  if (!(u >= 0.0 && u <= last && v >= 0.0 && v <= last)) return 0.0;
  const int i0 = static_cast<int>(std::floor(u));
  const int j0 = static_cast<int>(std::floor(v));
  const double fu = u - i0;
  const double fv = v - j0;
  const int i1 = std::min(i0 + 1, kernel.size() - 1);
  const int j1 = std::min(j0 + 1, kernel.size() - 1);
  // At exact nodes the fractional weights are zero, so the result is the
  // stored weight bit for bit.
  const double top = (1.0 - fu) * kernel.at(i0, j0) + fu * kernel.at(i1, j0);
  const double bottom = (1.0 - fu) * kernel.at(i0, j1) + fu * kernel.at(i1, j1);
  return (1.0 - fv) * top + fv * bottom;
}

}  // namespace lpsim
