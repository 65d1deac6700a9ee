#ifndef LPSIM_IMAGE_H_
#define LPSIM_IMAGE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lpsim {

// Planar floating-point image. Samples are stored channel by channel, each
// channel row-major: index = c * width * height + y * width + x.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, double fill = 0.0);

  // Takes ownership of `data`; throws if the size is wrong or any sample is
  // not finite.
  static Image FromData(int width, int height, int channels,
                        std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }
  bool empty() const { return data_.empty(); }

  double& at(int x, int y, int c) {
    return data_[c * pixel_count() + static_cast<std::size_t>(y) * width_ + x];
  }
  double at(int x, int y, int c) const {
    return data_[c * pixel_count() + static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<double> plane(int c) {
    return {data_.data() + c * pixel_count(), pixel_count()};
  }
  std::span<const double> plane(int c) const {
    return {data_.data() + c * pixel_count(), pixel_count()};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  // Throws ParameterError if any sample is NaN or infinite.
  void check_finite() const;

  double sum() const;

  bool operator==(const Image& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

// Per-pixel boolean mask. For sky masks `true` means sky; for light masks
// `true` means emitter.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);

  // Single-channel images are thresholded directly; multi-channel images are
  // reduced to Rec.601 luminance first. Values >= threshold are true.
  static BinaryMask FromImage(const Image& image, double threshold = 0.5);

  int width() const { return width_; }
  int height() const { return height_; }

  bool at(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool value) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0;
  }

  std::size_t count() const;

  bool operator==(const BinaryMask& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Square, odd-sized, non-negative convolution kernel. Index (i, j) is
// column i, row j; the center is (size/2, size/2).
class Kernel {
 public:
  Kernel() = default;
  explicit Kernel(int size);

  // Validates odd size, length and non-negative finite weights.
  static Kernel FromWeights(int size, std::vector<double> weights);
  static Kernel Delta();

  int size() const { return size_; }
  int radius() const { return size_ / 2; }

  double& at(int i, int j) {
    return weights_[static_cast<std::size_t>(j) * size_ + i];
  }
  double at(int i, int j) const {
    return weights_[static_cast<std::size_t>(j) * size_ + i];
  }

  std::span<double> weights() { return weights_; }
  std::span<const double> weights() const { return weights_; }

  double sum() const;

  // Rescales to unit sum. Throws ParameterError when the sum is not positive.
  void normalize();

  bool operator==(const Kernel& other) const = default;

 private:
  int size_ = 0;
  std::vector<double> weights_;
};

// Rec.601 luma of pixel (x, y); for single-channel images the value itself.
double luminance(const Image& image, int x, int y);

// Single-channel luminance image.
Image luminance_image(const Image& image);

// Bilinear sample of kernel weights at continuous column u and row v.
// Positions outside [0, size-1]^2 return 0.
double sample_bilinear(const Kernel& kernel, double u, double v);

}  // namespace lpsim

#endif  // LPSIM_IMAGE_H_
