#ifndef LPSIM_COLOR_H_
#define LPSIM_COLOR_H_

#include <array>

#include "lpsim/image.h"

namespace lpsim {

using Rgb = std::array<double, 3>;

// Hexcone HSV to RGB. Hue in degrees (wrapped into [0, 360)), saturation
// and value in [0, 1].
Rgb hsv_to_rgb(double hue_deg, double saturation, double value);

inline constexpr double kDisplayGamma = 2.2;

// Element-wise x^2.2 and x^(1/2.2); negative samples pass through unchanged.
Image decode_gamma(const Image& image, double gamma = kDisplayGamma);
Image encode_gamma(const Image& image, double gamma = kDisplayGamma);

}  // namespace lpsim

#endif  // LPSIM_COLOR_H_
