#include "lpsim/color.h"

#include <cmath>

namespace lpsim {

Rgb hsv_to_rgb(double hue_deg, double saturation, double value) {
  double h = std::fmod(hue_deg, 360.0);
  if (h < 0.0) h += 360.0;
  const double c = value * saturation;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  const double m = value - c;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  return {r + m, g + m, b + m};
}

Image decode_gamma(const Image& image, double gamma) {
  Image out = image;
  for (double& v : out.data()) {
    if (v > 0.0) v = std::pow(v, gamma);
  }
  return out;
}

Image encode_gamma(const Image& image, double gamma) {
  Image out = image;
  for (double& v : out.data()) {
    if (v > 0.0) v = std::pow(v, 1.0 / gamma);
  }
  return out;
}

}  // namespace lpsim
