#ifndef LPSIM_SKYGLOW_H_
#define LPSIM_SKYGLOW_H_

#include <array>
#include <vector>

#include "lpsim/color.h"
#include "lpsim/image.h"
#include "lpsim/rng.h"

namespace lpsim {

// Lowest sky row per column (rows grow downward); kNoSky where the column
// has no sky pixel.
struct SkylineProfile {
  static constexpr int kNoSky = -1;
  std::vector<int> rows;

  bool has_sky() const;
};

SkylineProfile extract_skyline(const BinaryMask& sky_mask);

enum class LightShape { kEllipse, kRectangle };

// Area light hidden below the skyline. Pixel (x, y) is covered when its
// center lies inside the shape centered at (center_x, center_y).
struct HiddenLight {
  LightShape shape = LightShape::kRectangle;
  double center_x = 0.0;
  double center_y = 0.0;
  double half_width = 1.0;
  double half_height = 1.0;
  Rgb color{1.0, 1.0, 1.0};
  double intensity = 1.0;

  bool covers(int x, int y) const;

  bool operator==(const HiddenLight&) const = default;
};

struct SkyGlowRanges {
  int min_lights = 1;
  int max_lights = 4;
  double max_drop = 15.0;  // pixels between skyline and a light's top edge
  double half_width_lo = 0.05, half_width_hi = 0.25;    // x image width
  double half_height_lo = 0.01, half_height_hi = 0.05;  // x image height
  double intensity_lo = 0.3, intensity_hi = 1.0;
  double saturation_lo = 0.7, saturation_hi = 1.0;
  double hue_jitter = 0.2;  // hue = base * U(1 - j, 1 + j)
  int max_attempts = 64;

  bool operator==(const SkyGlowRanges&) const = default;
};

// Base hues of the urban palette: sodium orange, amber, cool white-blue,
// magenta neon, green neon.
inline constexpr std::array<double, 5> kPaletteHues{30.0, 45.0, 200.0, 300.0,
                                                    120.0};

// Places up to N ~ U{min_lights..max_lights} lights whose top edge sits
// 0..max_drop pixels below the local skyline. Candidates that touch sky
// pixels, rise above the skyline in any covered column, overlap an earlier
// light or cover no pixel are redrawn, at most max_attempts times per light.
std::vector<HiddenLight> place_hidden_lights(
    const SkylineProfile& profile, const BinaryMask& sky_mask, Rng& rng,
    const SkyGlowRanges& ranges = SkyGlowRanges{});

// Emission map: intensity * color inside each shape. Single-channel output
// uses the color's luminance.
Image rasterize_hidden_lights(const std::vector<HiddenLight>& lights,
                              int width, int height, int channels);

// Emission map convolved with the glow kernel, full frame.
Image render_sky_glow(const std::vector<HiddenLight>& lights,
                      const Kernel& glow_kernel, int width, int height,
                      int channels = 3);

}  // namespace lpsim

#endif  // LPSIM_SKYGLOW_H_
