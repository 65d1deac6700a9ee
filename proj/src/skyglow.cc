#include "lpsim/skyglow.h"

#include <algorithm>
#include <cmath>

#include "lpsim/convolve.h"
#include "lpsim/error.h"

namespace lpsim {
namespace {

struct Bounds {
  int x0, x1, y0, y1;  // inclusive, clipped to the frame
};

Bounds footprint_bounds(const HiddenLight& light, int width, int height) {
  return {std::max(0, static_cast<int>(std::ceil(light.center_x - light.half_width))),
          std::min(width - 1, static_cast<int>(std::floor(light.center_x + light.half_width))),
          std::max(0, static_cast<int>(std::ceil(light.center_y - light.half_height))),
          std::min(height - 1, static_cast<int>(std::floor(light.center_y + light.half_height)))};
}

}  // namespace

bool SkylineProfile::has_sky() const {
  return std::any_of(rows.begin(), rows.end(), [](int r) { return r != kNoSky; });
}

SkylineProfile extract_skyline(const BinaryMask& sky_mask) {
  SkylineProfile profile;
  profile.rows.assign(sky_mask.width(), SkylineProfile::kNoSky);
  for (int x = 0; x < sky_mask.width(); ++x) {
    for (int y = sky_mask.height() - 1; y >= 0; --y) {
      if (sky_mask.at(x, y)) {
        profile.rows[x] = y;
        break;
      }
    }
  }
  return profile;
}

bool HiddenLight::covers(int x, int y) const {
  const double ox = x - center_x;
  const double oy = y - center_y;
  if (shape == LightShape::kRectangle) {
    return std::fabs(ox) <= half_width && std::fabs(oy) <= half_height;
  }
  const double u = ox / half_width;
  const double v = oy / half_height;
  return u * u + v * v <= 1.0;
}

std::vector<HiddenLight> place_hidden_lights(const SkylineProfile& profile,
                                             const BinaryMask& sky_mask,
                                             Rng& rng,
                                             const SkyGlowRanges& ranges) {
  const int width = sky_mask.width();
  const int height = sky_mask.height();
  if (static_cast<int>(profile.rows.size()) != width) {
    throw DimensionMismatch("skyline profile does not match the sky mask");
  }
  // Columns with sky above at least one ground row.
  std::vector<int> columns;
  for (int x = 0; x < width; ++x) {
    const int row = profile.rows[x];
    if (row != SkylineProfile::kNoSky && row < height - 1) columns.push_back(x);
  }
  std::vector<HiddenLight> lights;
  if (columns.empty()) return lights;

  std::vector<std::uint8_t> occupied(static_cast<std::size_t>(width) * height, 0);
  const int wanted = rng.uniform_int(ranges.min_lights, ranges.max_lights);
  for (int n = 0; n < wanted; ++n) {
    for (int attempt = 0; attempt < ranges.max_attempts; ++attempt) {
      const int column =
          columns[rng.uniform_int(0, static_cast<int>(columns.size()) - 1)];
      HiddenLight light;
      light.half_width = rng.uniform(ranges.half_width_lo, ranges.half_width_hi) * width;
      light.half_height =
          rng.uniform(ranges.half_height_lo, ranges.half_height_hi) * height;
      light.shape = rng.uniform_int(0, 1) == 0 ? LightShape::kEllipse
                                               : LightShape::kRectangle;
      const double drop = rng.uniform(0.0, ranges.max_drop);
      const double top = profile.rows[column] + 1 + drop;
      light.center_x = column;
      light.center_y = top + light.half_height;
      const double base = kPaletteHues[rng.uniform_int(0, 4)];
      const double hue =
          base * rng.uniform(1.0 - ranges.hue_jitter, 1.0 + ranges.hue_jitter);
      const double saturation = rng.uniform(ranges.saturation_lo, ranges.saturation_hi);
      light.color = hsv_to_rgb(hue, saturation, 1.0);
      light.intensity = rng.uniform(ranges.intensity_lo, ranges.intensity_hi);

      const Bounds b = footprint_bounds(light, width, height);
      bool ok = true;
      std::size_t covered = 0;
      for (int y = b.y0; ok && y <= b.y1; ++y) {
        for (int x = b.x0; x <= b.x1; ++x) {
          if (!light.covers(x, y)) continue;
          const int sky_row = profile.rows[x];
          if (sky_mask.at(x, y) ||
              (sky_row != SkylineProfile::kNoSky && y <= sky_row) ||
              occupied[static_cast<std::size_t>(y) * width + x]) {
            ok = false;
            break;
          }
          ++covered;
        }
      }
      if (!ok || covered == 0) continue;
      for (int y = b.y0; y <= b.y1; ++y) {
        for (int x = b.x0; x <= b.x1; ++x) {
          if (light.covers(x, y)) occupied[static_cast<std::size_t>(y) * width + x] = 1;
        }
      }
      lights.push_back(light);
      break;
    }
  }
  return lights;
}

Image rasterize_hidden_lights(const std::vector<HiddenLight>& lights, int width,
                              int height, int channels) {
  Image emission(width, height, channels);
  for (const auto& light : lights) {
    if (!(light.half_width > 0.0 && light.half_height > 0.0)) {
      throw ParameterError("half_extents", "hidden light extents must be positive");
    }
    const Bounds b = footprint_bounds(light, width, height);
    const Rgb& col = light.color;
    for (int y = b.y0; y <= b.y1; ++y) {
      for (int x = b.x0; x <= b.x1; ++x) {
        if (!light.covers(x, y)) continue;
        if (channels == 1) {
          emission.at(x, y, 0) +=
              light.intensity * (0.299 * col[0] + 0.587 * col[1] + 0.114 * col[2]);
        } else {
          for (int c = 0; c < 3; ++c) emission.at(x, y, c) += light.intensity * col[c];
        }
      }
    }
  }
  return emission;
}

Image render_sky_glow(const std::vector<HiddenLight>& lights,
                      const Kernel& glow_kernel, int width, int height,
                      int channels) {
  return fft_convolve(rasterize_hidden_lights(lights, width, height, channels),
                      glow_kernel);
}

}  // namespace lpsim
