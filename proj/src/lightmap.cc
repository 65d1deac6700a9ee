#include "lpsim/lightmap.h"

#include <algorithm>
#include <string>

#include "lpsim/convolve.h"
#include "lpsim/error.h"

namespace lpsim {

LightSourceMap extract_lights_threshold(const Image& image, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw ParameterError("tau", "threshold must lie in (0, 1), got " +
                                    std::to_string(tau));
  }
  LightSourceMap map;
  map.provenance = LightProvenance::kThresholdFallback;
  map.intensity = Image(image.width(), image.height(), image.channels());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (luminance(image, x, y) < tau) continue;
      for (int c = 0; c < image.channels(); ++c) {
        map.intensity.at(x, y, c) = image.at(x, y, c);
      }
    }
  }
  return map;
}

BinaryMask binarize_lights(const LightSourceMap& map, double threshold) {
  const Image& img = map.intensity;
  BinaryMask mask(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double peak = img.at(x, y, 0);
      for (int c = 1; c < img.channels(); ++c) peak = std::max(peak, img.at(x, y, c));
      mask.set(x, y, peak > threshold);
    }
  }
  return mask;
}

ComponentMap connected_components(const BinaryMask& mask, int min_area) {
  if (min_area < 1) throw ParameterError("min_area", "must be >= 1");
  const int w = mask.width();
  const int h = mask.height();
  ComponentMap out;
  out.width = w;
  out.height = h;
  out.labels.assign(static_cast<std::size_t>(w) * h, 0);

  // Flood fill with an explicit stack; provisional labels follow raster
  // order of each component's first pixel.
  std::vector<std::int64_t> provisional_areas;
  std::vector<std::int32_t> stack;
  std::int32_t next = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t start = static_cast<std::size_t>(y) * w + x;
      if (!mask.at(x, y) || out.labels[start] != 0) continue;
      const std::int32_t label = ++next;
      std::int64_t area = 0;
      out.labels[start] = label;
      stack.push_back(static_cast<std::int32_t>(start));
      while (!stack.empty()) {
        const std::int32_t p = stack.back();
        stack.pop_back();
        ++area;
        const int px = p % w;
        const int py = p / w;
        for (int ny = std::max(py - 1, 0); ny <= std::min(py + 1, h - 1); ++ny) {
          for (int nx = std::max(px - 1, 0); nx <= std::min(px + 1, w - 1); ++nx) {
            const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
            if (mask.at(nx, ny) && out.labels[q] == 0) {
              out.labels[q] = label;
              stack.push_back(static_cast<std::int32_t>(q));
            }
          }
        }
      }
      provisional_areas.push_back(area);
    }
  }

  std::vector<std::int32_t> remap(provisional_areas.size() + 1, 0);
  for (std::size_t k = 0; k < provisional_areas.size(); ++k) {
    if (provisional_areas[k] >= min_area) {
      remap[k + 1] = ++out.count;
      out.areas.push_back(provisional_areas[k]);
    }
  }
  for (auto& label : out.labels) label = remap[label];
  return out;
}

std::vector<KernelFamily> assign_kernel_types(const ComponentMap& components,
                                              Rng& rng) {
  std::vector<KernelFamily> assignment;
  assignment.reserve(components.count);
  for (int k = 0; k < components.count; ++k) {
    assignment.push_back(static_cast<KernelFamily>(rng.uniform_int(0, 2)));
  }
  return assignment;
}

Image render_alsf_layer(const LightSourceMap& map,
                        const ComponentMap& components,
                        std::span<const KernelFamily> assignment,
                        const std::array<Kernel, 3>& kernels) {
  const Image& intensity = map.intensity;
  if (components.width != intensity.width() ||
      components.height != intensity.height()) {
    throw DimensionMismatch("component map does not match the light map");
  }
  if (static_cast<int>(assignment.size()) != components.count) {
    throw DimensionMismatch("assignment has " + std::to_string(assignment.size()) +
                            " entries for " + std::to_string(components.count) +
                            " components");
  }

  Image layer(intensity.width(), intensity.height(), intensity.channels());
  for (int type = 0; type < 3; ++type) {
    Image grouped(intensity.width(), intensity.height(), intensity.channels());
    bool any = false;
    for (int y = 0; y < intensity.height(); ++y) {
      for (int x = 0; x < intensity.width(); ++x) {
        const std::int32_t label = components.label(x, y);
        if (label == 0 || static_cast<int>(assignment[label - 1]) != type) continue;
        for (int c = 0; c < intensity.channels(); ++c) {
          grouped.at(x, y, c) = intensity.at(x, y, c);
        }
        any = true;
      }
    }
    if (!any) continue;
    const Image glow = fft_convolve(grouped, kernels[type]);
    auto dst = layer.data();
    auto src = glow.data();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  }
  return layer;
}

Image render_apsf_layer(const LightSourceMap& map, const Kernel& kernel) {
  return fft_convolve(map.intensity, kernel);
}

Image component_label_image(const ComponentMap& components) {
  Image out(components.width, components.height, 1);
  auto data = out.data();
  for (std::size_t k = 0; k < components.labels.size(); ++k) {
    data[k] = components.labels[k] / 65535.0;
  }
  return out;
}

}  // namespace lpsim
