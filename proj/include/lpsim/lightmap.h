#ifndef LPSIM_LIGHTMAP_H_
#define LPSIM_LIGHTMAP_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lpsim/alsf.h"
#include "lpsim/image.h"
#include "lpsim/rng.h"

namespace lpsim {

enum class LightProvenance { kExternalFile, kThresholdFallback };

// Radiance of the visible emitters, same shape as the scene image.
struct LightSourceMap {
  Image intensity;
  LightProvenance provenance = LightProvenance::kExternalFile;
};

// Keeps pixels whose luminance is >= tau, zeroes the rest. tau in (0, 1).
LightSourceMap extract_lights_threshold(const Image& image, double tau);

inline constexpr double kLightBinarizeThreshold = 0.02;
inline constexpr int kDefaultMinArea = 4;

// True where the channel-max intensity exceeds `threshold`.
BinaryMask binarize_lights(const LightSourceMap& map,
                           double threshold = kLightBinarizeThreshold);

struct ComponentMap {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> labels;  // 0 = background, else 1..count
  int count = 0;
  std::vector<std::int64_t> areas;   // areas[k - 1] is the area of label k

  std::int32_t label(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
};

// 8-connected labeling. Components smaller than min_area become background;
// survivors are numbered 1..count in raster order of their first pixel.
ComponentMap connected_components(const BinaryMask& mask,
                                  int min_area = kDefaultMinArea);

// One uniform draw from {0, 1, 2} per component, in label order.
std::vector<KernelFamily> assign_kernel_types(const ComponentMap& components,
                                              Rng& rng);

// Sums the light map over the components assigned to each family, convolves
// each non-empty group with that family's kernel and accumulates in family
// order. Pixels outside retained components do not contribute.
Image render_alsf_layer(const LightSourceMap& map,
                        const ComponentMap& components,
                        std::span<const KernelFamily> assignment,
                        const std::array<Kernel, 3>& kernels);

Image render_apsf_layer(const LightSourceMap& map, const Kernel& kernel);

// Labels as a single-channel image with value label / 65535, for 16-bit PGM
// export.
Image component_label_image(const ComponentMap& components);

}  // namespace lpsim

#endif  // LPSIM_LIGHTMAP_H_
