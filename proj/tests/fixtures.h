#ifndef LPSIM_TESTS_FIXTURES_H_
#define LPSIM_TESTS_FIXTURES_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "lpsim/image.h"
#include "lpsim/rng.h"
#include "lpsim/synth.h"

namespace fixtures {

lpsim::Image random_image(lpsim::Rng& rng, int w, int h, int channels);
// Odd size, non-negative weights; not normalized.
lpsim::Kernel random_kernel(lpsim::Rng& rng, int size);
lpsim::Kernel random_symmetric_kernel(lpsim::Rng& rng, int size);

// Night scene: dark sky above a wavy skyline, ground below, a few lit
// windows. Deterministic in `seed`.
lpsim::SceneAssets make_scene(std::uint64_t seed, int w, int h,
                              const std::string& id = "scene");

// Writes clean.png, sky_mask.png and lights.png (16-bit) into dir.
void write_scene(const lpsim::SceneAssets& scene,
                 const std::filesystem::path& dir);

double max_abs_diff(const lpsim::Image& a, const lpsim::Image& b);

// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

}  // namespace fixtures

#endif  // LPSIM_TESTS_FIXTURES_H_
