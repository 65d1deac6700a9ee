#include "fixtures.h"

#include <cmath>
#include <stdexcept>

#include "lpsim/image_io.h"

namespace fixtures {
using lpsim::Image;
using lpsim::Kernel;

Image random_image(lpsim::Rng& rng, int w, int h, int channels) {
  Image im(w, h, channels);
  for (double& v : im.data()) v = rng.uniform01();
  return im;
}

Kernel random_kernel(lpsim::Rng& rng, int size) {
  Kernel k(size);
  for (double& v : k.weights()) v = rng.uniform01();
  return k;
}

Kernel random_symmetric_kernel(lpsim::Rng& rng, int size) {
  Kernel k = random_kernel(rng, size);
  for (int j = 0; j < size; ++j) {
    for (int i = 0; i < size / 2; ++i) k.at(size - 1 - i, j) = k.at(i, j);
  }
  return k;
}

lpsim::SceneAssets make_scene(std::uint64_t seed, int w, int h,
                              const std::string& id) {
  lpsim::Rng rng(seed);
  lpsim::SceneAssets scene;
  scene.id = id;
  scene.clean = Image(w, h, 3);
  scene.sky_mask = lpsim::BinaryMask(w, h);
  scene.lights.intensity = Image(w, h, 3);

  const double base = h * rng.uniform(0.3, 0.45);
  const double amp = h * 0.08, period = rng.uniform(6.0, 14.0);
  for (int x = 0; x < w; ++x) {
    const int skyline = static_cast<int>(base + amp * std::sin(x / period));
    for (int y = 0; y < h; ++y) {
      const bool sky = y <= skyline;
      scene.sky_mask.set(x, y, sky);
      const double v = sky ? 0.02 + 0.03 * y / h : 0.08 + 0.05 * rng.uniform01();
      for (int c = 0; c < 3; ++c) scene.clean.at(x, y, c) = v;
    }
  }
  const int windows = 2 + rng.uniform_int(0, 4);
  for (int n = 0; n < windows; ++n) {
    const int bw = rng.uniform_int(2, 4), bh = rng.uniform_int(2, 4);
    const int x0 = rng.uniform_int(0, w - bw - 1);
    const int y0 = rng.uniform_int(static_cast<int>(base + amp) + 2, h - bh - 1);
    const double r = rng.uniform(0.7, 1.0), g = rng.uniform(0.5, 0.9);
    const double b = rng.uniform(0.2, 0.6);
    for (int y = y0; y < y0 + bh; ++y) {
      for (int x = x0; x < x0 + bw; ++x) {
        const double rgb[3] = {r, g, b};
        for (int c = 0; c < 3; ++c) {
          scene.lights.intensity.at(x, y, c) = rgb[c];
          scene.clean.at(x, y, c) = rgb[c];
        }
      }
    }
  }
  return scene;
}

void write_scene(const lpsim::SceneAssets& scene,
                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  lpsim::write_png(dir / "clean.png", scene.clean, 16);
  Image mask(scene.sky_mask.width(), scene.sky_mask.height(), 1);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      mask.at(x, y, 0) = scene.sky_mask.at(x, y) ? 1.0 : 0.0;
    }
  }
  lpsim::write_png(dir / "sky_mask.png", mask, 8);
  lpsim::write_png(dir / "lights.png", scene.lights.intensity, 16);
}

double max_abs_diff(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("shape mismatch");
  double m = 0.0;
  for (std::size_t n = 0; n < a.data().size(); ++n) {
    m = std::max(m, std::fabs(a.data()[n] - b.data()[n]));
  }
  return m;
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("lpsim_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
