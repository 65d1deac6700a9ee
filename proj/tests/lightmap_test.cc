#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "fixtures.h"
#include "lpsim/apsf.h"
#include "lpsim/convolve.h"
#include "lpsim/error.h"
#include "lpsim/lightmap.h"
#include "oracles.h"

using namespace lpsim;

namespace {

BinaryMask mask_from(const std::vector<std::string>& rows) {
  BinaryMask m(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) m.set(x, y, rows[y][x] == '#');
  return m;
}

BinaryMask random_mask(Rng& rng, int w, int h, double density) {
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, rng.uniform01() < density);
  return m;
}

// Map from label to partition id; fails if two labels share a partition
// or one label spans two.
bool same_partition(const ComponentMap& c, const std::vector<int>& part) {
  std::map<int, int> fwd, back;
  for (std::size_t n = 0; n < part.size(); ++n) {
    const int l = c.labels[n], p = part[n];
    if ((l == 0) != (p < 0)) return false;
    if (l == 0) continue;
    if (fwd.count(l) && fwd[l] != p) return false;
    if (back.count(p) && back[p] != l) return false;
    fwd[l] = p;
    back[p] = l;
  }
  return true;
}

}  // namespace

TEST_SUITE("lightmap") {

TEST_CASE("threshold extraction") {
  const Image black(8, 8, 3);
  CHECK(extract_lights_threshold(black, 0.9).intensity == black);
  Image one(8, 8, 3);
  for (int c = 0; c < 3; ++c) one.at(2, 5, c) = 1.0;
  one.at(6, 6, 0) = 0.95;  // luma well below tau
  const auto m = extract_lights_threshold(one, 0.9);
  CHECK(m.provenance == LightProvenance::kThresholdFallback);
  CHECK(binarize_lights(m).count() == 1);
  CHECK(m.intensity.at(2, 5, 1) == 1.0);
  CHECK_THROWS_AS(extract_lights_threshold(one, 1.5), ParameterError);
}

TEST_CASE("component labeling") {
  CHECK(connected_components(BinaryMask(5, 5), 1).count == 0);
  const auto diag = connected_components(mask_from({"##...",
                                                    "##...",
                                                    "..##.",
                                                    "..##."}), 1);
  CHECK(diag.count == 1);
  const auto filtered = connected_components(mask_from({"###..",
                                                        ".....",
                                                        "##..."}), 3);
  CHECK(filtered.count == 1);
  CHECK(filtered.areas == std::vector<std::int64_t>{3});
  CHECK(filtered.label(0, 2) == 0);
  const auto order = connected_components(mask_from({"...#",
                                                     "#...",
                                                     "#..."}), 1);
  CHECK(order.label(3, 0) == 1);
  CHECK(order.label(0, 1) == 2);
}

TEST_CASE("labeling agrees with a BFS partition") {
  Rng rng(41);
  for (int n = 0; n < 50; ++n) {
    const auto m = random_mask(rng, rng.uniform_int(1, 30), rng.uniform_int(1, 30),
                               rng.uniform(0.05, 0.6));
    const auto c = connected_components(m, 1);
    CHECK(same_partition(c, oracle::partition_8(m)));
    std::int64_t total = 0;
    for (auto a : c.areas) total += a;
    CHECK(total == static_cast<std::int64_t>(m.count()));
  }
}

TEST_CASE("labeling is stable under a transpose of the mask") {
  // The partition of the transposed mask is the transpose of the partition.
  Rng rng(42);
  for (int n = 0; n < 20; ++n) {
    const auto m = random_mask(rng, 17, 13, 0.4);
    BinaryMask t(13, 17);
    for (int y = 0; y < 13; ++y)
      for (int x = 0; x < 17; ++x) t.set(y, x, m.at(x, y));
    const auto a = connected_components(m, 3), b = connected_components(t, 3);
    CHECK(a.count == b.count);
    std::map<int, int> link;
    bool ok = true;
    for (int y = 0; y < 13; ++y) {
      for (int x = 0; x < 17; ++x) {
        const int la = a.label(x, y), lb = b.label(y, x);
        if ((la == 0) != (lb == 0)) ok = false;
        if (la == 0) continue;
        if (link.count(la) && link[la] != lb) ok = false;
        link[la] = lb;
      }
    }
    CHECK(ok);
  }
}

TEST_CASE("kernel type assignment") {
  ComponentMap none;
  Rng rng(1);
  CHECK(assign_kernel_types(none, rng).empty());
  const auto c = connected_components(mask_from({"#.#.#.#"}), 1);
  Rng a(9), b(9);
  CHECK(assign_kernel_types(c, a) == assign_kernel_types(c, b));
  CHECK(assign_kernel_types(c, a).size() == 4);
}

TEST_CASE("zero maps give zero layers") {
  LightSourceMap map{Image(20, 12, 3), LightProvenance::kExternalFile};
  const auto comps = connected_components(binarize_lights(map));
  const std::array<Kernel, 3> ks{generate_apsf({1.4, 0.4, 9}), generate_apsf({1.4, 0.4, 9}),
                                 generate_apsf({1.4, 0.4, 9})};
  CHECK(render_alsf_layer(map, comps, {}, ks) == map.intensity);
  CHECK(render_apsf_layer(map, ks[0]).sum() == 0.0);
}

TEST_CASE("impulse reproduces the kernel") {
  LightSourceMap map{Image(21, 21, 1), LightProvenance::kExternalFile};
  map.intensity.at(10, 10, 0) = 0.5;
  const Kernel k = generate_apsf({1.3, 0.5, 11});
  const Image out = render_apsf_layer(map, k);
  double worst = 0.0;
  for (int y = 0; y < 21; ++y) {
    for (int x = 0; x < 21; ++x) {
      const int i = x - 5, j = y - 5;
      const double want = (i >= 0 && j >= 0 && i < 11 && j < 11) ? 0.5 * k.at(i, j) : 0.0;
      worst = std::max(worst, std::fabs(out.at(x, y, 0) - want));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("single component with identical kernels equals plain convolution") {
  LightSourceMap map{Image(24, 20, 3), LightProvenance::kExternalFile};
  for (int y = 8; y < 12; ++y)
    for (int x = 10; x < 13; ++x)
      for (int c = 0; c < 3; ++c) map.intensity.at(x, y, c) = 0.3 + 0.2 * c;
  const auto comps = connected_components(binarize_lights(map));
  REQUIRE(comps.count == 1);
  const Kernel k = generate_apsf({1.5, 0.5, 9});
  const std::array<Kernel, 3> ks{k, k, k};
  for (auto fam : {KernelFamily::kUpward, KernelFamily::kDownward, KernelFamily::kAsymmetric}) {
    const std::vector<KernelFamily> assign{fam};
    CHECK(fixtures::max_abs_diff(render_alsf_layer(map, comps, assign, ks),
                                 fft_convolve(map.intensity, k)) < 1e-12);
  }
}

TEST_CASE("grouped rendering matches per-component rendering") {
  Rng rng(43);
  for (int n = 0; n < 8; ++n) {
    LightSourceMap map{fixtures::random_image(rng, 28, 22, 3), LightProvenance::kExternalFile};
    const auto mask = random_mask(rng, 28, 22, 0.08);
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < 22; ++y)
        for (int x = 0; x < 28; ++x)
          if (!mask.at(x, y)) map.intensity.at(x, y, c) = 0.0;
    const auto comps = connected_components(binarize_lights(map), 1);
    const auto assign = assign_kernel_types(comps, rng);
    const std::array<Kernel, 3> ks{
        preset_kernel(KernelFamily::kUpward, rng, 12, 12).kernel,
        preset_kernel(KernelFamily::kDownward, rng, 12, 12).kernel,
        preset_kernel(KernelFamily::kAsymmetric, rng, 12, 12).kernel};
    const Image got = render_alsf_layer(map, comps, assign, ks);
    CHECK(fixtures::max_abs_diff(got, oracle::render_per_component(map.intensity, comps,
                                                                   assign, ks)) <= 1e-6);
    for (double v : got.data()) CHECK(v >= 0.0);
  }
}

TEST_CASE("alsf layer is linear in the light map") {
  Rng rng(44);
  LightSourceMap a{Image(20, 16, 1), LightProvenance::kExternalFile};
  for (int y = 3; y < 6; ++y)
    for (int x = 3; x < 6; ++x) a.intensity.at(x, y, 0) = rng.uniform(0.2, 1.0);
  for (int y = 10; y < 13; ++y)
    for (int x = 12; x < 15; ++x) a.intensity.at(x, y, 0) = rng.uniform(0.2, 1.0);
  const auto comps = connected_components(binarize_lights(a));
  const auto assign = assign_kernel_types(comps, rng);
  const std::array<Kernel, 3> ks{generate_apsf({1.2, 0.3, 7}), generate_apsf({1.6, 0.6, 9}),
                                 generate_apsf({1.4, 0.5, 5})};
  LightSourceMap b = a;
  for (double& v : b.intensity.data()) v *= 2.5;
  const Image la = render_alsf_layer(a, comps, assign, ks);
  const Image lb = render_alsf_layer(b, comps, assign, ks);
  double worst = 0.0;
  for (std::size_t n = 0; n < la.data().size(); ++n)
    worst = std::max(worst, std::fabs(2.5 * la.data()[n] - lb.data()[n]));
  CHECK(worst < 1e-12);
}

TEST_CASE("label image export") {
  const auto c = connected_components(mask_from({"#..#"}), 1);
  const Image im = component_label_image(c);
  CHECK(im.at(0, 0, 0) == doctest::Approx(1.0 / 65535));
  CHECK(im.at(3, 0, 0) == doctest::Approx(2.0 / 65535));
  CHECK(im.at(1, 0, 0) == 0.0);
}

}  // TEST_SUITE
