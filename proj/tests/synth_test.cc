#include <cmath>
#include <set>

#include "doctest.h"
#include "fixtures.h"
#include "lpsim/digest.h"
#include "lpsim/error.h"
#include "lpsim/synth.h"

using namespace lpsim;

namespace {

// Frozen output of synthesize(make_scene(2024, 48, 32), sample_params(7, ...)).
constexpr const char* kGoldenDigest = "284f795f39ff3580c1434d7c98fb002923244e414b8a3449dcbd59b1890f135d";

SynthesisParams with_gains(SynthesisParams p, LayerGains g) {
  p.gains = g;
  return p;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("sampled parameters stay in range") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto p = sample_params(seed, 64, 48);
    CHECK(p.apsf.optical_thickness >= 1.1);
    CHECK(p.apsf.optical_thickness <= 1.8);
    CHECK(p.apsf.forward_scatter >= 0.2);
    CHECK(p.apsf.forward_scatter <= 0.7);
    CHECK(p.apsf.size >= kernel_size_for(0.75, 64, 48));
    CHECK(p.apsf.size <= kernel_size_for(1.5, 64, 48));
    for (const auto& a : p.alsf_by_family) {
      CHECK(a.kappa >= 0.5);
      CHECK(a.kappa <= 1.0);
      CHECK(a.base.optical_thickness >= 1.1);
      CHECK(a.base.optical_thickness <= 1.8);
    }
    CHECK(p.gains.apsf >= 0.3);
    CHECK(p.gains.apsf <= 0.8);
  }
}

TEST_CASE("mean optical thickness") {
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    sum += sample_params(seed, 16, 16).apsf.optical_thickness;
  }
  CHECK(std::fabs(sum / 10000 - 1.45) <= 0.02);
}

TEST_CASE("sampling is deterministic") {
  CHECK(sample_params(99, 40, 30) == sample_params(99, 40, 30));
  CHECK_FALSE(sample_params(99, 40, 30) == sample_params(100, 40, 30));
}

TEST_CASE("zero gains return the clean image") {
  const auto scene = fixtures::make_scene(1, 48, 32);
  const auto p = with_gains(sample_params(3, 48, 32), {0, 0, 0});
  CHECK(synthesize(scene, p).polluted == scene.clean);
  auto q = p;
  q.clip_mode = ClipMode::kNone;
  CHECK(synthesize(scene, q).polluted == scene.clean);
}

TEST_CASE("layer decomposition without clipping") {
  Rng rng(61);
  for (int n = 0; n < 8; ++n) {
    const auto scene = fixtures::make_scene(rng.next_u64(), 40, 30);
    auto p = sample_params(rng.next_u64(), 40, 30);
    p.clip_mode = ClipMode::kNone;
    const auto r = synthesize(scene, p);
    const auto& g = p.gains;
    double worst_ulps = 0.0;
    for (std::size_t k = 0; k < r.polluted.data().size(); ++k) {
      const double i = r.polluted.data()[k], j = scene.clean.data()[k];
      const double layers = g.sky * r.layers.sky.data()[k] +
                            g.alsf * r.layers.alsf.data()[k] +
                            g.apsf * r.layers.apsf.data()[k];
      CHECK(i >= j);
      const double ulp = std::nextafter(std::fabs(i), INFINITY) - std::fabs(i);
      worst_ulps = std::max(worst_ulps, std::fabs((i - j) - layers) / ulp);
    }
    CHECK(worst_ulps <= 1.0);
    for (const Image* l : {&r.layers.sky, &r.layers.alsf, &r.layers.apsf})
      for (double v : l->data()) CHECK(v >= -1e-12);
  }
}

TEST_CASE("raising a gain never darkens a pixel") {
  const auto scene = fixtures::make_scene(5, 40, 30);
  auto p = sample_params(8, 40, 30);
  p.clip_mode = ClipMode::kNone;
  const Image base = synthesize(scene, p).polluted;
  for (int which = 0; which < 3; ++which) {
    auto q = p;
    double* g = which == 0 ? &q.gains.sky : which == 1 ? &q.gains.alsf : &q.gains.apsf;
    *g += 0.5;
    const Image up = synthesize(scene, q).polluted;
    for (std::size_t k = 0; k < up.data().size(); ++k) {
      CHECK(up.data()[k] >= base.data()[k] - 1e-15);
    }
  }
}

TEST_CASE("clamped output stays in range") {
  const auto scene = fixtures::make_scene(6, 40, 30);
  const auto p = with_gains(sample_params(9, 40, 30), {20, 20, 20});
  for (double v : synthesize(scene, p).polluted.data()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("linear-light compositing") {
  const auto scene = fixtures::make_scene(7, 40, 30);
  auto p = with_gains(sample_params(10, 40, 30), {0, 0, 0});
  p.transfer = TransferMode::kLinearLight;
  CHECK(fixtures::max_abs_diff(synthesize(scene, p).polluted, scene.clean) < 1e-12);
  p.gains = {1, 1, 1};
  const Image lit = synthesize(scene, p).polluted;
  for (std::size_t k = 0; k < lit.data().size(); ++k)
    CHECK(lit.data()[k] >= scene.clean.data()[k] - 1e-12);
}

TEST_CASE("golden regression") {
  const auto scene = fixtures::make_scene(2024, 48, 32);
  const auto r = synthesize(scene, sample_params(7, 48, 32));
  CHECK(image_digest(r.polluted) == kGoldenDigest);
}

TEST_CASE("synthesis is a pure function of assets and params") {
  const auto scene = fixtures::make_scene(11, 40, 30);
  const auto p = sample_params(12, 40, 30);
  CHECK(image_digest(synthesize(scene, p).polluted) ==
        image_digest(synthesize(scene, p).polluted));
}

TEST_CASE("explicit hidden lights override placement") {
  const auto scene = fixtures::make_scene(13, 40, 30);
  auto p = sample_params(14, 40, 30);
  p.skyglow.lights = std::vector<HiddenLight>{};
  const auto r = synthesize(scene, p);
  CHECK(r.hidden_lights.empty());
  CHECK(r.layers.sky.sum() == 0.0);
}

TEST_CASE("variants") {
  const auto scene = fixtures::make_scene(15, 40, 30, "s15");
  const auto a = make_variants(scene, 42, 5);
  const auto b = make_variants(scene, 42, 5);
  REQUIRE(a.size() == 5);
  std::set<std::string> digests;
  for (int k = 0; k < 5; ++k) {
    CHECK(a[k].variant == k);
    CHECK(a[k].image_digest == b[k].image_digest);
    CHECK(a[k].params.seed == derive_seed(42, "s15", k));
    digests.insert(a[k].image_digest);
    for (int m = 0; m < k; ++m) CHECK_FALSE(a[k].params == a[m].params);
  }
  CHECK(digests.size() == 5);
  CHECK_THROWS_AS(make_variants(scene, 42, 0), ParameterError);
}

TEST_CASE("replaying a record reproduces the image") {
  const auto scene = fixtures::make_scene(16, 40, 30, "s16");
  const auto records = make_variants(scene, 3, 2);
  for (const auto& rec : records) {
    const auto back = record_from_json(nlohmann::json::parse(to_json(rec).dump()));
    CHECK(back.params == rec.params);
    CHECK(image_digest(synthesize(scene, back.params).polluted) == rec.image_digest);
  }
}

TEST_CASE("config round trip and partial configs") {
  SynthesisConfig c;
  c.kernel.sigma = {20.0, 40.0};
  c.fixed_gains = LayerGains{0.1, 0.2, 0.3};
  c.clip = ClipMode::kNone;
  c.transfer = TransferMode::kLinearLight;
  c.skyglow.max_lights = 2;
  CHECK(config_from_json(nlohmann::json::parse(to_json(c).dump())) == c);
  const auto partial = config_from_json(nlohmann::json::parse(R"({"gains": {"sky": [0.1, 0.2]}})"));
  CHECK(partial.gain_sky == Range{0.1, 0.2});
  CHECK(partial.kernel == KernelRanges{});
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"gains": {"sky": [0.3, 0.2]}})")),
                  ParameterError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"gain_sky": [0.1, 0.2]})")),
                  ParameterError);
}

TEST_CASE("invalid inputs") {
  auto scene = fixtures::make_scene(17, 40, 30);
  auto p = sample_params(1, 40, 30);
  p.gains.alsf = -1.0;
  try {
    synthesize(scene, p);
    FAIL("expected ParameterError");
  } catch (const ParameterError& e) {
    CHECK(e.field() == "g_alsf");
  }
  scene.sky_mask = BinaryMask(10, 10);
  CHECK_THROWS_AS(synthesize(scene, sample_params(1, 40, 30)), DimensionMismatch);
}

}  // TEST_SUITE
