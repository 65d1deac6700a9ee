#include <algorithm>
#include <fstream>
#include <set>

#include "doctest.h"
#include "fixtures.h"
#include "lpsim/dataset.h"
#include "lpsim/digest.h"
#include "lpsim/error.h"
#include "lpsim/image_io.h"

using namespace lpsim;
namespace fs = std::filesystem;

namespace {

fs::path make_root(const std::string& name, int scenes, int w = 32, int h = 24) {
  const auto root = fixtures::temp_dir(name);
  for (int s = 0; s < scenes; ++s) {
    char id[16];
    std::snprintf(id, sizeof(id), "scene%02d", s);
    fixtures::write_scene(fixtures::make_scene(100 + s, w, h, id), root / id);
  }
  return root;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("split sizes") {
  CHECK(val_group_count(0) == 0);
  CHECK(val_group_count(1) == 0);
  CHECK(val_group_count(2) == 1);
  CHECK(val_group_count(10) == 1);
  CHECK(val_group_count(19) == 1);
  CHECK(val_group_count(20) == 2);
  const auto plan = plan_dataset(10, 5);
  CHECK(plan.pairs == 50);
  CHECK(plan.train_groups == 9);
  CHECK(plan.val_groups == 1);
  const auto full = plan_dataset(521, 5);
  CHECK(full.pairs == 2605);
  CHECK(full.val_groups == 52);
  CHECK(full.train_groups == 469);
}

TEST_CASE("split depends on seed and ids only") {
  std::vector<std::string> ids;
  for (int k = 0; k < 30; ++k) ids.push_back("g" + std::to_string(100 + k));
  const auto a = split_groups(ids, 5), b = split_groups(ids, 5);
  CHECK(a == b);
  CHECK(std::count(a.begin(), a.end(), Split::kVal) == 3);
  bool differs = false;
  for (std::uint64_t seed = 6; seed < 16; ++seed) differs |= split_groups(ids, seed) != a;
  CHECK(differs);
  auto shuffled = ids;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK_THROWS_AS(split_groups(shuffled, 5), ParameterError);
}

TEST_CASE("scene loading") {
  const auto root = make_root("load", 1);
  const auto scene = load_scene(root / "scene00");
  CHECK(scene.id == "scene00");
  CHECK(scene.clean.channels() == 3);
  CHECK(scene.lights.provenance == LightProvenance::kExternalFile);

  // Single-channel light map broadcast to RGB.
  Image gray(32, 24, 1);
  gray.at(3, 3, 0) = 1.0;
  write_png(root / "scene00" / "lights.png", gray, 8);
  const auto broadcast = load_scene(root / "scene00");
  CHECK(broadcast.lights.intensity.channels() == 3);
  CHECK(broadcast.lights.intensity.at(3, 3, 2) == 1.0);

  SceneLoadOptions extract;
  extract.extract_lights = true;
  fs::remove(root / "scene00" / "lights.png");
  CHECK(load_scene(root / "scene00", extract).lights.provenance ==
        LightProvenance::kThresholdFallback);
  try {
    load_scene(root / "scene00");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(e.path().find("lights.png") != std::string::npos);
  }
  write_png(root / "scene00" / "sky_mask.png", Image(5, 5, 1), 8);
  try {
    load_scene(root / "scene00", extract);
    FAIL("expected DimensionMismatch");
  } catch (const DimensionMismatch& e) {
    CHECK(std::string(e.what()).find("sky_mask.png") != std::string::npos);
  }
}

TEST_CASE("build, verify digests and skip incomplete scenes") {
  const auto root = make_root("build", 4);
  fs::create_directories(root / "broken");
  fixtures::write_scene(fixtures::make_scene(1, 32, 24), root / "broken");
  fs::remove(root / "broken" / "sky_mask.png");
  const auto out = fixtures::temp_dir("build_out");

  DatasetOptions opt;
  opt.master_seed = 9;
  opt.variants = 2;
  opt.output.emit_layers = true;
  const auto m = build_dataset(root, out, opt);
  CHECK(m.pairs == 8);
  CHECK(m.train_groups == 3);
  CHECK(m.val_groups == 1);
  CHECK(m.skipped == std::vector<std::string>{"broken"});
  CHECK(m.json["skipped"][0]["reason"].get<std::string>().find("sky_mask.png") !=
        std::string::npos);
  CHECK(fs::exists(out / "manifest.json"));

  int files = 0;
  for (const auto& rec : m.json["records"]) {
    CHECK(rec["files"].size() == 4);
    for (const auto& [role, rel] : rec["files"].items()) {
      const fs::path path = out / rel.get<std::string>();
      REQUIRE(fs::exists(path));
      CHECK(sha256_file(path) == rec["file_digests"][role].get<std::string>());
      ++files;
    }
    const Image polluted = read_image(out / rec["files"]["polluted"].get<std::string>());
    CHECK(polluted.width() == 32);
  }
  CHECK(files == 32);
  std::set<std::string> splits;
  for (const auto& g : m.json["groups"]) {
    const std::string split = g["split"];
    for (const auto& rec : m.json["records"])
      if (rec["scene_id"] == g["id"]) CHECK(rec["split"] == split);
    splits.insert(split);
  }
  CHECK(splits == std::set<std::string>{"train", "val"});
}

TEST_CASE("manifest is independent of worker count") {
  const auto root = make_root("workers", 5);
  DatasetOptions opt;
  opt.master_seed = 77;
  opt.variants = 2;
  opt.workers = 1;
  const auto a = build_dataset(root, fixtures::temp_dir("workers_a"), opt);
  opt.workers = 3;
  const auto b = build_dataset(root, fixtures::temp_dir("workers_b"), opt);
  CHECK(a.digest == b.digest);
  opt.master_seed = 78;
  CHECK(build_dataset(root, fixtures::temp_dir("workers_c"), opt).digest != a.digest);
}

TEST_CASE("pairs evaluation") {
  const auto dir = fixtures::temp_dir("eval");
  Rng rng(81);
  const Image x = fixtures::random_image(rng, 16, 16, 3);
  Image y = x;
  for (double& v : y.data()) v = std::clamp(v + 0.05, 0.0, 1.0);
  write_png(dir / "x.png", x, 16);
  write_png(dir / "y.png", y, 16);
  write_png(dir / "small.png", Image(12, 12, 3), 8);

  std::ofstream(dir / "empty.csv") << "";
  const auto empty = evaluate_pairs(dir / "empty.csv");
  CHECK(empty.rows.empty());
  CHECK(empty.summary()["count"] == 0);

  std::ofstream(dir / "pairs.csv") << "path_a,path_b\nx.png,x.png\nx.png,y.png\n"
                                      "x.png,small.png\nx.png,nope.png\n";
  const auto r = evaluate_pairs(dir / "pairs.csv");
  REQUIRE(r.rows.size() == 4);
  CHECK(std::isinf(r.rows[0].psnr_db));
  CHECK(r.rows[0].ssim == doctest::Approx(1.0));
  CHECK(r.rows[1].error.empty());
  CHECK_FALSE(r.rows[2].error.empty());
  CHECK_FALSE(r.rows[3].error.empty());
  CHECK(r.summary()["failed"] == 2);
  CHECK(r.summary()["mean_psnr_db"] == "inf");
  CHECK(r.csv().rfind("path_a,path_b,psnr_db,ssim", 0) == 0);

  std::ofstream(dir / "two.csv") << "x.png,y.png\ny.png,x.png\n";
  const auto two = evaluate_pairs(dir / "two.csv");
  CHECK(two.summary()["mean_psnr_db"].get<double>() ==
        doctest::Approx((two.rows[0].psnr_db + two.rows[1].psnr_db) / 2));
  CHECK(two.summary()["mean_ssim"].get<double>() ==
        doctest::Approx((two.rows[0].ssim + two.rows[1].ssim) / 2));
}

}  // TEST_SUITE
