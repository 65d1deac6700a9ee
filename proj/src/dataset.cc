#include "lpsim/dataset.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "lpsim/digest.h"
#include "lpsim/error.h"
#include "lpsim/image_io.h"
#include "lpsim/rng.h"

namespace lpsim {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Image broadcast_channels(const Image& src, int channels) {
  if (src.channels() == channels) return src;
  if (channels == 1) return luminance_image(src);
  Image out(src.width(), src.height(), channels);
  for (int c = 0; c < channels; ++c) {
    std::copy(src.plane(0).begin(), src.plane(0).end(), out.plane(c).begin());
  }
  return out;
}

Image read_required(const fs::path& path) {
  if (!fs::exists(path)) throw IoError(path.string(), "missing required file");
  return read_image(path);
}

std::string write_encoded(const fs::path& root, const fs::path& rel,
                          const std::vector<std::uint8_t>& bytes) {
  write_file_atomic(root / rel, bytes.data(), bytes.size());
  return sha256_hex(bytes);
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_atomic(path, text.data(), text.size());
}

Image scaled(const Image& layer, double gain) {
  Image out = layer;
  for (double& v : out.data()) v *= gain;
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> missing_files(const fs::path& dir,
                                       const SceneLoadOptions& options) {
  std::vector<std::string> missing;
  for (const char* name : {kCleanFile, kSkyMaskFile, kLightsFile}) {
    if (name == std::string(kLightsFile) && options.extract_lights) continue;
    if (!fs::is_regular_file(dir / name)) missing.emplace_back(name);
  }
  return missing;
}

struct SceneOutcome {
  std::vector<SynthesisRecord> records;
  std::optional<std::string> skipped;
};

}  // namespace

SceneAssets load_scene(const fs::path& dir, const SceneLoadOptions& options) {
  SceneAssets assets;
  assets.id = dir.filename().string();
  if (assets.id.empty()) assets.id = dir.parent_path().filename().string();

  const fs::path clean_path = dir / kCleanFile;
  const fs::path mask_path = dir / kSkyMaskFile;
  assets.clean = read_required(clean_path);
  const Image mask_image = read_required(mask_path);
  if (mask_image.width() != assets.clean.width() ||
      mask_image.height() != assets.clean.height()) {
    throw DimensionMismatch(mask_path.string() + " is " +
                            std::to_string(mask_image.width()) + "x" +
                            std::to_string(mask_image.height()) + " but " +
                            clean_path.string() + " is " +
                            std::to_string(assets.clean.width()) + "x" +
                            std::to_string(assets.clean.height()));
  }
  assets.sky_mask = BinaryMask::FromImage(mask_image, 0.5);

  if (options.extract_lights) {
    assets.lights = extract_lights_threshold(assets.clean, options.tau);
  } else {
    const fs::path lights_path = dir / kLightsFile;
    const Image lights = read_required(lights_path);
    if (lights.width() != assets.clean.width() ||
        lights.height() != assets.clean.height()) {
      throw DimensionMismatch(lights_path.string() + " is " +
                              std::to_string(lights.width()) + "x" +
                              std::to_string(lights.height()) +
                              ", which does not match " + clean_path.string());
    }
    assets.lights.intensity = broadcast_channels(lights, assets.clean.channels());
    assets.lights.provenance = LightProvenance::kExternalFile;
  }
  return assets;
}

void write_variant_outputs(const fs::path& root, const fs::path& rel_dir,
                           const std::string& stem,
                           const SynthesisResult& result,
                           const OutputOptions& options,
                           SynthesisRecord& record) {
  std::error_code ec;
  fs::create_directories(root / rel_dir, ec);
  if (ec) throw IoError((root / rel_dir).string(), "cannot create directory");

  auto emit = [&](const std::string& role, const std::string& name,
                  const Image& image, int depth) {
    const fs::path rel = rel_dir / name;
    record.file_digests[role] = write_encoded(root, rel, encode_png(image, depth));
    record.files[role] = rel.generic_string();
  };

  emit("polluted", stem + ".png", result.polluted, options.bit_depth);
  if (options.emit_layers) {
    const LayerGains& g = record.params.gains;
    emit("p_sky", stem + "_p_sky.png", scaled(result.layers.sky, g.sky), 16);
    emit("p_alsf", stem + "_p_alsf.png", scaled(result.layers.alsf, g.alsf), 16);
    emit("p_apsf", stem + "_p_apsf.png", scaled(result.layers.apsf, g.apsf), 16);
  }
  if (options.debug) {
    const Image& clean = result.polluted;
    emit("hidden_emission", stem + "_hidden_emission.png",
         rasterize_hidden_lights(result.hidden_lights, clean.width(),
                                 clean.height(), clean.channels()),
         16);
    emit("sky_glow", stem + "_sky_glow.png", result.layers.sky, 16);
    json lights = json::array();
    for (const auto& l : result.hidden_lights) lights.push_back(to_json(l));
    const std::string text = lights.dump(2) + "\n";
    const fs::path rel = rel_dir / (stem + "_hidden_lights.json");
    write_text(root / rel, text);
    record.files["hidden_lights"] = rel.generic_string();
    record.file_digests["hidden_lights"] = sha256_hex(text);
    const fs::path labels_rel = rel_dir / (stem + "_components.pgm");
    write_pnm(root / labels_rel, component_label_image(result.components), 16);
    record.files["components"] = labels_rel.generic_string();
    record.file_digests["components"] = sha256_file(root / labels_rel);
  }
  write_text(root / rel_dir / (stem + ".json"), to_json(record).dump(2) + "\n");
}

int val_group_count(int groups) {
  if (groups < 2) return 0;
  return std::max(1, groups / 10);
}

std::vector<Split> split_groups(const std::vector<std::string>& ids,
                                std::uint64_t master_seed) {
  if (!std::is_sorted(ids.begin(), ids.end())) {
    throw ParameterError("ids", "group ids must be sorted");
  }
  const int n = static_cast<int>(ids.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  Rng rng(mix64(master_seed ^ 0x73706c6974ULL));  // "split"
  for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_int(0, i)]);
  std::vector<Split> splits(n, Split::kTrain);
  const int val = val_group_count(n);
  for (int k = n - val; k < n; ++k) splits[order[k]] = Split::kVal;
  return splits;
}

DatasetPlan plan_dataset(int scenes, int variants) {
  DatasetPlan plan;
  plan.groups = scenes;
  plan.pairs = scenes * variants;
  plan.val_groups = val_group_count(scenes);
  plan.train_groups = scenes - plan.val_groups;
  return plan;
}

int workers_from_env() {
  if (const char* env = std::getenv("LPSIM_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

DatasetManifest build_dataset(const fs::path& root, const fs::path& out,
                              const DatasetOptions& options) {
  if (!fs::is_directory(root)) throw IoError(root.string(), "not a directory");
  if (options.variants < 1) throw ParameterError("variants", "must be >= 1");

  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });

  std::vector<SceneOutcome> outcomes(dirs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < dirs.size(); i = next++) {
      SceneOutcome& outcome = outcomes[i];
      const auto missing = missing_files(dirs[i], options.load);
      if (!missing.empty()) {
        std::string reason = "missing";
        for (const auto& m : missing) reason += " " + m;
        outcome.skipped = reason;
        continue;
      }
      try {
        const SceneAssets assets = load_scene(dirs[i], options.load);
        const fs::path rel_dir = assets.id;
        outcome.records = make_variants(
            assets, options.master_seed, options.variants, options.synth,
            [&](SynthesisRecord& record, const SynthesisResult& result) {
              write_variant_outputs(out, rel_dir,
                                    assets.id + "_v" + std::to_string(record.variant),
                                    result, options.output, record);
            });
      } catch (const std::exception& e) {
        outcome.records.clear();
        outcome.skipped = e.what();
      }
    }
  };
  const int workers = std::max(
      1, std::min<int>(options.workers > 0 ? options.workers : workers_from_env(),
                       static_cast<int>(std::max<std::size_t>(dirs.size(), 1))));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }

  std::vector<std::string> ids;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (!outcomes[i].skipped) ids.push_back(dirs[i].filename().string());
  }
  const auto splits = split_groups(ids, options.master_seed);

  DatasetManifest manifest;
  json groups = json::array();
  json records = json::array();
  json skipped = json::array();
  int train_pairs = 0, val_pairs = 0;
  std::size_t g = 0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const std::string id = dirs[i].filename().string();
    if (outcomes[i].skipped) {
      skipped.push_back({{"scene", id}, {"reason", *outcomes[i].skipped}});
      manifest.skipped.push_back(id);
      continue;
    }
    const Split split = splits[g++];
    const char* split_name = split == Split::kTrain ? "train" : "val";
    (split == Split::kTrain ? manifest.train_groups : manifest.val_groups)++;
    groups.push_back({{"id", id},
                      {"split", split_name},
                      {"clean", (fs::path(id) / kCleanFile).generic_string()},
                      {"variants", outcomes[i].records.size()}});
    for (const auto& record : outcomes[i].records) {
      json r = to_json(record);
      r["split"] = split_name;
      records.push_back(std::move(r));
      (split == Split::kTrain ? train_pairs : val_pairs)++;
    }
  }
  manifest.pairs = static_cast<int>(records.size());

  manifest.json = {
      {"toolkit_version", kToolkitVersion},
      {"master_seed", options.master_seed},
      {"variants", options.variants},
      {"config",
       {{"synthesis", to_json(options.synth)},
        {"extract_lights", options.load.extract_lights},
        {"tau", options.load.tau},
        {"bit_depth", options.output.bit_depth},
        {"emit_layers", options.output.emit_layers}}},
      {"groups", groups},
      {"records", records},
      {"skipped", skipped},
      {"counts",
       {{"groups", groups.size()},
        {"pairs", manifest.pairs},
        {"train_groups", manifest.train_groups},
        {"val_groups", manifest.val_groups},
        {"train_pairs", train_pairs},
        {"val_pairs", val_pairs}}}};
  manifest.digest = sha256_hex(manifest.json.dump());

  json on_disk = manifest.json;
  on_disk["manifest_digest"] = manifest.digest;
  std::error_code ec;
  fs::create_directories(out, ec);
  write_text(out / "manifest.json", on_disk.dump(2) + "\n");
  return manifest;
}

std::string format_psnr(double psnr_db) {
  return std::isinf(psnr_db) ? "inf" : fmt_double(psnr_db);
}

json EvalReport::summary() const {
  json s;
  int failed = 0;
  for (const auto& row : rows) failed += row.error.empty() ? 0 : 1;
  s["count"] = rows.size();
  s["scored"] = metrics.count();
  s["failed"] = failed;
  if (metrics.count() == 0) {
    s["mean_psnr_db"] = nullptr;
    s["mean_ssim"] = nullptr;
  } else {
    const double mp = metrics.mean_psnr_db();
    s["mean_psnr_db"] = std::isinf(mp) ? json("inf") : json(mp);
    s["mean_ssim"] = metrics.mean_ssim();
  }
  return s;
}

std::string EvalReport::csv() const {
  std::string out = "path_a,path_b,psnr_db,ssim,error\n";
  for (const auto& row : rows) {
    out += row.path_a + "," + row.path_b + ",";
    if (row.error.empty()) {
      out += format_psnr(row.psnr_db) + "," + fmt_double(row.ssim) + ",";
    } else {
      std::string msg = row.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out += ",," + msg;
    }
    out += "\n";
  }
  return out;
}

EvalReport evaluate_pairs(const fs::path& pairs_csv) {
  std::ifstream in(pairs_csv);
  if (!in) throw IoError(pairs_csv.string(), "cannot open pairs file");
  const fs::path base = pairs_csv.parent_path();
  EvalReport report;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    EvalRow row;
    row.path_a = trim(line.substr(0, comma));
    row.path_b = comma == std::string::npos ? "" : trim(line.substr(comma + 1));
    if (first) {
      first = false;
      if ((row.path_a == "path_a" && row.path_b == "path_b") ||
          (row.path_a == "restored" && row.path_b == "reference")) {
        continue;
      }
    }
    try {
      if (row.path_b.empty()) throw IoError(line, "expected two comma-separated paths");
      auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        return path.is_absolute() ? path : base / path;
      };
      const Image a = read_image(resolve(row.path_a));
      const Image b = read_image(resolve(row.path_b));
      row.psnr_db = psnr(a, b);
      row.ssim = ssim(a, b);
      report.metrics.add(row.psnr_db, row.ssim);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace lpsim
