// lpsim: night-time light pollution synthesis toolkit.
//
//   lpsim kernel --family upward --seed 7 --out k/
//   lpsim synth scenes/0001 --seed 3 --out out/ --emit-layers
//   lpsim dataset scenes/ --seed 42 --variants 5 --out ds/
//   lpsim eval pairs.csv --out-csv rows.csv --out-json summary.json
//   lpsim extract-lights clean.png --tau 0.9 --out lights.png

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lpsim/alsf.h"
#include "lpsim/apsf.h"
#include "lpsim/dataset.h"
#include "lpsim/digest.h"
#include "lpsim/error.h"
#include "lpsim/image_io.h"
#include "lpsim/kernel_export.h"
#include "lpsim/lightmap.h"
#include "lpsim/rng.h"
#include "lpsim/synth.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int fail(const json& err, int code) {
  std::cerr << err.dump() << std::endl;
  return code;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw lpsim::IoError(path.string(), "cannot open");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw lpsim::IoError(path.string(), std::string("invalid JSON: ") + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  lpsim::write_file_atomic(path, text.data(), text.size());
}

lpsim::LayerGains parse_gains(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw lpsim::ParameterError("gains", "not a number: '" + item + "'");
    }
  }
  if (v.size() != 3) throw lpsim::ParameterError("gains", "expected sky,alsf,apsf");
  return {v[0], v[1], v[2]};
}

struct KernelArgs {
  std::string out;
  std::string family;
  std::uint64_t seed = 0;
  int width = 64;
  int height = 64;
  std::optional<double> T, q, scalor, alpha, sigma, A, kappa;
  std::optional<int> size;
  bool no_renormalize = false;
  bool profile = false;
};

int run_kernel(const KernelArgs& a) {
  lpsim::AlsfParams params;
  if (!a.family.empty()) {
    lpsim::Rng rng(a.seed);
    params = lpsim::sample_family_params(lpsim::family_from_name(a.family), rng,
                                         a.width, a.height);
  } else {
    params.beams.push_back(lpsim::BeamSpec{});
  }
  if (a.T) params.base.optical_thickness = *a.T;
  if (a.q) params.base.forward_scatter = *a.q;
  if (a.scalor) params.base.size = lpsim::kernel_size_for(*a.scalor, a.width, a.height);
  if (a.size) params.base.size = *a.size;
  for (auto& beam : params.beams) {
    if (a.alpha) beam.alpha = *a.alpha;
    if (a.sigma) beam.sigma = *a.sigma;
    if (a.A) beam.amplitude = *a.A;
  }
  if (a.kappa) params.kappa = *a.kappa;
  params.validate();

  const auto exported =
      lpsim::export_kernel_set(a.out, params, !a.no_renormalize, a.profile);
  json files = json::object();
  for (const auto& f : exported.files) {
    files[f.filename().string()] = lpsim::sha256_file(f);
  }
  std::cout << json{{"params", lpsim::to_json(params)},
                    {"renormalize", !a.no_renormalize},
                    {"files", files}}
                   .dump(2)
            << std::endl;
  return 0;
}

struct SynthArgs {
  std::string scene;
  std::string out;
  std::uint64_t seed = 0;
  std::string gains;
  std::string clip;
  std::string config;
  std::string replay;
  bool emit_layers = false;
  bool extract_lights = false;
  double tau = 0.9;
  bool linear_light = false;
  int bit_depth = 8;
  bool debug = false;
};

lpsim::SynthesisConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return lpsim::config_from_json(read_json_file(path));
}

lpsim::ClipMode clip_from_flag(const std::string& name) {
  if (name == "clamp") return lpsim::ClipMode::kClamp;
  if (name == "none") return lpsim::ClipMode::kNone;
  throw lpsim::ParameterError("clip", "expected clamp or none, got '" + name + "'");
}

int run_synth(const SynthArgs& a) {
  lpsim::SynthesisConfig config = load_config(a.config);
  if (!a.clip.empty()) config.clip = clip_from_flag(a.clip);
  if (a.linear_light) config.transfer = lpsim::TransferMode::kLinearLight;
  if (!a.gains.empty()) config.fixed_gains = parse_gains(a.gains);
  if (a.bit_depth != 8 && a.bit_depth != 16) {
    throw lpsim::ParameterError("bit-depth", "must be 8 or 16");
  }

  lpsim::SceneLoadOptions load;
  load.extract_lights = a.extract_lights;
  load.tau = a.tau;
  const lpsim::SceneAssets assets = lpsim::load_scene(a.scene, load);

  std::optional<lpsim::SynthesisRecord> replayed;
  lpsim::SynthesisParams params;
  if (!a.replay.empty()) {
    replayed = lpsim::record_from_json(read_json_file(a.replay));
    params = replayed->params;
    if (!a.clip.empty()) params.clip_mode = config.clip;
    if (a.linear_light) params.transfer = config.transfer;
    if (config.fixed_gains) params.gains = *config.fixed_gains;
  } else {
    params = lpsim::sample_params(a.seed, assets.clean.width(),
                                  assets.clean.height(), config);
  }

  const lpsim::SynthesisResult result = lpsim::synthesize(assets, params);
  lpsim::SynthesisRecord record = lpsim::make_record(
      assets.id, replayed ? replayed->variant : 0, params, result);
  lpsim::OutputOptions output;
  output.bit_depth = a.bit_depth;
  output.emit_layers = a.emit_layers;
  output.debug = a.debug;
  lpsim::write_variant_outputs(a.out, "", "polluted", result, output, record);

  json summary = {{"scene_id", record.scene_id},
                  {"image_digest", record.image_digest},
                  {"record", (fs::path(a.out) / "polluted.json").string()},
                  {"files", record.files}};
  if (replayed) {
    const bool match = replayed->image_digest == record.image_digest;
    summary["replay_match"] = match;
    if (!match) {
      std::cout << summary.dump(2) << std::endl;
      return fail({{"error", "replay_mismatch"},
                   {"message", "replayed image digest differs from the record"},
                   {"expected", replayed->image_digest},
                   {"actual", record.image_digest}},
                  3);
    }
  }
  std::cout << summary.dump(2) << std::endl;
  return 0;
}

struct DatasetArgs {
  std::string root;
  std::string out;
  std::uint64_t seed = 0;
  int variants = 5;
  int workers = 0;
  std::string config;
  bool extract_lights = false;
  double tau = 0.9;
  bool emit_layers = false;
  int bit_depth = 8;
};

int run_dataset(const DatasetArgs& a) {
  lpsim::DatasetOptions options;
  options.master_seed = a.seed;
  options.variants = a.variants;
  options.workers = a.workers;
  options.load.extract_lights = a.extract_lights;
  options.load.tau = a.tau;
  options.output.emit_layers = a.emit_layers;
  options.output.bit_depth = a.bit_depth;
  options.synth = load_config(a.config);
  const auto manifest = lpsim::build_dataset(a.root, a.out, options);
  std::cout << json{{"manifest", (fs::path(a.out) / "manifest.json").string()},
                    {"manifest_digest", manifest.digest},
                    {"pairs", manifest.pairs},
                    {"train_groups", manifest.train_groups},
                    {"val_groups", manifest.val_groups},
                    {"skipped", manifest.skipped}}
                   .dump(2)
            << std::endl;
  return 0;
}

int run_eval(const std::string& pairs, const std::string& out_csv,
             const std::string& out_json) {
  const lpsim::EvalReport report = lpsim::evaluate_pairs(pairs);
  const json summary = report.summary();
  if (!out_csv.empty()) write_text(out_csv, report.csv());
  if (!out_json.empty()) write_text(out_json, summary.dump(2) + "\n");
  for (const auto& row : report.rows) {
    if (!row.error.empty()) {
      std::cerr << json{{"warning", "pair_failed"},
                        {"path_a", row.path_a},
                        {"path_b", row.path_b},
                        {"message", row.error}}
                       .dump()
                << std::endl;
    }
  }
  std::cout << summary.dump(2) << std::endl;
  return 0;
}

int run_extract(const std::string& input, double tau, const std::string& out) {
  const lpsim::Image image = lpsim::read_image(input);
  const auto lights = lpsim::extract_lights_threshold(image, tau);
  if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
  lpsim::write_png(out, lights.intensity, 8);
  std::cout << json{{"out", out}, {"sha256", lpsim::sha256_file(out)}}.dump(2)
            << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Night-time light pollution synthesis toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lpsim::kToolkitVersion);

  KernelArgs ka;
  auto* kernel = app.add_subcommand("kernel", "Export APSF/ALSF kernels and diagnostics");
  kernel->add_option("--out", ka.out, "Output directory")->required();
  kernel->add_option("--family", ka.family, "upward, downward or asymmetric");
  kernel->add_option("--seed", ka.seed, "Seed for --family sampling");
  kernel->add_option("--width", ka.width, "Image width the kernel is sized for");
  kernel->add_option("--height", ka.height, "Image height the kernel is sized for");
  kernel->add_option("--T", ka.T, "Optical thickness");
  kernel->add_option("--q", ka.q, "Forward-scattering parameter");
  kernel->add_option("--size", ka.size, "Kernel side in pixels (odd)");
  kernel->add_option("--scalor", ka.scalor, "Kernel size as a fraction of max(width, height)");
  kernel->add_option("--alpha", ka.alpha, "Beam direction in degrees (all beams)");
  kernel->add_option("--sigma", ka.sigma, "Beam spread in degrees (all beams)");
  kernel->add_option("--A", ka.A, "Beam intensity (all beams)");
  kernel->add_option("--kappa", ka.kappa, "Radial decay");
  kernel->add_flag("--no-renormalize", ka.no_renormalize, "Skip unit-sum renormalization");
  kernel->add_flag("--profile", ka.profile, "Also write the APSF radial profile");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Synthesize one polluted image");
  synth->add_option("scene", sa.scene, "Scene directory")->required();
  synth->add_option("--out", sa.out, "Output directory")->required();
  synth->add_option("--seed", sa.seed, "Sampling seed");
  synth->add_option("--gains", sa.gains, "Fixed layer gains sky,alsf,apsf");
  synth->add_option("--clip", sa.clip, "clamp or none");
  synth->add_option("--config", sa.config, "JSON sampling config");
  synth->add_option("--replay", sa.replay, "Re-render from a record JSON");
  synth->add_option("--tau", sa.tau, "Luminance threshold for --extract-lights");
  synth->add_option("--bit-depth", sa.bit_depth, "8 or 16");
  synth->add_flag("--emit-layers", sa.emit_layers, "Write the three weighted layers");
  synth->add_flag("--extract-lights", sa.extract_lights, "Derive lights from clean.png");
  synth->add_flag("--linear-light", sa.linear_light, "Composite in linear light");
  synth->add_flag("--debug", sa.debug, "Write hidden-light and component exports");

  DatasetArgs da;
  auto* dataset = app.add_subcommand("dataset", "Build a paired dataset");
  dataset->add_option("root", da.root, "Directory of scene directories")->required();
  dataset->add_option("--out", da.out, "Output directory")->required();
  dataset->add_option("--seed", da.seed, "Master seed");
  dataset->add_option("--variants", da.variants, "Variants per scene");
  dataset->add_option("--workers", da.workers, "Worker threads (default LPSIM_WORKERS or 1)");
  dataset->add_option("--config", da.config, "JSON sampling config");
  dataset->add_option("--tau", da.tau, "Luminance threshold for --extract-lights");
  dataset->add_option("--bit-depth", da.bit_depth, "8 or 16");
  dataset->add_flag("--extract-lights", da.extract_lights, "Derive lights from clean.png");
  dataset->add_flag("--emit-layers", da.emit_layers, "Write the three weighted layers");

  std::string pairs, out_csv, out_json;
  auto* eval = app.add_subcommand("eval", "PSNR/SSIM over image pairs");
  eval->add_option("pairs", pairs, "CSV of path_a,path_b lines")->required();
  eval->add_option("--out-csv", out_csv, "Per-pair CSV");
  eval->add_option("--out-json", out_json, "Summary JSON");

  std::string ex_input, ex_out;
  double ex_tau = 0.9;
  auto* extract = app.add_subcommand("extract-lights", "Threshold light map from an image");
  extract->add_option("input", ex_input, "Input image")->required();
  extract->add_option("--out", ex_out, "Output PNG")->required();
  extract->add_option("--tau", ex_tau, "Luminance threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail({{"error", "usage"}, {"message", e.what()}}, 2);
  }

  try {
    if (*kernel) return run_kernel(ka);
    if (*synth) return run_synth(sa);
    if (*dataset) return run_dataset(da);
    if (*eval) return run_eval(pairs, out_csv, out_json);
    if (*extract) return run_extract(ex_input, ex_tau, ex_out);
  } catch (const lpsim::ParameterError& e) {
    return fail({{"error", e.kind()}, {"field", e.field()}, {"message", e.what()}}, 1);
  } catch (const lpsim::IoError& e) {
    return fail({{"error", e.kind()}, {"path", e.path()}, {"message", e.what()}}, 1);
  } catch (const lpsim::Error& e) {
    return fail({{"error", e.kind()}, {"message", e.what()}}, 1);
  } catch (const std::exception& e) {
    return fail({{"error", "internal"}, {"message", e.what()}}, 1);
  }
  return 0;
}
