#ifndef LPSIM_DATASET_H_
#define LPSIM_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "lpsim/metrics.h"
#include "lpsim/synth.h"

namespace lpsim {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Scene directory layout.
inline constexpr const char* kCleanFile = "clean.png";
inline constexpr const char* kSkyMaskFile = "sky_mask.png";
inline constexpr const char* kLightsFile = "lights.png";

struct SceneLoadOptions {
  // Derive the light map from clean.png by luminance threshold instead of
  // reading lights.png.
  bool extract_lights = false;
  double tau = 0.9;
};

// Loads clean.png, sky_mask.png and lights.png from `dir`; the scene id is
// the directory name. A single-channel light map is broadcast to the clean
// image's channel count. Throws IoError / DimensionMismatch naming the file.
SceneAssets load_scene(const std::filesystem::path& dir,
                       const SceneLoadOptions& options = {});

// Files written for one synthesized variant.
struct OutputOptions {
  int bit_depth = 8;
  bool emit_layers = false;
  bool debug = false;
};

// Writes <stem>.png and, optionally, <stem>_p_sky.png, <stem>_p_alsf.png,
// <stem>_p_apsf.png (gain-weighted layers, 16-bit) and debug exports.
// Paths recorded in `record` are relative to `root`; digests are of the
// written bytes.
void write_variant_outputs(const std::filesystem::path& root,
                           const std::filesystem::path& rel_dir,
                           const std::string& stem,
                           const SynthesisResult& result,
                           const OutputOptions& options,
                           SynthesisRecord& record);

enum class Split { kTrain, kVal };

// max(1, floor(groups / 10)) validation groups when groups >= 2, else 0.
int val_group_count(int groups);

// `ids` must be sorted. The ids are permuted by a Fisher-Yates shuffle seeded
// from the master seed; the last val_group_count() ids of the permutation are
// validation groups. Returns the split of each input id, in input order.
std::vector<Split> split_groups(const std::vector<std::string>& ids,
                                std::uint64_t master_seed);

struct DatasetPlan {
  int groups = 0;
  int pairs = 0;
  int train_groups = 0;
  int val_groups = 0;
};

DatasetPlan plan_dataset(int scenes, int variants);

struct DatasetOptions {
  std::uint64_t master_seed = 0;
  int variants = 5;
  // Worker threads; 0 means LPSIM_WORKERS from the environment, else 1.
  int workers = 0;
  SceneLoadOptions load;
  OutputOptions output;
  SynthesisConfig synth;
};

struct DatasetManifest {
  nlohmann::json json;
  std::string digest;  // sha256 of json.dump()
  int pairs = 0;
  int train_groups = 0;
  int val_groups = 0;
  std::vector<std::string> skipped;
};

// Worker count from LPSIM_WORKERS, or 1.
int workers_from_env();

// Synthesizes `variants` versions of every complete scene directory under
// `root` into `out` and writes out/manifest.json. Incomplete scenes are
// listed under "skipped". The manifest does not depend on worker count or
// directory enumeration order.
DatasetManifest build_dataset(const std::filesystem::path& root,
                              const std::filesystem::path& out,
                              const DatasetOptions& options);

struct EvalRow {
  std::string path_a;
  std::string path_b;
  double psnr_db = 0.0;
  double ssim = 0.0;
  std::string error;  // non-empty when the row could not be scored
};

struct EvalReport {
  std::vector<EvalRow> rows;
  MetricReport metrics;  // successful rows only
  nlohmann::json summary() const;
  std::string csv() const;
};

// Reads "path_a,path_b" lines (an optional header is skipped). Relative paths
// resolve against the pairs file's directory. Unreadable or mismatched pairs
// are reported per row.
EvalReport evaluate_pairs(const std::filesystem::path& pairs_csv);

// Formats a PSNR value; infinity becomes "inf".
std::string format_psnr(double psnr_db);

}  // namespace lpsim

#endif  // LPSIM_DATASET_H_
