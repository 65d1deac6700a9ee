#ifndef LPSIM_SYNTH_H_
#define LPSIM_SYNTH_H_

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lpsim/alsf.h"
#include "lpsim/apsf.h"
#include "lpsim/image.h"
#include "lpsim/lightmap.h"
#include "lpsim/skyglow.h"

namespace lpsim {

enum class ClipMode { kClamp, kNone };

// kStored composites the stored pixel values directly. kLinearLight decodes
// clean image and light map with gamma 2.2, composites, and re-encodes.
enum class TransferMode { kStored, kLinearLight };

struct LayerGains {
  double sky = 1.0;
  double alsf = 1.0;
  double apsf = 1.0;
  bool operator==(const LayerGains&) const = default;
};

// Distribution bounds and fixed options used by sample_params.
struct SynthesisConfig {
  KernelRanges kernel;
  Range glow_sigma{30.0, 60.0};
  Range glow_scalor{1.0, 1.5};
  SkyGlowRanges skyglow;
  Range gain_sky{0.5, 1.0};
  Range gain_alsf{0.5, 1.0};
  Range gain_apsf{0.3, 0.8};
  // When set, replaces the sampled gains (the draws are still consumed).
  std::optional<LayerGains> fixed_gains;
  ClipMode clip = ClipMode::kClamp;
  TransferMode transfer = TransferMode::kStored;
  int min_area = kDefaultMinArea;
  double light_threshold = kLightBinarizeThreshold;

  bool operator==(const SynthesisConfig&) const = default;
};

struct SkyGlowSpec {
  AlsfParams kernel;
  SkyGlowRanges ranges;
  std::uint64_t placement_seed = 0;
  // Explicit placement; when absent the lights are placed from
  // placement_seed against the scene's sky mask.
  std::optional<std::vector<HiddenLight>> lights;

  bool operator==(const SkyGlowSpec&) const = default;
};

struct SynthesisParams {
  std::uint64_t seed = 0;
  ApsfParams apsf;
  std::array<AlsfParams, 3> alsf_by_family;  // indexed by KernelFamily
  SkyGlowSpec skyglow;
  std::uint64_t assignment_seed = 0;
  LayerGains gains;
  ClipMode clip_mode = ClipMode::kClamp;
  TransferMode transfer = TransferMode::kStored;
  int min_area = kDefaultMinArea;
  double light_threshold = kLightBinarizeThreshold;

  void validate() const;

  bool operator==(const SynthesisParams&) const = default;
};

// Draw order: APSF (T, q, scalor); upward, downward and asymmetric family
// parameters (see sample_family_params); glow kernel (T, q, scalor, kappa,
// alpha, sigma); gains (sky, alsf, apsf); placement seed; assignment seed.
SynthesisParams sample_params(std::uint64_t seed, int width, int height,
                              const SynthesisConfig& config = {});

struct SceneAssets {
  std::string id;
  Image clean;
  BinaryMask sky_mask;
  LightSourceMap lights;

  // Throws DimensionMismatch when the three inputs disagree.
  void validate() const;
};

// Unscaled pollution layers.
struct Layers {
  Image sky;
  Image alsf;
  Image apsf;
};

struct SynthesisResult {
  Image polluted;
  Layers layers;
  std::vector<HiddenLight> hidden_lights;
  ComponentMap components;
  std::vector<KernelFamily> assignment;
};

// I = clip(J + (g_sky P_sky + g_alsf P_alsf + g_apsf P_apsf)); the weighted
// layers are summed first, in that order, then added to J.
SynthesisResult synthesize(const SceneAssets& assets,
                           const SynthesisParams& params);

struct SynthesisRecord {
  std::string scene_id;
  int variant = 0;
  SynthesisParams params;
  std::string image_digest;                   // image_digest() of I
  // Derived outputs kept for inspection; replay does not read them.
  std::vector<HiddenLight> hidden_lights;
  int component_count = 0;
  std::array<int, 3> family_counts{0, 0, 0};
  std::map<std::string, std::string> files;   // role -> relative path
  std::map<std::string, std::string> file_digests;  // role -> sha256 hex
};

// Record for one synthesized image; files are left empty.
SynthesisRecord make_record(const std::string& scene_id, int variant,
                            const SynthesisParams& params,
                            const SynthesisResult& result);

using VariantSink =
    std::function<void(SynthesisRecord& record, const SynthesisResult& result)>;

// Variant k is sampled from derive_seed(master_seed, assets.id, k). `sink`,
// when given, sees every result before it is dropped (e.g. to write files
// and fill in the record's paths).
std::vector<SynthesisRecord> make_variants(const SceneAssets& assets,
                                           std::uint64_t master_seed,
                                           int n = 5,
                                           const SynthesisConfig& config = {},
                                           const VariantSink& sink = {});

// JSON round-trip. Doubles are emitted with shortest round-trip precision.
nlohmann::json to_json(const SynthesisParams& params);
SynthesisParams params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthesisRecord& record);
SynthesisRecord record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthesisConfig& config);
// Missing keys keep their defaults.
SynthesisConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HiddenLight& light);
nlohmann::json to_json(const ApsfParams& params);
ApsfParams apsf_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AlsfParams& params);
AlsfParams alsf_from_json(const nlohmann::json& j);

}  // namespace lpsim

#endif  // LPSIM_SYNTH_H_
