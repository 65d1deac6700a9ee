#include "lpsim/synth.h"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>

#include "lpsim/color.h"
#include "lpsim/digest.h"
#include "lpsim/error.h"

namespace lpsim {
using nlohmann::json;

namespace {

void check_gain(double g, const char* field) {
  if (!(g >= 0.0) || !std::isfinite(g)) {
    throw ParameterError(field, "layer gain must be finite and >= 0");
  }
}

double draw(Rng& rng, const Range& r) { return rng.uniform(r.lo, r.hi); }

json range_json(const Range& r) { return json::array({r.lo, r.hi}); }

Range range_from(const json& j, const Range& fallback) {
  if (j.is_null()) return fallback;
  if (!j.is_array() || j.size() != 2) {
    throw ParameterError("config", "ranges are [lo, hi] pairs");
  }
  Range r{j[0].get<double>(), j[1].get<double>()};
  if (!(r.lo <= r.hi)) throw ParameterError("config", "range with lo > hi");
  return r;
}

template <typename T>
T value_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ParameterError(where, "expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end()) {
      throw ParameterError(where, "unknown key '" + key + "'");
    }
  }
}

const json& child(const json& j, const char* key) {
  static const json kNull;
  return j.contains(key) ? j.at(key) : kNull;
}

json to_json(const SkyGlowRanges& r) {
  return {{"lights", {r.min_lights, r.max_lights}},
          {"max_drop", r.max_drop},
          {"half_width", {r.half_width_lo, r.half_width_hi}},
          {"half_height", {r.half_height_lo, r.half_height_hi}},
          {"intensity", {r.intensity_lo, r.intensity_hi}},
          {"saturation", {r.saturation_lo, r.saturation_hi}},
          {"hue_jitter", r.hue_jitter},
          {"max_attempts", r.max_attempts}};
}

SkyGlowRanges skyglow_ranges_from(const json& j) {
  SkyGlowRanges r;
  if (j.is_null()) return r;
  check_keys(j,
             {"lights", "max_drop", "half_width", "half_height", "intensity", "saturation",
              "hue_jitter", "max_attempts"},
             "skyglow");
  if (j.contains("lights")) {
    r.min_lights = j.at("lights")[0].get<int>();
    r.max_lights = j.at("lights")[1].get<int>();
  }
  r.max_drop = value_or(j, "max_drop", r.max_drop);
  auto pair = [&](const char* key, double& lo, double& hi) {
    const Range range = range_from(child(j, key), Range{lo, hi});
    lo = range.lo;
    hi = range.hi;
  };
  pair("half_width", r.half_width_lo, r.half_width_hi);
  pair("half_height", r.half_height_lo, r.half_height_hi);
  pair("intensity", r.intensity_lo, r.intensity_hi);
  pair("saturation", r.saturation_lo, r.saturation_hi);
  r.hue_jitter = value_or(j, "hue_jitter", r.hue_jitter);
  r.max_attempts = value_or(j, "max_attempts", r.max_attempts);
  return r;
}

HiddenLight light_from_json(const json& j) {
  HiddenLight l;
  const auto shape = j.at("shape").get<std::string>();
  if (shape == "ellipse") {
    l.shape = LightShape::kEllipse;
  } else if (shape == "rectangle") {
    l.shape = LightShape::kRectangle;
  } else {
    throw ParameterError("shape", "unknown light shape '" + shape + "'");
  }
  l.center_x = j.at("center")[0].get<double>();
  l.center_y = j.at("center")[1].get<double>();
  l.half_width = j.at("half_extents")[0].get<double>();
  l.half_height = j.at("half_extents")[1].get<double>();
  for (int c = 0; c < 3; ++c) l.color[c] = j.at("color")[c].get<double>();
  l.intensity = j.at("intensity").get<double>();
  return l;
}

json gains_json(const LayerGains& g) {
  return {{"sky", g.sky}, {"alsf", g.alsf}, {"apsf", g.apsf}};
}

LayerGains gains_from(const json& j) {
  return {j.at("sky").get<double>(), j.at("alsf").get<double>(),
          j.at("apsf").get<double>()};
}

std::string clip_name(ClipMode m) { return m == ClipMode::kClamp ? "clamp" : "none"; }

ClipMode clip_from(const std::string& s) {
  if (s == "clamp") return ClipMode::kClamp;
  if (s == "none") return ClipMode::kNone;
  throw ParameterError("clip_mode", "expected 'clamp' or 'none', got '" + s + "'");
}

std::string transfer_name(TransferMode m) {
  return m == TransferMode::kStored ? "stored" : "linear_light";
}

TransferMode transfer_from(const std::string& s) {
  if (s == "stored") return TransferMode::kStored;
  if (s == "linear_light") return TransferMode::kLinearLight;
  throw ParameterError("transfer", "expected 'stored' or 'linear_light', got '" + s + "'");
}

constexpr std::array<KernelFamily, 3> kFamilies{
    KernelFamily::kUpward, KernelFamily::kDownward, KernelFamily::kAsymmetric};

}  // namespace

json to_json(const ApsfParams& p) {
  return {{"T", p.optical_thickness}, {"q", p.forward_scatter}, {"size", p.size}};
}

ApsfParams apsf_from_json(const json& j) {
  ApsfParams p;
  p.optical_thickness = j.at("T").get<double>();
  p.forward_scatter = j.at("q").get<double>();
  p.size = j.at("size").get<int>();
  return p;
}

json to_json(const AlsfParams& p) {
  json beams = json::array();
  for (const auto& b : p.beams) {
    beams.push_back({{"alpha", b.alpha}, {"sigma", b.sigma}, {"A", b.amplitude}});
  }
  return {{"beams", beams}, {"kappa", p.kappa}, {"base", to_json(p.base)}};
}

AlsfParams alsf_from_json(const json& j) {
  AlsfParams p;
  for (const auto& b : j.at("beams")) {
    p.beams.push_back({b.at("alpha").get<double>(), b.at("sigma").get<double>(),
                       b.at("A").get<double>()});
  }
  p.kappa = j.at("kappa").get<double>();
  p.base = apsf_from_json(j.at("base"));
  return p;
}

void SynthesisParams::validate() const {
  apsf.validate();
  for (const auto& a : alsf_by_family) a.validate();
  skyglow.kernel.validate();
  check_gain(gains.sky, "g_sky");
  check_gain(gains.alsf, "g_alsf");
  check_gain(gains.apsf, "g_apsf");
  if (min_area < 1) throw ParameterError("min_area", "must be >= 1");
  if (!(light_threshold >= 0.0)) {
    throw ParameterError("light_threshold", "must be >= 0");
  }
}

SynthesisParams sample_params(std::uint64_t seed, int width, int height,
                              const SynthesisConfig& config) {
  if (width <= 0 || height <= 0) {
    throw ParameterError("dims", "image dimensions must be positive");
  }
  Rng rng(seed);
  SynthesisParams p;
  p.seed = seed;
  p.apsf.optical_thickness = draw(rng, config.kernel.optical_thickness);
  p.apsf.forward_scatter = draw(rng, config.kernel.forward_scatter);
  p.apsf.size = kernel_size_for(draw(rng, config.kernel.scalor), width, height);
  for (KernelFamily f : kFamilies) {
    p.alsf_by_family[static_cast<int>(f)] =
        sample_family_params(f, rng, width, height, config.kernel);
  }
  KernelRanges glow = config.kernel;
  glow.sigma = config.glow_sigma;
  glow.scalor = config.glow_scalor;
  p.skyglow.kernel =
      sample_family_params(KernelFamily::kUpward, rng, width, height, glow);
  p.skyglow.ranges = config.skyglow;
  p.gains.sky = draw(rng, config.gain_sky);
  p.gains.alsf = draw(rng, config.gain_alsf);
  p.gains.apsf = draw(rng, config.gain_apsf);
  if (config.fixed_gains) p.gains = *config.fixed_gains;
  p.skyglow.placement_seed = rng.next_u64();
  p.assignment_seed = rng.next_u64();
  p.clip_mode = config.clip;
  p.transfer = config.transfer;
  p.min_area = config.min_area;
  p.light_threshold = config.light_threshold;
  return p;
}

void SceneAssets::validate() const {
  if (clean.empty()) throw DimensionMismatch("scene '" + id + "' has no clean image");
  if (sky_mask.width() != clean.width() || sky_mask.height() != clean.height()) {
    throw DimensionMismatch("sky mask is " + std::to_string(sky_mask.width()) + "x" +
                            std::to_string(sky_mask.height()) + ", clean image is " +
                            std::to_string(clean.width()) + "x" +
                            std::to_string(clean.height()));
  }
  if (!lights.intensity.same_shape(clean)) {
    throw DimensionMismatch("light map shape does not match the clean image");
  }
  for (double v : lights.intensity.data()) {
    if (!(v >= 0.0)) throw ParameterError("lights", "light map has negative samples");
  }
}

SynthesisResult synthesize(const SceneAssets& assets,
                           const SynthesisParams& params) {
  assets.validate();
  params.validate();
  const int width = assets.clean.width();
  const int height = assets.clean.height();
  const int channels = assets.clean.channels();
  const bool linear = params.transfer == TransferMode::kLinearLight;

  const Image clean = linear ? decode_gamma(assets.clean) : assets.clean;
  LightSourceMap lights = assets.lights;
  if (linear) lights.intensity = decode_gamma(lights.intensity);

  SynthesisResult result;

  if (params.skyglow.lights) {
    result.hidden_lights = *params.skyglow.lights;
  } else {
    Rng placement(params.skyglow.placement_seed);
    result.hidden_lights = place_hidden_lights(
        extract_skyline(assets.sky_mask), assets.sky_mask, placement,
        params.skyglow.ranges);
  }
  if (result.hidden_lights.empty()) {
    result.layers.sky = Image(width, height, channels);
  } else {
    result.layers.sky = render_sky_glow(result.hidden_lights,
                                        build_alsf(params.skyglow.kernel),
                                        width, height, channels);
  }

  result.components = connected_components(
      binarize_lights(lights, params.light_threshold), params.min_area);
  Rng assignment_rng(params.assignment_seed);
  result.assignment = assign_kernel_types(result.components, assignment_rng);
  std::array<Kernel, 3> kernels;
  for (KernelFamily f : kFamilies) {
    if (std::find(result.assignment.begin(), result.assignment.end(), f) !=
        result.assignment.end()) {
      kernels[static_cast<int>(f)] = build_alsf(params.alsf_by_family[static_cast<int>(f)]);
    }
  }
  result.layers.alsf =
      render_alsf_layer(lights, result.components, result.assignment, kernels);
  result.layers.apsf = render_apsf_layer(lights, generate_apsf(params.apsf));

  Image polluted(width, height, channels);
  auto out = polluted.data();
  auto j = clean.data();
  auto sky = result.layers.sky.data();
  auto alsf = result.layers.alsf.data();
  auto apsf = result.layers.apsf.data();
  const LayerGains& g = params.gains;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double pollution = g.sky * sky[k] + g.alsf * alsf[k] + g.apsf * apsf[k];
    double v = j[k] + pollution;
    if (params.clip_mode == ClipMode::kClamp) v = std::clamp(v, 0.0, 1.0);
    out[k] = v;
  }
  result.polluted = linear ? encode_gamma(polluted) : std::move(polluted);
  return result;
}

SynthesisRecord make_record(const std::string& scene_id, int variant,
                            const SynthesisParams& params,
                            const SynthesisResult& result) {
  SynthesisRecord record;
  record.scene_id = scene_id;
  record.variant = variant;
  record.params = params;
  record.image_digest = image_digest(result.polluted);
  record.hidden_lights = result.hidden_lights;
  record.component_count = result.components.count;
  for (KernelFamily f : result.assignment) ++record.family_counts[static_cast<int>(f)];
  return record;
}

std::vector<SynthesisRecord> make_variants(const SceneAssets& assets,
                                           std::uint64_t master_seed, int n,
                                           const SynthesisConfig& config,
                                           const VariantSink& sink) {
  if (n < 1) throw ParameterError("variants", "must be >= 1");
  std::vector<SynthesisRecord> records;
  records.reserve(n);
  for (int k = 0; k < n; ++k) {
    const SynthesisParams params =
        sample_params(derive_seed(master_seed, assets.id, k),
                      assets.clean.width(), assets.clean.height(), config);
    const SynthesisResult result = synthesize(assets, params);
    SynthesisRecord record = make_record(assets.id, k, params, result);
    if (sink) sink(record, result);
    records.push_back(std::move(record));
  }
  return records;
}

json to_json(const HiddenLight& light) {
  return {{"shape", light.shape == LightShape::kEllipse ? "ellipse" : "rectangle"},
          {"center", {light.center_x, light.center_y}},
          {"half_extents", {light.half_width, light.half_height}},
          {"color", {light.color[0], light.color[1], light.color[2]}},
          {"intensity", light.intensity}};
}

json to_json(const SynthesisParams& p) {
  json alsf;
  for (KernelFamily f : kFamilies) {
    alsf[std::string(family_name(f))] = to_json(p.alsf_by_family[static_cast<int>(f)]);
  }
  json sky = {{"kernel", to_json(p.skyglow.kernel)},
              {"ranges", to_json(p.skyglow.ranges)},
              {"placement_seed", p.skyglow.placement_seed}};
  if (p.skyglow.lights) {
    json lights = json::array();
    for (const auto& l : *p.skyglow.lights) lights.push_back(to_json(l));
    sky["lights"] = lights;
  }
  return {{"seed", p.seed},
          {"apsf", to_json(p.apsf)},
          {"alsf", alsf},
          {"skyglow", sky},
          {"assignment_seed", p.assignment_seed},
          {"gains", gains_json(p.gains)},
          {"clip_mode", clip_name(p.clip_mode)},
          {"transfer", transfer_name(p.transfer)},
          {"min_area", p.min_area},
          {"light_threshold", p.light_threshold}};
}

SynthesisParams params_from_json(const json& j) {
  SynthesisParams p;
  p.seed = j.at("seed").get<std::uint64_t>();
  p.apsf = apsf_from_json(j.at("apsf"));
  for (KernelFamily f : kFamilies) {
    p.alsf_by_family[static_cast<int>(f)] =
        alsf_from_json(j.at("alsf").at(std::string(family_name(f))));
  }
  const json& sky = j.at("skyglow");
  p.skyglow.kernel = alsf_from_json(sky.at("kernel"));
  p.skyglow.ranges = skyglow_ranges_from(child(sky, "ranges"));
  p.skyglow.placement_seed = sky.at("placement_seed").get<std::uint64_t>();
  if (sky.contains("lights")) {
    std::vector<HiddenLight> lights;
    for (const auto& l : sky.at("lights")) lights.push_back(light_from_json(l));
    p.skyglow.lights = std::move(lights);
  }
  p.assignment_seed = j.at("assignment_seed").get<std::uint64_t>();
  p.gains = gains_from(j.at("gains"));
  p.clip_mode = clip_from(j.at("clip_mode").get<std::string>());
  p.transfer = transfer_from(j.at("transfer").get<std::string>());
  p.min_area = j.at("min_area").get<int>();
  p.light_threshold = j.at("light_threshold").get<double>();
  return p;
}

json to_json(const SynthesisRecord& r) {
  json lights = json::array();
  for (const auto& l : r.hidden_lights) lights.push_back(to_json(l));
  json families;
  for (KernelFamily f : kFamilies) {
    families[std::string(family_name(f))] = r.family_counts[static_cast<int>(f)];
  }
  return {{"scene_id", r.scene_id},
          {"variant", r.variant},
          {"params", to_json(r.params)},
          {"image_digest", r.image_digest},
          {"files", r.files},
          {"file_digests", r.file_digests},
          {"hidden_lights", lights},
          {"components", {{"count", r.component_count}, {"families", families}}}};
}

SynthesisRecord record_from_json(const json& j) {
  SynthesisRecord r;
  r.scene_id = j.at("scene_id").get<std::string>();
  r.variant = j.at("variant").get<int>();
  r.params = params_from_json(j.at("params"));
  r.image_digest = j.at("image_digest").get<std::string>();
  r.files = value_or(j, "files", r.files);
  r.file_digests = value_or(j, "file_digests", r.file_digests);
  if (j.contains("hidden_lights")) {
    for (const auto& l : j.at("hidden_lights")) r.hidden_lights.push_back(light_from_json(l));
  }
  if (j.contains("components")) {
    const json& c = j.at("components");
    r.component_count = c.at("count").get<int>();
    for (KernelFamily f : kFamilies) {
      r.family_counts[static_cast<int>(f)] =
          c.at("families").at(std::string(family_name(f))).get<int>();
    }
  }
  return r;
}

json to_json(const SynthesisConfig& c) {
  const KernelRanges& k = c.kernel;
  json j = {
      {"kernel",
       {{"T", range_json(k.optical_thickness)},
        {"q", range_json(k.forward_scatter)},
        {"scalor", range_json(k.scalor)},
        {"sigma", range_json(k.sigma)},
        {"kappa", range_json(k.kappa)},
        {"upward_alpha", range_json(k.upward_alpha)},
        {"downward_alpha", range_json(k.downward_alpha)},
        {"asymmetric_beams", {k.asymmetric_min_beams, k.asymmetric_max_beams}},
        {"A", k.amplitude}}},
      {"glow_sigma", range_json(c.glow_sigma)},
      {"glow_scalor", range_json(c.glow_scalor)},
      {"skyglow", to_json(c.skyglow)},
      {"gains",
       {{"sky", range_json(c.gain_sky)},
        {"alsf", range_json(c.gain_alsf)},
        {"apsf", range_json(c.gain_apsf)}}},
      {"fixed_gains", c.fixed_gains ? gains_json(*c.fixed_gains) : json(nullptr)},
      {"clip", clip_name(c.clip)},
      {"transfer", transfer_name(c.transfer)},
      {"min_area", c.min_area},
      {"light_threshold", c.light_threshold}};
  return j;
}

SynthesisConfig config_from_json(const json& j) {
  SynthesisConfig c;
  check_keys(j,
             {"kernel", "glow_sigma", "glow_scalor", "skyglow", "gains", "fixed_gains",
              "clip", "transfer", "min_area", "light_threshold"},
             "config");
  const json& k = child(j, "kernel");
  if (!k.is_null()) {
    check_keys(k,
               {"T", "q", "scalor", "sigma", "kappa", "upward_alpha", "downward_alpha",
                "asymmetric_beams", "A"},
               "config.kernel");
    c.kernel.optical_thickness = range_from(child(k, "T"), c.kernel.optical_thickness);
    c.kernel.forward_scatter = range_from(child(k, "q"), c.kernel.forward_scatter);
    c.kernel.scalor = range_from(child(k, "scalor"), c.kernel.scalor);
    c.kernel.sigma = range_from(child(k, "sigma"), c.kernel.sigma);
    c.kernel.kappa = range_from(child(k, "kappa"), c.kernel.kappa);
    c.kernel.upward_alpha = range_from(child(k, "upward_alpha"), c.kernel.upward_alpha);
    c.kernel.downward_alpha =
        range_from(child(k, "downward_alpha"), c.kernel.downward_alpha);
    if (k.contains("asymmetric_beams")) {
      c.kernel.asymmetric_min_beams = k.at("asymmetric_beams")[0].get<int>();
      c.kernel.asymmetric_max_beams = k.at("asymmetric_beams")[1].get<int>();
    }
    c.kernel.amplitude = value_or(k, "A", c.kernel.amplitude);
  }
  c.glow_sigma = range_from(child(j, "glow_sigma"), c.glow_sigma);
  c.glow_scalor = range_from(child(j, "glow_scalor"), c.glow_scalor);
  c.skyglow = skyglow_ranges_from(child(j, "skyglow"));
  const json& gains = child(j, "gains");
  if (!gains.is_null()) {
    check_keys(gains, {"sky", "alsf", "apsf"}, "config.gains");
    c.gain_sky = range_from(child(gains, "sky"), c.gain_sky);
    c.gain_alsf = range_from(child(gains, "alsf"), c.gain_alsf);
    c.gain_apsf = range_from(child(gains, "apsf"), c.gain_apsf);
  }
  if (j.contains("fixed_gains") && !j.at("fixed_gains").is_null()) {
    c.fixed_gains = gains_from(j.at("fixed_gains"));
  }
  if (j.contains("clip")) c.clip = clip_from(j.at("clip").get<std::string>());
  if (j.contains("transfer")) c.transfer = transfer_from(j.at("transfer").get<std::string>());
  c.min_area = value_or(j, "min_area", c.min_area);
  c.light_threshold = value_or(j, "light_threshold", c.light_threshold);
  return c;
}

}  // namespace lpsim
