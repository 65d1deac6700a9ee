#include "lpsim/alsf.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lpsim/error.h"

namespace lpsim {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Central difference along one axis of a size x size grid, one-sided at the
// ends.
double grid_derivative(const std::vector<double>& f, int size, int i, int j,
                       bool along_x) {
  auto value = [&](int a, int b) {
    return f[static_cast<std::size_t>(b) * size + a];
  };
  const int pos = along_x ? i : j;
  const int lo = std::max(pos - 1, 0);
  const int hi = std::min(pos + 1, size - 1);
  if (hi == lo) return 0.0;
  const double f_hi = along_x ? value(hi, j) : value(i, hi);
  const double f_lo = along_x ? value(lo, j) : value(i, lo);
  return (f_hi - f_lo) / (hi - lo);
}

}  // namespace

void AlsfParams::validate() const {
  base.validate();
  if (beams.empty()) throw ParameterError("beams", "at least one beam required");
  for (const auto& beam : beams) {
    if (!(beam.alpha >= 0.0 && beam.alpha < 360.0)) {
      throw ParameterError("alpha", "beam direction must lie in [0, 360), got " +
                                        std::to_string(beam.alpha));
    }
    if (!(beam.sigma > 0.0) || !std::isfinite(beam.sigma)) {
      throw ParameterError("sigma", "spread angle must be positive, got " +
                                        std::to_string(beam.sigma));
    }
    if (!(beam.amplitude >= 0.0) || !std::isfinite(beam.amplitude)) {
      throw ParameterError("A", "beam intensity must be >= 0, got " +
                                    std::to_string(beam.amplitude));
    }
  }
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw ParameterError("kappa", "decay factor must be >= 0, got " +
                                      std::to_string(kappa));
  }
}

bool DisplacementField::is_zero() const {
  auto zero = [](double v) { return v == 0.0; };
  return std::all_of(dx.begin(), dx.end(), zero) &&
         std::all_of(dy.begin(), dy.end(), zero);
}

double normalize_degrees(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d < 0.0) d += 360.0;
  // fmod of a tiny negative can round up to exactly 360.
  return d >= 360.0 ? 0.0 : d;
}

double polar_angle(double dx, double dy) {
  return normalize_degrees(std::atan2(-dy, dx) * kRadToDeg);
}

double angular_deviation(double theta, double alpha) {
  const double diff = std::fabs(theta - alpha);
  return std::min(diff, 360.0 - diff);
}

double beam_weight(double delta, const BeamSpec& beam) {
  return beam.amplitude * std::exp(-(delta * delta) / (beam.sigma * beam.sigma));
}

double decay_term(double r, double kappa, double w) {
  return std::exp(-kappa * r / (w / 2.0));
}

DisplacementField build_displacement_field(const AlsfParams& params, int size) {
  params.validate();
  if (size < 1 || size % 2 == 0) {
    throw ParameterError("size", "field size must be odd, got " +
                                     std::to_string(size));
  }
  DisplacementField field;
  field.size = size;
  const std::size_t n = static_cast<std::size_t>(size) * size;
  field.dx.assign(n, 0.0);
  field.dy.assign(n, 0.0);
  field.det_j.assign(n, 1.0);
  const int c = size / 2;

  for (int j = 0; j < size; ++j) {
    for (int i = 0; i < size; ++i) {
      const int ox = i - c;
      const int oy = j - c;
      if (ox == 0 && oy == 0) continue;
      const double theta = polar_angle(ox, oy);
      double phi = 0.0;
      for (const auto& beam : params.beams) {
        phi += beam_weight(angular_deviation(theta, beam.alpha), beam);
      }
      const double r = std::sqrt(static_cast<double>(ox * ox + oy * oy));
      const double scale = (1.0 + phi) * decay_term(r, params.kappa, size);
      if (!(scale > 0.0)) {
        throw ParameterError("alsf", "non-positive composite scale factor");
      }
      const double dr = r / scale - r;
      const double theta_rad = theta * kDegToRad;
      field.dx[field.index(i, j)] = dr * std::cos(theta_rad);
      field.dy[field.index(i, j)] = -dr * std::sin(theta_rad);
    }
  }

  // Sampling map (u + dx, v + dy); its Jacobian is I + grad(d).
  std::vector<double> mu(n), mv(n);
  for (int j = 0; j < size; ++j) {
    for (int i = 0; i < size; ++i) {
      const std::size_t k = field.index(i, j);
      mu[k] = i + field.dx[k];
      mv[k] = j + field.dy[k];
    }
  }
  for (int j = 0; j < size; ++j) {
    for (int i = 0; i < size; ++i) {
      const double ux = grid_derivative(mu, size, i, j, true);
      const double uy = grid_derivative(mu, size, i, j, false);
      const double vx = grid_derivative(mv, size, i, j, true);
      const double vy = grid_derivative(mv, size, i, j, false);
      // A 1x1 grid has no neighbours; treat it as the identity.
      const double det = size == 1 ? 1.0 : ux * vy - vx * uy;
      field.det_j[field.index(i, j)] = std::max(det, kMinJacobian);
    }
  }
  return field;
}

Kernel warp_apsf(const Kernel& apsf, const DisplacementField& field,
                 bool renormalize) {
  if (apsf.size() != field.size) {
    throw DimensionMismatch("APSF size " + std::to_string(apsf.size()) +
                            " does not match field size " +
                            std::to_string(field.size));
  }
  if (field.is_zero()) return apsf;

  const int s = apsf.size();
  Kernel out(s);
  for (int j = 0; j < s; ++j) {
    for (int i = 0; i < s; ++i) {
      const std::size_t k = field.index(i, j);
      out.at(i, j) = sample_bilinear(apsf, i + field.dx[k], j + field.dy[k]) /
                     field.det_j[k];
    }
  }
  if (renormalize) out.normalize();
  return out;
}

Kernel build_alsf(const AlsfParams& params, bool renormalize) {
  const Kernel apsf = generate_apsf(params.base);
  return warp_apsf(apsf, build_displacement_field(params, params.base.size),
                   renormalize);
}

std::string_view family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::kUpward: return "upward";
    case KernelFamily::kDownward: return "downward";
    case KernelFamily::kAsymmetric: return "asymmetric";
  }
  return "unknown";
}

KernelFamily family_from_name(std::string_view name) {
  if (name == "upward") return KernelFamily::kUpward;
  if (name == "downward") return KernelFamily::kDownward;
  if (name == "asymmetric") return KernelFamily::kAsymmetric;
  throw ParameterError("family", "unknown kernel family '" + std::string(name) + "'");
}

AlsfParams sample_family_params(KernelFamily family, Rng& rng, int width,
                                int height, const KernelRanges& ranges) {
  auto draw = [&rng](const Range& r) { return rng.uniform(r.lo, r.hi); };
  AlsfParams params;
  params.base.optical_thickness = draw(ranges.optical_thickness);
  params.base.forward_scatter = draw(ranges.forward_scatter);
  params.base.size = kernel_size_for(draw(ranges.scalor), width, height);
  params.kappa = draw(ranges.kappa);

  switch (family) {
    case KernelFamily::kUpward:
    case KernelFamily::kDownward: {
      const Range& alpha = family == KernelFamily::kUpward
                               ? ranges.upward_alpha
                               : ranges.downward_alpha;
      BeamSpec beam;
      beam.alpha = normalize_degrees(draw(alpha));
      beam.sigma = draw(ranges.sigma);
      beam.amplitude = ranges.amplitude;
      params.beams.push_back(beam);
      break;
    }
    case KernelFamily::kAsymmetric: {
      const int count = rng.uniform_int(ranges.asymmetric_min_beams,
                                        ranges.asymmetric_max_beams);
      for (int b = 0; b < count; ++b) {
        BeamSpec beam;
        beam.alpha = normalize_degrees(rng.uniform(0.0, 360.0));
        beam.sigma = draw(ranges.sigma);
        beam.amplitude = ranges.amplitude;
        params.beams.push_back(beam);
      }
      break;
    }
  }
  return params;
}

PresetKernel preset_kernel(KernelFamily family, Rng& rng, int width,
                           int height, const KernelRanges& ranges) {
  PresetKernel preset;
  preset.params = sample_family_params(family, rng, width, height, ranges);
  preset.kernel = build_alsf(preset.params);
  return preset;
}

}  // namespace lpsim
