#ifndef LPSIM_ALSF_H_
#define LPSIM_ALSF_H_

#include <string>
#include <string_view>
#include <vector>

#include "lpsim/apsf.h"
#include "lpsim/image.h"
#include "lpsim/rng.h"

namespace lpsim {

// One directional lobe of the warp. Angles are in degrees, measured
// counter-clockwise from +x with image-up at 90.
struct BeamSpec {
  double alpha = 90.0;     // direction, [0, 360)
  double sigma = 30.0;     // angular spread, > 0
  double amplitude = 2.0;  // A, >= 0

  bool operator==(const BeamSpec&) const = default;
};

struct AlsfParams {
  std::vector<BeamSpec> beams;
  double kappa = 0.75;  // global radial decay, >= 0
  ApsfParams base;

  // Throws ParameterError. Beam angles must already lie in [0, 360).
  void validate() const;

  bool operator==(const AlsfParams&) const = default;
};

// Pull-warp offsets over the kernel grid. The warped kernel at (u, v) reads
// the source kernel at (u + dx, v + dy). det_j holds the clamped Jacobian
// determinant of that sampling map.
struct DisplacementField {
  int size = 0;
  std::vector<double> dx;
  std::vector<double> dy;
  std::vector<double> det_j;

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * size + i;
  }
  bool is_zero() const;
};

inline constexpr double kMinJacobian = 1e-6;

double normalize_degrees(double deg);

// atan2(-dy, dx) in degrees, in [0, 360). (dx, dy) is a pixel offset with y
// pointing down, so image-up is 90.
double polar_angle(double dx, double dy);

// Shortest angular distance, in [0, 180].
double angular_deviation(double theta, double alpha);

// A * exp(-delta^2 / sigma^2).
double beam_weight(double delta, const BeamSpec& beam);

// exp(-kappa * r / (w / 2)).
double decay_term(double r, double kappa, double w);

// For each pixel offset (dx, dy) from the center:
//   phi = sum_i beam_weight_i,  D = decay_term(r, kappa, size)
//   S = (1 + phi) * D,  dr = r / S - r
//   offset = (dr cos(theta), -dr sin(theta))
// The center pixel gets a zero offset. det_j comes from central differences
// of (u + dx, v + dy) (one-sided on the border), clamped to kMinJacobian.
DisplacementField build_displacement_field(const AlsfParams& params, int size);

// ALSF(u, v) = APSF(u + dx, v + dy) / det_j(u, v), bilinear resampling with
// zero outside the kernel. Regions the sampling map compresses (det_j < 1,
// the stretched tail) gain weight, so the raw sum is not 1; `renormalize`
// rescales to unit sum.
Kernel warp_apsf(const Kernel& apsf, const DisplacementField& field,
                 bool renormalize = true);

// generate_apsf + build_displacement_field + warp_apsf.
Kernel build_alsf(const AlsfParams& params, bool renormalize = true);

enum class KernelFamily { kUpward = 0, kDownward = 1, kAsymmetric = 2 };

std::string_view family_name(KernelFamily family);
// Throws ParameterError for unknown names.
KernelFamily family_from_name(std::string_view name);

// Closed-open sampling ranges [lo, hi).
struct Range {
  double lo;
  double hi;
  bool operator==(const Range&) const = default;
};

struct KernelRanges {
  Range optical_thickness{1.1, 1.8};
  Range forward_scatter{0.2, 0.7};
  Range scalor{0.75, 1.5};
  Range sigma{15.0, 60.0};
  Range kappa{0.5, 1.0};
  Range upward_alpha{75.0, 105.0};
  Range downward_alpha{255.0, 285.0};
  int asymmetric_min_beams = 2;
  int asymmetric_max_beams = 4;
  double amplitude = 2.0;

  bool operator==(const KernelRanges&) const = default;
};

// Draws parameters for one family. Draw order: T, q, scalor, kappa, then for
// the single-beam families alpha, sigma; for the asymmetric family the beam
// count followed by (alpha, sigma) per beam.
AlsfParams sample_family_params(KernelFamily family, Rng& rng, int width,
                                int height,
                                const KernelRanges& ranges = KernelRanges{});

struct PresetKernel {
  Kernel kernel;
  AlsfParams params;
};

PresetKernel preset_kernel(KernelFamily family, Rng& rng, int width,
                           int height,
                           const KernelRanges& ranges = KernelRanges{});

}  // namespace lpsim

#endif  // LPSIM_ALSF_H_
